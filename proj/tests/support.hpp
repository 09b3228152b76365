// support.hpp: Random inputs and independent reference routines for the tests.
// Nothing here calls the library's eigensolver or partial trace.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qbattery/linalg.hpp"
#include "qbattery/state.hpp"

namespace testsupport {

using qbattery::ComplexMatrix;
using qbattery::cplx;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline ComplexMatrix random_matrix(std::size_t dim) {
    ComplexMatrix m(dim);
    for (auto& z : m.data()) z = {uniform(), uniform()};
    return m;
}

inline ComplexMatrix random_hermitian(std::size_t dim) {
    const ComplexMatrix a = random_matrix(dim);
    return (a + a.adjoint()) * cplx(0.5);
}

/// A A† / Tr(A A†): full rank, unit trace, positive.
inline ComplexMatrix random_density(std::size_t dim) {
    const ComplexMatrix a = random_matrix(dim);
    ComplexMatrix rho = a * a.adjoint();
    rho *= cplx(1.0 / rho.trace().real());
    rho.make_hermitian();
    return rho;
}

inline qbattery::DensityMatrix random_state16() {
    return qbattery::DensityMatrix(random_density(16), qbattery::SubsystemLayout::standard());
}

/// Partial trace of a 16x16 M1⊗M2⊗C⊗B matrix by explicit loops over the four
/// qubit indices; keep[q] selects which of the four qubits survive.
inline ComplexMatrix naive_partial_trace(const ComplexMatrix& rho, const std::array<bool, 4>& keep) {
    std::vector<int> kept;
    for (int q = 0; q < 4; ++q)
        if (keep[q]) kept.push_back(q);
    const std::size_t out_dim = std::size_t{1} << kept.size();
    ComplexMatrix out(out_dim);
    auto sub_index = [&](const int bits[4]) {
        std::size_t idx = 0;
        for (int q : kept) idx = 2 * idx + static_cast<std::size_t>(bits[q]);
        return idx;
    };
    int r[4], c[4];
    for (r[0] = 0; r[0] < 2; ++r[0])
        for (r[1] = 0; r[1] < 2; ++r[1])
            for (r[2] = 0; r[2] < 2; ++r[2])
                for (r[3] = 0; r[3] < 2; ++r[3])
                    for (c[0] = 0; c[0] < 2; ++c[0])
                        for (c[1] = 0; c[1] < 2; ++c[1])
                            for (c[2] = 0; c[2] < 2; ++c[2])
                                for (c[3] = 0; c[3] < 2; ++c[3]) {
                                    bool traced_match = true;
                                    for (int q = 0; q < 4; ++q)
                                        if (!keep[q] && r[q] != c[q]) traced_match = false;
                                    if (!traced_match) continue;
                                    const std::size_t row = 8 * r[0] + 4 * r[1] + 2 * r[2] + r[3];
                                    const std::size_t col = 8 * c[0] + 4 * c[1] + 2 * c[2] + c[3];
                                    out(sub_index(r), sub_index(c)) += rho(row, col);
                                }
    return out;
}

/// Eigenvalues of a complex Hermitian matrix through its real symmetric
/// 2n x 2n embedding [[Re, -Im], [Im, Re]] and textbook cyclic Jacobi. Every
/// eigenvalue appears twice in the embedding; one copy of each is returned.
inline std::vector<double> oracle_eigenvalues(const ComplexMatrix& h) {
    const std::size_t n = h.dim(), m = 2 * n;
    std::vector<double> a(m * m);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * m + j]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            at(i, j) = at(i + n, j + n) = h(i, j).real();
            at(i + n, j) = h(i, j).imag();
            at(i, j + n) = -h(i, j).imag();
        }
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2 * at(p, q), at(q, q) - at(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> all(m);
    for (std::size_t i = 0; i < m; ++i) all[i] = at(i, i);
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (std::size_t i = 0; i < m; i += 2) out.push_back(0.5 * (all[i] + all[i + 1]));
    return out;
}

inline double oracle_entropy_bits(const ComplexMatrix& rho) {
    double s = 0;
    for (double l : oracle_eigenvalues(rho))
        if (l > 1e-14) s -= l * std::log2(l);
    return s;
}

/// Closed-form eigenvalues of a 2x2 Hermitian matrix, ascending.
inline std::array<double, 2> eig2(const ComplexMatrix& h) {
    const double mean = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double half_gap = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double r = std::sqrt(half_gap * half_gap + std::norm(h(0, 1)));
    return {mean - r, mean + r};
}

/// Haar-ish random qubit unitary from ZYZ Euler angles and a global phase.
inline ComplexMatrix euler_unitary(double alpha, double beta, double gamma) {
    const cplx i(0, 1);
    const double c = std::cos(beta / 2), s = std::sin(beta / 2);
    return ComplexMatrix{std::exp(-i * (alpha + gamma) / 2.0) * c, -std::exp(-i * (alpha - gamma) / 2.0) * s,
                         std::exp(i * (alpha - gamma) / 2.0) * s, std::exp(i * (alpha + gamma) / 2.0) * c};
}

}  // namespace testsupport
