// linalg.cpp: Dense complex matrix kernel

#include "qbattery/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qbattery {

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.dim() != b.dim()) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) throw std::invalid_argument("ComplexMatrix: dimension must be >= 1");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<cplx> row_major) : dim_(0), data_(row_major) {
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(data_.size()))));
    if (n == 0 || n * n != data_.size())
        throw std::invalid_argument("ComplexMatrix: initializer size is not a nonzero perfect square");
    dim_ = n;
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

cplx ComplexMatrix::trace() const noexcept {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

bool ComplexMatrix::is_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double ComplexMatrix::hermiticity_residual() const noexcept {
    double r = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j)
            r = std::max(r, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return r;
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
    ComplexMatrix out = *this;
    out.make_hermitian();
    return out;
}

void ComplexMatrix::make_hermitian() noexcept {
    for (std::size_t i = 0; i < dim_; ++i) {
        (*this)(i, i) = (*this)(i, i).real();
        for (std::size_t j = i + 1; j < dim_; ++j) {
            const cplx v = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
            (*this)(i, j) = v;
            (*this)(j, i) = std::conj(v);
        }
    }
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) noexcept {
    for (auto& z : data_) z *= scale;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "operator*");
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b + b * a; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    ComplexMatrix out(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return out;
}

cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "trace_of_product");
    cplx t = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) t += a(i, k) * b(k, i);
    return t;
}

namespace qubit {
ComplexMatrix sigma_plus() { return {0.0, 0.0, 1.0, 0.0}; }
ComplexMatrix sigma_minus() { return {0.0, 1.0, 0.0, 0.0}; }
ComplexMatrix sigma_x() { return {0.0, 1.0, 1.0, 0.0}; }
ComplexMatrix sigma_y() { return {0.0, cplx(0, -1), cplx(0, 1), 0.0}; }
ComplexMatrix sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }
ComplexMatrix projector(int level) {
    if (level != 0 && level != 1) throw std::invalid_argument("qubit::projector: level must be 0 or 1");
    ComplexMatrix p(2);
    p(level, level) = 1.0;
    return p;
}
}  // namespace qubit

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<std::string> labels, std::vector<std::size_t> dims)
    : labels_(std::move(labels)), dims_(std::move(dims)) {
    if (labels_.empty()) throw std::invalid_argument("SubsystemLayout: no subsystems");
    if (labels_.size() != dims_.size())
        throw std::invalid_argument("SubsystemLayout: labels and dims differ in length");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (dims_[i] == 0) throw std::invalid_argument("SubsystemLayout: zero local dimension");
        for (std::size_t j = 0; j < i; ++j)
            if (labels_[i] == labels_[j])
                throw std::invalid_argument("SubsystemLayout: duplicate label '" + labels_[i] + "'");
        total_dim_ *= dims_[i];
    }
}

const SubsystemLayout& SubsystemLayout::standard() {
    static const SubsystemLayout layout({"M1", "M2", "C", "B"}, {2, 2, 2, 2});
    return layout;
}

bool SubsystemLayout::contains(const std::string& label) const noexcept {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t SubsystemLayout::index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::invalid_argument("unknown subsystem label '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

SubsystemLayout SubsystemLayout::restricted(std::span<const std::string> keep) const {
    if (keep.empty()) throw std::invalid_argument("partial trace: empty keep-set");
    std::vector<bool> kept(labels_.size(), false);
    for (const auto& l : keep) kept[index_of(l)] = true;
    std::vector<std::string> labels;
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (kept[i]) {
            labels.push_back(labels_[i]);
            dims.push_back(dims_[i]);
        }
    return SubsystemLayout(std::move(labels), std::move(dims));
}

ComplexMatrix embed(const ComplexMatrix& op, const std::string& label, const SubsystemLayout& layout) {
    const std::size_t slot = layout.index_of(label);
    if (op.dim() != layout.dims()[slot])
        throw std::invalid_argument("embed: operator dimension does not match slot '" + label + "'");
    std::size_t left = 1, right = 1;
    for (std::size_t i = 0; i < slot; ++i) left *= layout.dims()[i];
    for (std::size_t i = slot + 1; i < layout.size(); ++i) right *= layout.dims()[i];
    return kron(kron(ComplexMatrix::identity(left), op), ComplexMatrix::identity(right));
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemLayout& layout,
                            std::span<const std::string> keep) {
    if (rho.dim() != layout.total_dim())
        throw std::invalid_argument("partial_trace: matrix dimension does not match layout");
    const SubsystemLayout reduced = layout.restricted(keep);
    const std::size_t n = layout.size();

    std::vector<bool> kept(n, false);
    for (const auto& l : keep) kept[layout.index_of(l)] = true;

    // Split every full index into (kept, traced) composite indices once.
    const std::size_t full = layout.total_dim();
    std::vector<std::size_t> kept_index(full), traced_index(full);
    std::vector<std::size_t> digits(n);
    for (std::size_t idx = 0; idx < full; ++idx) {
        std::size_t rem = idx;
        for (std::size_t s = n; s-- > 0;) {
            digits[s] = rem % layout.dims()[s];
            rem /= layout.dims()[s];
        }
        std::size_t k = 0, t = 0;
        for (std::size_t s = 0; s < n; ++s) {
            if (kept[s])
                k = k * layout.dims()[s] + digits[s];
            else
                t = t * layout.dims()[s] + digits[s];
        }
        kept_index[idx] = k;
        traced_index[idx] = t;
    }

    ComplexMatrix out(reduced.total_dim());
    for (std::size_t i = 0; i < full; ++i)
        for (std::size_t j = 0; j < full; ++j)
            if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += rho(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// Cyclic complex Jacobi

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Diagonalizes in place; returns the rotated matrix's diagonal in original order.
std::vector<double> jacobi_diagonalize(ComplexMatrix a, ComplexMatrix* vectors, const JacobiOptions& opts) {
    const double herm = a.hermiticity_residual();
    if (herm > opts.hermiticity_tolerance) {
        std::ostringstream os;
        os << "hermitian_eig: input is not Hermitian (residual " << herm << ")";
        throw EigenError(os.str());
    }
    if (!a.is_finite()) throw EigenError("hermitian_eig: non-finite input");
    a = a.hermitian_part();

    const std::size_t n = a.dim();
    const double threshold = opts.off_diagonal_tolerance * std::max(1.0, a.frobenius_norm());

    int sweep = 0;
    double off = off_diagonal_norm(a);
    while (off > threshold) {
        if (sweep++ >= opts.max_sweeps) {
            std::ostringstream os;
            os << "hermitian_eig: no convergence after " << opts.max_sweeps
               << " sweeps (off-diagonal norm " << off << ")";
            throw EigenError(os.str());
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;

                // Phase-rotate to a real off-diagonal, then a real Jacobi rotation.
                const cplx phase = apq / mag;  // e^{iφ}
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on columns (p, q).
                const cplx jpp = c, jpq = s;
                const cplx jqp = -s * std::conj(phase), jqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // A <- A J
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- J† A
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                if (vectors) {
                    auto& v = *vectors;
                    for (std::size_t k = 0; k < n; ++k) {
                        const cplx vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = vkp * jpp + vkq * jqp;
                        v(k, q) = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
        off = off_diagonal_norm(a);
    }

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    return diag;
}

std::vector<std::size_t> ascending_order(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    return order;
}

}  // namespace

HermitianEig hermitian_eig(const ComplexMatrix& a, const JacobiOptions& opts) {
    ComplexMatrix v = ComplexMatrix::identity(a.dim());
    const auto diag = jacobi_diagonalize(a, &v, opts);
    const auto order = ascending_order(diag);

    HermitianEig out{std::vector<double>(diag.size()), ComplexMatrix(a.dim())};
    for (std::size_t c = 0; c < order.size(); ++c) {
        out.eigenvalues[c] = diag[order[c]];
        for (std::size_t r = 0; r < a.dim(); ++r) out.eigenvectors(r, c) = v(r, order[c]);
    }
    return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, const JacobiOptions& opts) {
    auto diag = jacobi_diagonalize(a, nullptr, opts);
    std::stable_sort(diag.begin(), diag.end());
    return diag;
}

double trace_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (double lambda : hermitian_eigenvalues(a)) s += std::abs(lambda);
    return s;
}

}  // namespace qbattery
