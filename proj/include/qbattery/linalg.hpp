// linalg.hpp: Dense complex matrices, tensor products and the Hermitian eigensolver

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbattery {

using cplx = std::complex<double>;

/// Square, dense, row-major complex matrix. Operators, Hamiltonians and
/// density matrices are all carried by this type.
class ComplexMatrix {
public:
    explicit ComplexMatrix(std::size_t dim);
    /// Row-major initializer; the element count must be a perfect square.
    ComplexMatrix(std::initializer_list<cplx> row_major);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t dim() const noexcept { return dim_; }

    cplx& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
    const cplx& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * dim_ + col];
    }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    cplx trace() const noexcept;
    double max_abs() const noexcept;
    double frobenius_norm() const noexcept;
    bool is_finite() const noexcept;
    /// max |a_ij - conj(a_ji)|
    double hermiticity_residual() const noexcept;
    /// (A + A†)/2
    ComplexMatrix hermitian_part() const;
    void make_hermitian() noexcept;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx scale) noexcept;

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t dim_;
    std::vector<cplx> data_;
};

/// Largest entrywise distance between two matrices of equal dimension.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product with `a`'s index varying slowest.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tr(a b) without forming the product.
cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Single-qubit building blocks in the {|0>, |1>} basis, |0> the ground state.
namespace qubit {
ComplexMatrix sigma_plus();   // |1><0|
ComplexMatrix sigma_minus();  // |0><1|
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();      // diag(1, -1)
ComplexMatrix projector(int level);
}  // namespace qubit

/// Ordered tensor-factor description of a composite Hilbert space.
class SubsystemLayout {
public:
    SubsystemLayout(std::vector<std::string> labels, std::vector<std::size_t> dims);

    /// M1 ⊗ M2 ⊗ C ⊗ B, all qubits.
    static const SubsystemLayout& standard();

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t total_dim() const noexcept { return total_dim_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    bool contains(const std::string& label) const noexcept;
    /// Throws std::invalid_argument for unknown labels.
    std::size_t index_of(const std::string& label) const;
    std::size_t dim_of(const std::string& label) const { return dims_[index_of(label)]; }

    /// Layout with only the kept labels, in this layout's order.
    SubsystemLayout restricted(std::span<const std::string> keep) const;

    bool operator==(const SubsystemLayout&) const = default;

private:
    std::vector<std::string> labels_;
    std::vector<std::size_t> dims_;
    std::size_t total_dim_ = 1;
};

/// I ⊗ … ⊗ op ⊗ … ⊗ I with `op` in the slot named `label`.
ComplexMatrix embed(const ComplexMatrix& op, const std::string& label, const SubsystemLayout& layout);

/// Partial trace keeping `keep` (any order; result follows layout order).
ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemLayout& layout,
                            std::span<const std::string> keep);

class EigenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HermitianEig {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // columns
};

struct JacobiOptions {
    int max_sweeps = 100;
    double off_diagonal_tolerance = 1e-13;  // relative to max(1, ‖A‖_F)
    double hermiticity_tolerance = 1e-9;
};

/// Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.
/// Eigenvalues ascend; ties keep original column order.
HermitianEig hermitian_eig(const ComplexMatrix& a, const JacobiOptions& opts = {});

/// Eigenvalues only (skips eigenvector accumulation).
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, const JacobiOptions& opts = {});

/// Σ|λ_i| for Hermitian input.
double trace_norm(const ComplexMatrix& a);

}  // namespace qbattery
