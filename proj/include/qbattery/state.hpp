// state.hpp: Density matrices with validated state invariants

#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "qbattery/linalg.hpp"

namespace qbattery {

class InvalidState : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct StateTolerances {
    double trace = 1e-8;
    double hermiticity = 1e-10;
    double negativity = 1e-8;  // min eigenvalue >= -negativity
};

struct StateDiagnostics {
    double trace_deviation = 0.0;
    double hermiticity_residual = 0.0;
    double min_eigenvalue = 0.0;

    bool within(const StateTolerances& tol) const noexcept {
        return trace_deviation <= tol.trace && hermiticity_residual <= tol.hermiticity &&
               min_eigenvalue >= -tol.negativity;
    }
};

StateDiagnostics diagnose_state(const ComplexMatrix& rho);

/// A unit-trace, Hermitian, positive semidefinite matrix tagged with its
/// tensor layout. The checked constructor throws InvalidState on violation.
class DensityMatrix {
public:
    DensityMatrix(ComplexMatrix matrix, SubsystemLayout layout, const StateTolerances& tol = {});

    /// Skips the eigenvalue check; for states already validated by the caller
    /// (e.g. the integrator, which monitors every emitted step itself).
    static DensityMatrix unchecked(ComplexMatrix matrix, SubsystemLayout layout);

    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    const SubsystemLayout& layout() const noexcept { return layout_; }
    std::size_t dim() const noexcept { return matrix_.dim(); }

    /// Pure state |ψ><ψ| for a normalized vector.
    static DensityMatrix pure(std::span<const cplx> psi, SubsystemLayout layout);

    /// ρ_a ⊗ ρ_b with concatenated layouts.
    friend DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

private:
    struct NoCheck {};
    DensityMatrix(ComplexMatrix matrix, SubsystemLayout layout, NoCheck);

    ComplexMatrix matrix_;
    SubsystemLayout layout_;
};

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep);

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::string> keep) {
    return partial_trace(rho, std::span<const std::string>(keep.begin(), keep.size()));
}

}  // namespace qbattery
