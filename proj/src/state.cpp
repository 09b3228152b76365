// state.cpp: Density matrices with validated state invariants

#include "qbattery/state.hpp"

#include <cmath>
#include <sstream>

namespace qbattery {

StateDiagnostics diagnose_state(const ComplexMatrix& rho) {
    StateDiagnostics d;
    d.trace_deviation = std::abs(rho.trace() - 1.0);
    d.hermiticity_residual = rho.hermiticity_residual();
    d.min_eigenvalue = hermitian_eigenvalues(rho.hermitian_part()).front();
    return d;
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, SubsystemLayout layout, NoCheck)
    : matrix_(std::move(matrix)), layout_(std::move(layout)) {
    if (matrix_.dim() != layout_.total_dim())
        throw InvalidState("DensityMatrix: matrix dimension does not match layout");
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, SubsystemLayout layout, const StateTolerances& tol)
    : DensityMatrix(std::move(matrix), std::move(layout), NoCheck{}) {
    if (!matrix_.is_finite()) throw InvalidState("DensityMatrix: non-finite entries");
    const auto d = diagnose_state(matrix_);
    if (!d.within(tol)) {
        std::ostringstream os;
        os << "DensityMatrix: invariant violation (|Tr-1| = " << d.trace_deviation
           << ", hermiticity = " << d.hermiticity_residual << ", min eigenvalue = " << d.min_eigenvalue << ")";
        throw InvalidState(os.str());
    }
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix matrix, SubsystemLayout layout) {
    return DensityMatrix(std::move(matrix), std::move(layout), NoCheck{});
}

DensityMatrix DensityMatrix::pure(std::span<const cplx> psi, SubsystemLayout layout) {
    ComplexMatrix m(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
        for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
    return DensityMatrix(std::move(m), std::move(layout));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    auto labels = a.layout().labels();
    auto dims = a.layout().dims();
    labels.insert(labels.end(), b.layout().labels().begin(), b.layout().labels().end());
    dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());
    return DensityMatrix(kron(a.matrix(), b.matrix()), SubsystemLayout(std::move(labels), std::move(dims)),
                         DensityMatrix::NoCheck{});
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
    return DensityMatrix::unchecked(partial_trace(rho.matrix(), rho.layout(), keep),
                                    rho.layout().restricted(keep));
}

}  // namespace qbattery
