// observables.hpp: Entropies, correlations, energies, coherence, ergotropy and
// trace-distance information flow

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qbattery/dynamics.hpp"
#include "qbattery/linalg.hpp"
#include "qbattery/model.hpp"
#include "qbattery/state.hpp"

namespace qbattery {

enum class LogBase { Two, E };

struct TimeSeries {
    std::string name;
    std::vector<double> t;
    std::vector<double> values;
    std::string units;
};

/// Eigenvalues below this are treated as exact zeros in entropies.
inline constexpr double kEntropyClip = 1e-14;

double entropy_from_eigenvalues(std::span<const double> eigenvalues, LogBase base = LogBase::Two);
double von_neumann_entropy(const ComplexMatrix& rho, LogBase base = LogBase::Two);
double von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::Two);

/// S(C) + S(B) - S(CB) for a state in the standard layout.
double mutual_information_cb(const DensityMatrix& state, LogBase base = LogBase::Two);

/// S(M12) + S(C) + S(B) - S(M1 M2 C B); M12 is the joint two-qubit marginal.
double mutual_information_m12cb(const DensityMatrix& state, LogBase base = LogBase::Two);

/// S(dephased ρ) - S(ρ) in the computational basis.
double relative_entropy_of_coherence(const ComplexMatrix& rho, LogBase base = LogBase::Two);
double relative_entropy_of_coherence(const DensityMatrix& rho, LogBase base = LogBase::Two);

/// Populations of ρ sorted descending placed on the eigenvectors of h sorted
/// ascending: the minimum-energy state unitarily reachable from ρ.
ComplexMatrix passive_state(const ComplexMatrix& rho, const ComplexMatrix& h);

/// Tr(hρ) - Tr(h ρ_passive), clamped at zero against roundoff.
double ergotropy(const ComplexMatrix& rho, const ComplexMatrix& h);

/// Local qubit Hamiltonian ω|1><1|.
ComplexMatrix local_hamiltonian(double omega);

// --- series over trajectories -----------------------------------------------

/// ΔE_n(t)/ω_n for n ∈ {C, B}.
TimeSeries internal_energy(const Trajectory& traj, const ModelParams& p, const std::string& subsystem);

/// Σ_m (E_Mm(t) - E_Mm(0)) / ω_Mm
TimeSeries machine_energy(const Trajectory& traj, const ModelParams& p);

/// ΔE_B(t)/t from a series starting at t = 0; the t = 0 value is 0.
/// Input and output share normalization (ΔE_B/ω_B in, ΔP_B/ω_B out).
TimeSeries charging_power(const TimeSeries& delta_e_b);

TimeSeries coherence_series(const Trajectory& traj, const std::string& subsystem, LogBase base = LogBase::Two);

/// ε_B(t)/ω_B
TimeSeries ergotropy_series(const Trajectory& traj, const ModelParams& p);

TimeSeries mutual_information_series(const Trajectory& traj, bool tripartite, LogBase base = LogBase::Two);

// --- trace distance and its derivative ----------------------------------------

/// Initial states of the two branches used for the information-flow witness.
struct SigmaPair {
    DensityMatrix alpha0;
    DensityMatrix beta0;
};

/// Branches share Gibbs machine qubits and the charger state and differ in the
/// battery: |0><0| (alpha) vs |1><1| (beta).
SigmaPair make_sigma_pair(const ModelParams& p, ChargerPreparation charger);

/// ½‖Tr_rest(a) - Tr_rest(b)‖₁
double reduced_trace_distance(const ComplexMatrix& a, const ComplexMatrix& b, std::span<const std::string> keep);

/// Central differences in the interior, first-order one-sided at the ends.
/// Requires a uniform grid with at least two points.
std::vector<double> finite_difference(std::span<const double> values, double h);

/// σ_n(t) = d/dt D_n(t) from two stored trajectories on matching grids.
TimeSeries sigma_n(const Trajectory& alpha, const Trajectory& beta, std::span<const std::string> keep);

/// Accumulates D_n(t) for one subsystem at every integrator step, for use as a
/// PairStepSink; `sigma()` differentiates on that dense grid.
class TraceDistanceRecorder {
public:
    TraceDistanceRecorder(std::string name, std::vector<std::string> keep, double dt);

    void record(double t, const ComplexMatrix& alpha, const ComplexMatrix& beta);

    TimeSeries distance() const;
    TimeSeries sigma() const;

private:
    std::string name_;
    std::vector<std::string> keep_;
    double dt_;
    std::vector<double> t_, d_;
};

/// ∫ max(-σ, 0) dt by the trapezoid rule: total information backflow.
double backflow_integral(const TimeSeries& sigma);

}  // namespace qbattery
