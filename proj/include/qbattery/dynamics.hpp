// dynamics.hpp: Lindblad right-hand side and fixed-step RK4 integration

#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbattery/model.hpp"
#include "qbattery/state.hpp"

namespace qbattery {

/// Indicator of the closed window [0, tau].
double phi(double t, double tau) noexcept;

/// Reference right-hand side assembled from dense operators:
/// -i[H0, ρ] + φ(t)( -i[ΔH_F(t) + H_CB + H_M12C, ρ] + Σ rate (LρL† - ½{L†L, ρ}) ).
ComplexMatrix lindblad_rhs(const ModelParams& p, const SystemOperators& ops, double t, const ComplexMatrix& rho);

/// Same generator, evaluated through sparse operator lists. This is the path
/// the integrator uses; `lindblad_rhs` is kept as an independent check.
class LindbladGenerator {
public:
    explicit LindbladGenerator(const ModelParams& p);

    void apply(double t, const ComplexMatrix& rho, ComplexMatrix& out) const;
    ComplexMatrix operator()(double t, const ComplexMatrix& rho) const;

    const ModelParams& params() const noexcept { return params_; }

private:
    struct Entry {
        std::size_t row;
        std::size_t col;
        cplx value;
    };
    using Sparse = std::vector<Entry>;

    static Sparse sparsify(const ComplexMatrix& m);

    ModelParams params_;
    std::size_t dim_;
    Sparse free_;       // H0
    Sparse gated_;      // H0 + H_CB + H_M12C - (i/2) Σ rate L†L
    Sparse drive_up_;   // σ⁺_C
    Sparse drive_down_; // σ⁻_C
    struct JumpTerm {
        std::size_t out;   // flat index into the result
        std::size_t in;    // flat index into ρ
        cplx coeff;        // rate · L(r1,c1) · conj(L(r2,c2))
    };
    std::vector<JumpTerm> jump_terms_;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, std::size_t step, double t)
        : std::runtime_error(what), step_(step), t_(t) {}
    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return t_; }

private:
    std::size_t step_;
    double t_;
};

struct IntegratorSettings {
    double dt = 1e-3;
    double t_max = 100.0;
    std::size_t stride = 10;            // full-state storage interval in steps
    bool check_positivity = true;       // min eigenvalue on every stored step
    bool store_states = true;           // false: keep the grid, drop the snapshots
    double abort_trace_drift = 1e-6;
    double abort_negativity = 1e-6;
    double max_dt_omega = 0.05;         // dt * omega_m2 guard

    /// Number of steps; throws std::invalid_argument unless t_max/dt is integral.
    std::size_t steps() const;
};

/// Per-step state hygiene bookkeeping. Values are measured before the
/// correction is applied.
struct HygieneStats {
    double max_trace_correction = 0.0;   // max |Tr ρ - 1| before renormalization
    double max_hermiticity_residual = 0.0;
    double min_eigenvalue = 1.0;         // over stored steps (if checked)
    std::size_t steps = 0;
    std::size_t renormalizations = 0;    // steps with a nonzero trace correction

    void merge(const HygieneStats& other);
};

/// Classical RK4 with stage times t, t+dt/2, t+dt. Each step ends with
/// re-symmetrization and trace renormalization.
class Rk4Stepper {
public:
    Rk4Stepper(const LindbladGenerator& generator, ComplexMatrix rho0, double dt,
               double abort_trace_drift = 1e-6);

    void step();

    std::size_t step_index() const noexcept { return step_; }
    double time() const noexcept { return static_cast<double>(step_) * dt_; }
    const ComplexMatrix& state() const noexcept { return rho_; }
    const HygieneStats& stats() const noexcept { return stats_; }

private:
    const LindbladGenerator* gen_;
    ComplexMatrix rho_, k1_, k2_, k3_, k4_, tmp_;
    double dt_;
    double abort_trace_drift_;
    std::size_t step_ = 0;
    HygieneStats stats_;
};

struct Trajectory {
    double dt = 0.0;
    std::size_t stride = 1;
    std::vector<double> times;           // stored grid: k * stride * dt
    std::vector<DensityMatrix> states;
    HygieneStats stats;
};

/// Called after every step (and once for t = 0) with the current state.
using StepSink = std::function<void(std::size_t step, double t, const ComplexMatrix& rho)>;
using PairStepSink =
    std::function<void(std::size_t step, double t, const ComplexMatrix& alpha, const ComplexMatrix& beta)>;

Trajectory integrate(const ModelParams& p, const DensityMatrix& rho0, const IntegratorSettings& settings,
                     const StepSink& sink = {});

/// Two initial states stepped in lockstep on one grid.
std::pair<Trajectory, Trajectory> integrate_pair(const ModelParams& p, const DensityMatrix& alpha0,
                                                 const DensityMatrix& beta0, const IntegratorSettings& settings,
                                                 const PairStepSink& sink = {});

}  // namespace qbattery
