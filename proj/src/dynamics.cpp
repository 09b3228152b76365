// dynamics.cpp: Lindblad generator and RK4 integrator

#include "qbattery/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qbattery {

double phi(double t, double tau) noexcept { return (t >= 0.0 && t <= tau) ? 1.0 : 0.0; }

ComplexMatrix lindblad_rhs(const ModelParams& p, const SystemOperators& ops, double t, const ComplexMatrix& rho) {
    const cplx minus_i(0.0, -1.0);
    ComplexMatrix out = minus_i * commutator(ops.h0, rho);
    if (phi(t, p.tau) == 0.0) return out;

    out += minus_i * commutator(ops.drive(t) + ops.h_cb + ops.h_m12c, rho);
    for (const auto& jump : ops.jumps) {
        if (jump.rate == 0.0) continue;
        const ComplexMatrix ldag = jump.op.adjoint();
        ComplexMatrix d = jump.op * rho * ldag - 0.5 * anticommutator(ldag * jump.op, rho);
        out += jump.rate * d;
    }
    return out;
}

// ---------------------------------------------------------------------------

LindbladGenerator::Sparse LindbladGenerator::sparsify(const ComplexMatrix& m) {
    Sparse s;
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            if (m(i, j) != cplx{}) s.push_back({i, j, m(i, j)});
    return s;
}

LindbladGenerator::LindbladGenerator(const ModelParams& p) : params_(p), dim_(16) {
    const auto ops = build_system_operators(p);
    dim_ = ops.h0.dim();
    free_ = sparsify(ops.h0);

    ComplexMatrix effective = ops.h0 + ops.h_cb + ops.h_m12c;
    for (const auto& jump : ops.jumps) {
        if (jump.rate == 0.0) continue;
        effective -= cplx(0.0, 0.5 * jump.rate) * (jump.op.adjoint() * jump.op);
        const Sparse l = sparsify(jump.op);
        for (const auto& a : l)
            for (const auto& b : l)
                jump_terms_.push_back({a.row * dim_ + b.row, a.col * dim_ + b.col,
                                       jump.rate * a.value * std::conj(b.value)});
    }
    gated_ = sparsify(effective);
    if (p.f != 0.0) {
        drive_up_ = sparsify(ops.sigma_plus_c);
        drive_down_ = sparsify(ops.sigma_minus_c);
    }
}

void LindbladGenerator::apply(double t, const ComplexMatrix& rho, ComplexMatrix& out) const {
    const std::size_t n = dim_;
    // X = K ρ for the non-Hermitian effective Hamiltonian K; rhs = -i(X - X†) + jumps.
    ComplexMatrix& x = out;
    std::fill(x.data().begin(), x.data().end(), cplx{});

    // Row update on interleaved (re, im) doubles so the loop vectorizes.
    auto accumulate = [&](const Sparse& s, cplx scale) {
        for (const auto& e : s) {
            const cplx v = scale * e.value;
            const double vr = v.real(), vi = v.imag();
            double* xr = reinterpret_cast<double*>(&x(e.row, 0));
            const double* rr = reinterpret_cast<const double*>(&rho(e.col, 0));
            for (std::size_t j = 0; j < 2 * n; j += 2) {
                const double a = rr[j], b = rr[j + 1];
                xr[j] += vr * a - vi * b;
                xr[j + 1] += vr * b + vi * a;
            }
        }
    };

    const bool on = phi(t, params_.tau) != 0.0;
    if (!on) {
        accumulate(free_, 1.0);
    } else {
        accumulate(gated_, 1.0);
        if (!drive_up_.empty()) {
            const cplx phase = std::polar(1.0, -params_.omega_c * t);
            accumulate(drive_up_, params_.f * phase);
            accumulate(drive_down_, params_.f * std::conj(phase));
        }
    }

    // out = -i (X - X†), computed in place on the upper triangle.
    for (std::size_t i = 0; i < n; ++i) {
        const cplx d = x(i, i) - std::conj(x(i, i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx a = x(i, j) - std::conj(x(j, i));
            x(i, j) = cplx(a.imag(), -a.real());
            x(j, i) = std::conj(x(i, j));
        }
        x(i, i) = cplx(d.imag(), -d.real());
    }

    if (!on) return;
    auto dst = out.data();
    auto src = rho.data();
    for (const auto& term : jump_terms_) {
        const cplx r = src[term.in];
        dst[term.out] += cplx(term.coeff.real() * r.real() - term.coeff.imag() * r.imag(),
                              term.coeff.real() * r.imag() + term.coeff.imag() * r.real());
    }
}

ComplexMatrix LindbladGenerator::operator()(double t, const ComplexMatrix& rho) const {
    ComplexMatrix out(dim_);
    apply(t, rho, out);
    return out;
}

// ---------------------------------------------------------------------------

std::size_t IntegratorSettings::steps() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("integrator: dt must be positive and finite");
    if (!(t_max > 0) || !std::isfinite(t_max))
        throw std::invalid_argument("integrator: t_max must be positive and finite");
    if (stride == 0) throw std::invalid_argument("integrator: stride must be >= 1");
    const double ratio = t_max / dt;
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    if (n == 0 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream os;
        os << "integrator: t_max = " << t_max << " is not an integer multiple of dt = " << dt;
        throw std::invalid_argument(os.str());
    }
    return n;
}

void HygieneStats::merge(const HygieneStats& other) {
    max_trace_correction = std::max(max_trace_correction, other.max_trace_correction);
    max_hermiticity_residual = std::max(max_hermiticity_residual, other.max_hermiticity_residual);
    min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
    steps += other.steps;
    renormalizations += other.renormalizations;
}

Rk4Stepper::Rk4Stepper(const LindbladGenerator& generator, ComplexMatrix rho0, double dt, double abort_trace_drift)
    : gen_(&generator),
      rho_(std::move(rho0)),
      k1_(rho_.dim()),
      k2_(rho_.dim()),
      k3_(rho_.dim()),
      k4_(rho_.dim()),
      tmp_(rho_.dim()),
      dt_(dt),
      abort_trace_drift_(abort_trace_drift) {}

void Rk4Stepper::step() {
    const double t = time();
    const double h = dt_;
    auto stage = [&](const ComplexMatrix& k, double scale) {
        auto dst = tmp_.data();
        auto src = rho_.data();
        auto kk = k.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] + scale * kk[i];
    };

    gen_->apply(t, rho_, k1_);
    stage(k1_, 0.5 * h);
    gen_->apply(t + 0.5 * h, tmp_, k2_);
    stage(k2_, 0.5 * h);
    gen_->apply(t + 0.5 * h, tmp_, k3_);
    stage(k3_, h);
    gen_->apply(t + h, tmp_, k4_);

    auto r = rho_.data();
    const double w = h / 6.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] += w * (k1_.data()[i] + 2.0 * k2_.data()[i] + 2.0 * k3_.data()[i] + k4_.data()[i]);
    ++step_;

    stats_.max_hermiticity_residual = std::max(stats_.max_hermiticity_residual, rho_.hermiticity_residual());
    rho_.make_hermitian();
    const double tr = rho_.trace().real();
    const double drift = std::abs(tr - 1.0);
    if (!std::isfinite(tr) || drift > abort_trace_drift_) {
        std::ostringstream os;
        os << "integration failure: trace drift " << drift << " at t = " << time();
        throw IntegrationError(os.str(), step_, time());
    }
    stats_.max_trace_correction = std::max(stats_.max_trace_correction, drift);
    if (drift != 0.0) {
        rho_ *= 1.0 / tr;
        ++stats_.renormalizations;
    }
    ++stats_.steps;
}

namespace {

void check_inputs(const ModelParams& p, const DensityMatrix& rho0, const IntegratorSettings& s) {
    p.validate();
    if (rho0.layout() != SubsystemLayout::standard())
        throw std::invalid_argument("integrate: initial state must use the M1,M2,C,B layout");
    if (s.dt * p.omega_m2 > s.max_dt_omega * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "integrate: dt * omega_m2 = " << s.dt * p.omega_m2 << " exceeds the stability guard "
           << s.max_dt_omega;
        throw std::invalid_argument(os.str());
    }
}

class Recorder {
public:
    Recorder(const IntegratorSettings& s) : settings_(s) {
        traj_.dt = s.dt;
        traj_.stride = s.stride;
    }

    void offer(std::size_t step, const ComplexMatrix& rho) {
        if (step % settings_.stride != 0) return;
        if (settings_.check_positivity) {
            const double lo = hermitian_eigenvalues(rho).front();
            min_eig_ = std::min(min_eig_, lo);
            if (lo < -settings_.abort_negativity) {
                std::ostringstream os;
                os << "integration failure: negative eigenvalue " << lo << " at t = " << step * settings_.dt;
                throw IntegrationError(os.str(), step, step * settings_.dt);
            }
        }
        traj_.times.push_back(static_cast<double>(step) * settings_.dt);
        if (settings_.store_states)
            traj_.states.push_back(DensityMatrix::unchecked(rho, SubsystemLayout::standard()));
    }

    Trajectory finish(const HygieneStats& stats) {
        traj_.stats = stats;
        traj_.stats.min_eigenvalue = settings_.check_positivity ? min_eig_ : traj_.stats.min_eigenvalue;
        return std::move(traj_);
    }

private:
    const IntegratorSettings& settings_;
    Trajectory traj_;
    double min_eig_ = 1.0;
};

}  // namespace

Trajectory integrate(const ModelParams& p, const DensityMatrix& rho0, const IntegratorSettings& settings,
                     const StepSink& sink) {
    check_inputs(p, rho0, settings);
    const std::size_t n = settings.steps();
    const LindbladGenerator gen(p);
    Rk4Stepper stepper(gen, rho0.matrix(), settings.dt, settings.abort_trace_drift);
    Recorder rec(settings);

    rec.offer(0, stepper.state());
    if (sink) sink(0, 0.0, stepper.state());
    for (std::size_t i = 1; i <= n; ++i) {
        stepper.step();
        rec.offer(i, stepper.state());
        if (sink) sink(i, stepper.time(), stepper.state());
    }
    return rec.finish(stepper.stats());
}

std::pair<Trajectory, Trajectory> integrate_pair(const ModelParams& p, const DensityMatrix& alpha0,
                                                 const DensityMatrix& beta0, const IntegratorSettings& settings,
                                                 const PairStepSink& sink) {
    check_inputs(p, alpha0, settings);
    check_inputs(p, beta0, settings);
    const std::size_t n = settings.steps();
    const LindbladGenerator gen(p);
    Rk4Stepper a(gen, alpha0.matrix(), settings.dt, settings.abort_trace_drift);
    Rk4Stepper b(gen, beta0.matrix(), settings.dt, settings.abort_trace_drift);
    Recorder ra(settings), rb(settings);

    ra.offer(0, a.state());
    rb.offer(0, b.state());
    if (sink) sink(0, 0.0, a.state(), b.state());
    for (std::size_t i = 1; i <= n; ++i) {
        a.step();
        b.step();
        ra.offer(i, a.state());
        rb.offer(i, b.state());
        if (sink) sink(i, a.time(), a.state(), b.state());
    }
    return {ra.finish(a.stats()), rb.finish(b.stats())};
}

}  // namespace qbattery
