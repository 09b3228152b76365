// observables.cpp: Diagnostics evaluated on states and trajectories

#include "qbattery/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbattery {

namespace {

const std::vector<std::string> kM12{"M1", "M2"};
const std::vector<std::string> kC{"C"};
const std::vector<std::string> kB{"B"};
const std::vector<std::string> kCB{"C", "B"};

ComplexMatrix reduced(const ComplexMatrix& full, std::span<const std::string> keep) {
    return partial_trace(full, SubsystemLayout::standard(), keep);
}

void require_standard(const DensityMatrix& s, const char* who) {
    if (s.layout() != SubsystemLayout::standard())
        throw std::invalid_argument(std::string(who) + ": state must use the M1,M2,C,B layout");
}

double omega_of(const ModelParams& p, const std::string& subsystem) {
    if (subsystem == "C") return p.omega_c;
    if (subsystem == "B") return p.omega_b;
    if (subsystem == "M1") return p.omega_m1;
    if (subsystem == "M2") return p.omega_m2;
    throw std::invalid_argument("unknown subsystem '" + subsystem + "'");
}

double local_energy(const ComplexMatrix& full, const std::string& subsystem, double omega) {
    const std::string keep[] = {subsystem};
    return omega * reduced(full, keep)(1, 1).real();
}

TimeSeries make_series(const Trajectory& traj, std::string name, std::string units) {
    if (traj.states.size() != traj.times.size())
        throw std::invalid_argument("observable '" + name + "' needs stored states on every grid point");
    TimeSeries s{std::move(name), traj.times, {}, std::move(units)};
    s.values.reserve(traj.states.size());
    return s;
}

}  // namespace

double entropy_from_eigenvalues(std::span<const double> eigenvalues, LogBase base) {
    double s = 0.0;
    for (double lambda : eigenvalues)
        if (lambda > kEntropyClip) s -= lambda * std::log(lambda);
    return base == LogBase::Two ? s / std::log(2.0) : s;
}

double von_neumann_entropy(const ComplexMatrix& rho, LogBase base) {
    const auto eig = hermitian_eigenvalues(rho.hermitian_part());
    return entropy_from_eigenvalues(eig, base);
}

double von_neumann_entropy(const DensityMatrix& rho, LogBase base) { return von_neumann_entropy(rho.matrix(), base); }

double mutual_information_cb(const DensityMatrix& state, LogBase base) {
    require_standard(state, "mutual_information_cb");
    const auto& m = state.matrix();
    return von_neumann_entropy(reduced(m, kC), base) + von_neumann_entropy(reduced(m, kB), base) -
           von_neumann_entropy(reduced(m, kCB), base);
}

double mutual_information_m12cb(const DensityMatrix& state, LogBase base) {
    require_standard(state, "mutual_information_m12cb");
    const auto& m = state.matrix();
    return von_neumann_entropy(reduced(m, kM12), base) + von_neumann_entropy(reduced(m, kC), base) +
           von_neumann_entropy(reduced(m, kB), base) - von_neumann_entropy(m, base);
}

double relative_entropy_of_coherence(const ComplexMatrix& rho, LogBase base) {
    std::vector<double> populations(rho.dim());
    for (std::size_t i = 0; i < rho.dim(); ++i) populations[i] = rho(i, i).real();
    return entropy_from_eigenvalues(populations, base) - von_neumann_entropy(rho, base);
}

double relative_entropy_of_coherence(const DensityMatrix& rho, LogBase base) {
    return relative_entropy_of_coherence(rho.matrix(), base);
}

ComplexMatrix passive_state(const ComplexMatrix& rho, const ComplexMatrix& h) {
    if (rho.dim() != h.dim()) throw std::invalid_argument("passive_state: dimension mismatch");
    auto populations = hermitian_eigenvalues(rho.hermitian_part());
    std::reverse(populations.begin(), populations.end());
    const auto levels = hermitian_eig(h);

    const std::size_t n = rho.dim();
    ComplexMatrix out(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                out(r, c) += populations[j] * levels.eigenvectors(r, j) * std::conj(levels.eigenvectors(c, j));
    return out;
}

double ergotropy(const ComplexMatrix& rho, const ComplexMatrix& h) {
    const double energy = trace_of_product(h, rho).real();
    const double passive = trace_of_product(h, passive_state(rho, h)).real();
    return std::max(0.0, energy - passive);
}

ComplexMatrix local_hamiltonian(double omega) { return omega * qubit::projector(1); }

TimeSeries internal_energy(const Trajectory& traj, const ModelParams& p, const std::string& subsystem) {
    if (subsystem != "C" && subsystem != "B")
        throw std::invalid_argument("internal_energy: subsystem must be C or B");
    TimeSeries s = make_series(traj, "dE_" + subsystem, "omega_" + subsystem);
    const double omega = omega_of(p, subsystem);
    if (traj.states.empty()) return s;
    const double e0 = local_energy(traj.states.front().matrix(), subsystem, omega);
    for (const auto& st : traj.states) s.values.push_back((local_energy(st.matrix(), subsystem, omega) - e0) / omega);
    return s;
}

TimeSeries machine_energy(const Trajectory& traj, const ModelParams& p) {
    TimeSeries s = make_series(traj, "dE_M12", "1");
    if (traj.states.empty()) return s;
    const auto& first = traj.states.front().matrix();
    const double e1 = local_energy(first, "M1", p.omega_m1);
    const double e2 = local_energy(first, "M2", p.omega_m2);
    for (const auto& st : traj.states) {
        const auto& m = st.matrix();
        s.values.push_back((local_energy(m, "M1", p.omega_m1) - e1) / p.omega_m1 +
                           (local_energy(m, "M2", p.omega_m2) - e2) / p.omega_m2);
    }
    return s;
}

TimeSeries charging_power(const TimeSeries& delta_e_b) {
    if (delta_e_b.t.empty() || delta_e_b.t.front() != 0.0)
        throw std::invalid_argument("charging_power: series must start at t = 0");
    TimeSeries s{"P_B", delta_e_b.t, std::vector<double>(delta_e_b.t.size(), 0.0), delta_e_b.units + "/time"};
    for (std::size_t i = 1; i < s.t.size(); ++i) s.values[i] = delta_e_b.values[i] / s.t[i];
    return s;
}

TimeSeries coherence_series(const Trajectory& traj, const std::string& subsystem, LogBase base) {
    TimeSeries s = make_series(traj, "C_" + subsystem, base == LogBase::Two ? "bit" : "nat");
    const std::string keep[] = {subsystem};
    for (const auto& st : traj.states) s.values.push_back(relative_entropy_of_coherence(reduced(st.matrix(), keep), base));
    return s;
}

TimeSeries ergotropy_series(const Trajectory& traj, const ModelParams& p) {
    TimeSeries s = make_series(traj, "ergotropy_B", "omega_B");
    const ComplexMatrix h = local_hamiltonian(p.omega_b);
    for (const auto& st : traj.states) s.values.push_back(ergotropy(reduced(st.matrix(), kB), h) / p.omega_b);
    return s;
}

TimeSeries mutual_information_series(const Trajectory& traj, bool tripartite, LogBase base) {
    TimeSeries s = make_series(traj, tripartite ? "I_M12CB" : "I_CB", base == LogBase::Two ? "bit" : "nat");
    for (const auto& st : traj.states)
        s.values.push_back(tripartite ? mutual_information_m12cb(st, base) : mutual_information_cb(st, base));
    return s;
}

SigmaPair make_sigma_pair(const ModelParams& p, ChargerPreparation charger) {
    return {initial_product_state(p, charger, BatteryPreparation::Ground),
            initial_product_state(p, charger, BatteryPreparation::Excited)};
}

double reduced_trace_distance(const ComplexMatrix& a, const ComplexMatrix& b, std::span<const std::string> keep) {
    return 0.5 * trace_norm((reduced(a, keep) - reduced(b, keep)).hermitian_part());
}

std::vector<double> finite_difference(std::span<const double> values, double h) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("finite_difference: need at least two points");
    std::vector<double> d(n);
    d.front() = (values[1] - values[0]) / h;
    d.back() = (values[n - 1] - values[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    return d;
}

TimeSeries sigma_n(const Trajectory& alpha, const Trajectory& beta, std::span<const std::string> keep) {
    if (alpha.times != beta.times || alpha.states.size() != beta.states.size())
        throw std::invalid_argument("sigma_n: trajectory grids do not match");
    if (alpha.states.size() != alpha.times.size())
        throw std::invalid_argument("sigma_n: trajectories need stored states on every grid point");
    std::string name = "sigma_";
    for (const auto& k : keep) name += k;
    TimeSeries s{name, alpha.times, {}, "1/time"};
    std::vector<double> d;
    d.reserve(alpha.states.size());
    for (std::size_t i = 0; i < alpha.states.size(); ++i)
        d.push_back(reduced_trace_distance(alpha.states[i].matrix(), beta.states[i].matrix(), keep));
    s.values = finite_difference(d, alpha.dt * static_cast<double>(alpha.stride));
    return s;
}

TraceDistanceRecorder::TraceDistanceRecorder(std::string name, std::vector<std::string> keep, double dt)
    : name_(std::move(name)), keep_(std::move(keep)), dt_(dt) {}

void TraceDistanceRecorder::record(double t, const ComplexMatrix& alpha, const ComplexMatrix& beta) {
    t_.push_back(t);
    d_.push_back(reduced_trace_distance(alpha, beta, keep_));
}

TimeSeries TraceDistanceRecorder::distance() const { return {"D_" + name_, t_, d_, "1"}; }

TimeSeries TraceDistanceRecorder::sigma() const { return {"sigma_" + name_, t_, finite_difference(d_, dt_), "1/time"}; }

double backflow_integral(const TimeSeries& sigma) {
    double total = 0.0;
    for (std::size_t i = 1; i < sigma.t.size(); ++i) {
        const double a = std::max(-sigma.values[i - 1], 0.0);
        const double b = std::max(-sigma.values[i], 0.0);
        total += 0.5 * (a + b) * (sigma.t[i] - sigma.t[i - 1]);
    }
    return total;
}

}  // namespace qbattery
