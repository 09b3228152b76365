// model.cpp: Hamiltonians, thermal states and dissipation channels

#include "qbattery/model.hpp"

#include <cmath>
#include <sstream>

namespace qbattery {

namespace {

const SubsystemLayout& layout() { return SubsystemLayout::standard(); }

ComplexMatrix excited_projector(double omega, const std::string& label) {
    return embed(omega * qubit::projector(1), label, layout());
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidParams("ModelParams: " + msg);
}

}  // namespace

void ModelParams::validate() const {
    const double values[] = {omega_m1, omega_m2, omega_c, omega_b, g, k, f, gamma1, gamma2, t1, t2};
    for (double v : values) require(std::isfinite(v), "all parameters except tau must be finite");
    require(omega_m1 > 0 && omega_m2 > 0 && omega_c > 0 && omega_b > 0, "frequencies must be positive");
    require(g >= 0 && k >= 0 && f >= 0, "couplings and drive amplitude must be nonnegative");
    require(gamma1 >= 0 && gamma2 >= 0, "dissipation rates must be nonnegative");
    require(t1 > 0 && t2 > 0, "temperatures must be positive");
    require(tau > 0 && !std::isnan(tau), "tau must be positive (or +inf)");
    require(omega_m1 < omega_m2, "omega_m1 < omega_m2 is required");
    require(t1 <= t2, "t1 <= t2 is required (M1 couples to the colder bath)");

    const double tol = 1e-12 * std::max(1.0, omega_m2);
    if (std::abs(omega_m12() - omega_c) > tol || std::abs(omega_m12() - omega_b) > tol) {
        std::ostringstream os;
        os << "resonance omega_m2 - omega_m1 == omega_c == omega_b violated (" << omega_m12() << ", "
           << omega_c << ", " << omega_b << ")";
        require(false, os.str());
    }
}

std::vector<std::string> ModelParams::weak_coupling_warnings() const {
    std::vector<std::string> out;
    const double limit = 0.1 * omega_m2;
    const std::pair<const char*, double> checks[] = {{"g", g}, {"k", k}, {"gamma1", gamma1}, {"gamma2", gamma2}};
    for (const auto& [name, value] : checks)
        if (value > limit) {
            std::ostringstream os;
            os << name << " = " << value << " exceeds the weak-coupling bound 0.1*omega_m2 = " << limit;
            out.push_back(os.str());
        }
    return out;
}

ModelParams ModelParams::with_resonant_charger() const {
    ModelParams p = *this;
    p.omega_c = p.omega_b = omega_m12();
    return p;
}

FreeHamiltonians build_free_hamiltonians(const ModelParams& p) {
    return {
        excited_projector(p.omega_m1, "M1") + excited_projector(p.omega_m2, "M2"),
        excited_projector(p.omega_c, "C"),
        excited_projector(p.omega_b, "B"),
    };
}

Interactions build_interactions(const ModelParams& p) {
    const auto& L = layout();
    ComplexMatrix h_cb = embed(qubit::sigma_plus(), "C", L) * embed(qubit::sigma_minus(), "B", L);
    h_cb += h_cb.adjoint();
    h_cb *= p.k;

    // |0_M1 1_M2 0_C> = index 2 and |1_M1 0_M2 1_C> = index 5 of the 8-dim M1⊗M2⊗C block.
    ComplexMatrix exchange(8);
    exchange(2, 5) = p.g;
    exchange(5, 2) = p.g;
    return {std::move(h_cb), kron(exchange, ComplexMatrix::identity(2))};
}

ComplexMatrix build_drive(const ModelParams& p, double t) {
    const cplx phase = std::polar(1.0, -p.omega_c * t);
    ComplexMatrix local = p.f * (phase * qubit::sigma_plus() + std::conj(phase) * qubit::sigma_minus());
    return embed(local, "C", layout());
}

std::vector<JumpOperator> build_jump_operators(const ModelParams& p) {
    const auto& L = layout();
    const double n1 = bose_occupation(p.t1, p.omega_m1);
    const double n2 = bose_occupation(p.t2, p.omega_m2);
    std::vector<JumpOperator> jumps;
    jumps.push_back({"sigma-_M1", embed(qubit::sigma_minus(), "M1", L), p.gamma1 * (n1 + 1.0)});
    jumps.push_back({"sigma+_M1", embed(qubit::sigma_plus(), "M1", L), p.gamma1 * n1});
    jumps.push_back({"sigma-_M2", embed(qubit::sigma_minus(), "M2", L), p.gamma2 * (n2 + 1.0)});
    jumps.push_back({"sigma+_M2", embed(qubit::sigma_plus(), "M2", L), p.gamma2 * n2});
    return jumps;
}

ComplexMatrix SystemOperators::drive(double t) const {
    const cplx phase = std::polar(1.0, -omega_c * t);
    return f * (phase * sigma_plus_c + std::conj(phase) * sigma_minus_c);
}

SystemOperators build_system_operators(const ModelParams& p) {
    p.validate();
    auto free = build_free_hamiltonians(p);
    auto inter = build_interactions(p);
    ComplexMatrix h0 = free.h_c + free.h_b + free.h_m12;
    return SystemOperators{
        std::move(free.h_m12),
        std::move(free.h_c),
        std::move(free.h_b),
        std::move(inter.h_cb),
        std::move(inter.h_m12c),
        std::move(h0),
        embed(qubit::sigma_plus(), "C", layout()),
        embed(qubit::sigma_minus(), "C", layout()),
        p.f,
        p.omega_c,
        build_jump_operators(p),
    };
}

DensityMatrix thermal_qubit_state(double beta, double omega, const std::string& label) {
    if (!(beta > 0) || !(omega > 0)) throw std::invalid_argument("thermal_qubit_state: beta and omega must be positive");
    const double boltzmann = std::exp(-beta * omega);
    const double z = 1.0 + boltzmann;
    const double populations[] = {1.0 / z, boltzmann / z};
    return DensityMatrix(ComplexMatrix::diagonal(populations), SubsystemLayout({label}, {2}));
}

double bose_occupation(double temp, double omega) {
    if (!(temp > 0) || !(omega > 0)) throw std::invalid_argument("bose_occupation: temp and omega must be positive");
    return 1.0 / std::expm1(omega / temp);
}

double virtual_temperature(double omega_m1, double omega_m2, double t1, double t2) {
    const double denom = omega_m2 / t2 - omega_m1 / t1;
    if (std::abs(denom) <= 1e-14 * (omega_m2 / t2 + omega_m1 / t1))
        throw std::domain_error("virtual_temperature: omega_m2/T2 == omega_m1/T1 (degenerate machine)");
    return (omega_m2 - omega_m1) / denom;
}

double virtual_temperature(const ModelParams& p) {
    return virtual_temperature(p.omega_m1, p.omega_m2, p.t1, p.t2);
}

MachineRegime classify_regime(const ModelParams& p) {
    const double tv = virtual_temperature(p);
    if (tv < 0) return MachineRegime::HeatPump;
    if (tv < p.t1) return MachineRegime::Refrigerator;
    if (tv <= p.t2) return MachineRegime::Intermediate;
    return MachineRegime::Heater;
}

std::string to_string(MachineRegime regime) {
    switch (regime) {
        case MachineRegime::HeatPump: return "heat pump";
        case MachineRegime::Refrigerator: return "refrigerator";
        case MachineRegime::Intermediate: return "intermediate";
        case MachineRegime::Heater: return "heater";
    }
    return "unknown";
}

ConservationReport verify_conservation_commutators(const ModelParams& p, double t) {
    const auto ops = build_system_operators(p);
    const ComplexMatrix drive = ops.drive(t);
    const ComplexMatrix drive_comm = commutator(ops.h0, drive);
    const cplx phase = std::polar(1.0, -p.omega_c * t);
    const ComplexMatrix closed_form =
        (p.f * p.omega_c) * (phase * ops.sigma_plus_c - std::conj(phase) * ops.sigma_minus_c);

    ConservationReport r;
    r.machine_charger = commutator(ops.h0, ops.h_m12c).max_abs();
    r.charger_battery = commutator(ops.h0, ops.h_cb).max_abs();
    r.drive_commutator = drive_comm.max_abs();
    r.drive_residual = max_abs_diff(drive_comm, closed_form);
    return r;
}

DensityMatrix charger_state(ChargerPreparation prep) {
    const SubsystemLayout l({"C"}, {2});
    switch (prep) {
        case ChargerPreparation::Ground: return DensityMatrix(qubit::projector(0), l);
        case ChargerPreparation::Excited: return DensityMatrix(qubit::projector(1), l);
        case ChargerPreparation::Plus: return DensityMatrix({0.5, 0.5, 0.5, 0.5}, l);
    }
    throw std::invalid_argument("charger_state: unknown preparation");
}

DensityMatrix battery_state(BatteryPreparation prep) {
    const SubsystemLayout l({"B"}, {2});
    return DensityMatrix(qubit::projector(prep == BatteryPreparation::Ground ? 0 : 1), l);
}

DensityMatrix initial_product_state(const ModelParams& p, ChargerPreparation charger, BatteryPreparation battery) {
    p.validate();
    const auto m1 = thermal_qubit_state(1.0 / p.t1, p.omega_m1, "M1");
    const auto m2 = thermal_qubit_state(1.0 / p.t2, p.omega_m2, "M2");
    return tensor(tensor(tensor(m1, m2), charger_state(charger)), battery_state(battery));
}

}  // namespace qbattery
