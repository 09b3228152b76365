// model.hpp: Physical parameters, Hamiltonians, thermal states and jump operators
//
// Composite space M1 ⊗ M2 ⊗ C ⊗ B (all qubits, |0> ground). The two machine
// qubits M1, M2 each see a local thermal bath; the charger C is coupled to the
// machine's |0_M1 1_M2> <-> |1_M1 0_M2> transition and to the battery B, and
// may be resonantly driven.

#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbattery/linalg.hpp"
#include "qbattery/state.hpp"

namespace qbattery {

class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// All model constants, ħ = k_B = 1. Defaults are the reference parameter set
/// with energy scale omega_m2 = 10.
struct ModelParams {
    double omega_m1 = 2.0;
    double omega_m2 = 10.0;
    double omega_c = 8.0;
    double omega_b = 8.0;
    double g = 0.3;        // machine-charger coupling
    double k = 0.3;        // charger-battery coupling
    double f = 0.0;        // drive amplitude
    double gamma1 = 0.2;
    double gamma2 = 0.2;
    double t1 = 3.0;       // cold bath (M1)
    double t2 = 30.0;      // hot bath (M2)
    double tau = std::numeric_limits<double>::infinity();  // interaction window [0, tau]

    /// omega_m2 - omega_m1, the machine's mediating gap.
    double omega_m12() const noexcept { return omega_m2 - omega_m1; }

    /// Throws InvalidParams on positivity, ordering or resonance violations.
    void validate() const;

    /// Non-fatal notes for couplings and rates above 0.1 * omega_m2.
    std::vector<std::string> weak_coupling_warnings() const;

    /// Copy with omega_c = omega_b = omega_m2 - omega_m1.
    ModelParams with_resonant_charger() const;
};

struct FreeHamiltonians {
    ComplexMatrix h_m12;
    ComplexMatrix h_c;
    ComplexMatrix h_b;
};

struct Interactions {
    ComplexMatrix h_cb;
    ComplexMatrix h_m12c;
};

struct JumpOperator {
    std::string label;
    ComplexMatrix op;
    double rate;
};

/// Every operator entering the master equation, embedded in 16 dimensions.
struct SystemOperators {
    ComplexMatrix h_m12;
    ComplexMatrix h_c;
    ComplexMatrix h_b;
    ComplexMatrix h_cb;
    ComplexMatrix h_m12c;
    ComplexMatrix h0;  // h_c + h_b + h_m12
    ComplexMatrix sigma_plus_c;
    ComplexMatrix sigma_minus_c;
    double f;
    double omega_c;
    std::vector<JumpOperator> jumps;

    ComplexMatrix drive(double t) const;
};

/// ω σ⁺σ⁻ = ω|1><1| on each qubit; h_m12 = H_M1 + H_M2.
FreeHamiltonians build_free_hamiltonians(const ModelParams& p);

/// h_cb = k(σ⁺_C σ⁻_B + h.c.), h_m12c = g(|0 1 0><1 0 1| + h.c.) ⊗ I_B.
Interactions build_interactions(const ModelParams& p);

/// f(e^{-iω_C t} σ⁺_C + e^{+iω_C t} σ⁻_C)
ComplexMatrix build_drive(const ModelParams& p, double t);

std::vector<JumpOperator> build_jump_operators(const ModelParams& p);

SystemOperators build_system_operators(const ModelParams& p);

/// Gibbs state e^{-βH}/Z of a qubit with H = ω|1><1|.
DensityMatrix thermal_qubit_state(double beta, double omega, const std::string& label = "q");

/// 1/(e^{ω/T} - 1)
double bose_occupation(double temp, double omega);

/// T_v = ω_M12 / (ω_M2/T2 - ω_M1/T1). Throws std::domain_error when the
/// denominator vanishes.
double virtual_temperature(double omega_m1, double omega_m2, double t1, double t2);
double virtual_temperature(const ModelParams& p);

enum class MachineRegime {
    HeatPump,      // T_v < 0: population inversion on the mediating transition
    Refrigerator,  // 0 < T_v < T1
    Intermediate,  // T1 <= T_v <= T2
    Heater,        // T_v > T2
};

MachineRegime classify_regime(const ModelParams& p);
std::string to_string(MachineRegime regime);

/// Residual norms of the conservation commutators. `drive_residual` compares
/// [H0, ΔH_F(t)] against its closed form f ω_C (e^{-iω_C t} σ⁺_C - e^{iω_C t} σ⁻_C).
struct ConservationReport {
    double machine_charger = 0.0;   // ‖[H0, H_M12-C]‖_max
    double charger_battery = 0.0;   // ‖[H0, H_C-B]‖_max
    double drive_residual = 0.0;
    double drive_commutator = 0.0;  // ‖[H0, ΔH_F(t)]‖_max
};

ConservationReport verify_conservation_commutators(const ModelParams& p, double t);

enum class ChargerPreparation { Ground, Excited, Plus };
enum class BatteryPreparation { Ground, Excited };

DensityMatrix charger_state(ChargerPreparation prep);
DensityMatrix battery_state(BatteryPreparation prep);

/// Gibbs(M1) ⊗ Gibbs(M2) ⊗ ρ_C ⊗ ρ_B in the standard layout.
DensityMatrix initial_product_state(const ModelParams& p, ChargerPreparation charger,
                                    BatteryPreparation battery);

}  // namespace qbattery
