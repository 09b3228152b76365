// self_check.cpp: Fast built-in verification suite

#include <chrono>
#include <cmath>
#include <numbers>

#include "qbattery/scenarios.hpp"

namespace qbattery {

namespace {

InvariantCheck within(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), std::abs(value) <= threshold, value, threshold, std::move(detail)};
}

InvariantCheck failed(std::string name, const std::exception& e) {
    return {std::move(name), false, std::nan(""), 0.0, e.what()};
}

template <class Fn>
void guarded(std::vector<InvariantCheck>& out, const std::string& name, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        out.push_back(failed(name, e));
    }
}

IntegratorSettings short_run(double t_max) {
    IntegratorSettings s;
    s.t_max = t_max;
    s.stride = 100;
    s.store_states = false;
    return s;
}

}  // namespace

RunManifest self_check() {
    const auto start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.scenario = "self-check";
    auto& checks = manifest.invariants;
    const ModelParams defaults;

    guarded(checks, "conservation_commutators", [&] {
        ModelParams p = defaults;
        p.f = 0.8;
        const auto r = verify_conservation_commutators(p, 0.37);
        checks.push_back(within("commutator_machine_charger", r.machine_charger, 1e-12));
        checks.push_back(within("commutator_charger_battery", r.charger_battery, 1e-12));
        checks.push_back(within("drive_commutator_closed_form", r.drive_residual, 1e-12));
    });

    guarded(checks, "virtual_temperature", [&] {
        const double tv = virtual_temperature(defaults);
        checks.push_back(within("virtual_temperature_minus_24", tv + 24.0, 1e-12, "T_v = " + format_double(tv)));
        const bool pump = classify_regime(defaults) == MachineRegime::HeatPump;
        checks.push_back({"regime_heat_pump", pump, pump ? 1.0 : 0.0, 1.0, to_string(classify_regime(defaults))});
    });

    guarded(checks, "closed_system_energy", [&] {
        ModelParams p = defaults;
        p.gamma1 = p.gamma2 = 0.0;
        p.f = 0.0;
        const ComplexMatrix h0 = build_system_operators(p).h0;
        const DensityMatrix rho0 = initial_product_state(p, ChargerPreparation::Excited, BatteryPreparation::Ground);
        const double e0 = trace_of_product(h0, rho0.matrix()).real();
        double drift = 0.0;
        integrate(p, rho0, short_run(50.0), [&](std::size_t, double, const ComplexMatrix& rho) {
            drift = std::max(drift, std::abs(trace_of_product(h0, rho).real() - e0));
        });
        checks.push_back(within("closed_system_energy_drift", drift, 1e-7, "gamma = 0, f = 0, t in [0, 50]"));
    });

    guarded(checks, "rabi_oracle", [&] {
        ModelParams p = defaults;
        p.g = 0.0;
        p.f = 0.0;
        p.k = 0.3;
        const DensityMatrix rho0 = initial_product_state(p, ChargerPreparation::Excited, BatteryPreparation::Ground);
        const ComplexMatrix n_b = embed(qubit::projector(1), "B", SubsystemLayout::standard());
        double worst = 0.0;
        integrate(p, rho0, short_run(20.0), [&](std::size_t, double t, const ComplexMatrix& rho) {
            const double s = std::sin(p.k * t);
            worst = std::max(worst, std::abs(trace_of_product(n_b, rho).real() - s * s));
        });
        checks.push_back(within("rabi_battery_energy", worst, 1e-6, "g = 0, k = 0.3: dE_B/omega_B vs sin^2(kt)"));
    });

    guarded(checks, "isolated_battery", [&] {
        ModelParams p = defaults;
        p.k = 0.0;
        p.f = 0.8;
        const auto pair = make_sigma_pair(p, ChargerPreparation::Excited);
        const ComplexMatrix rho_b0 = partial_trace(pair.alpha0, {"B"}).matrix();
        const std::vector<std::string> keep{"B"};
        TraceDistanceRecorder recorder("B", keep, 1e-3);
        double drift = 0.0;
        integrate_pair(p, pair.alpha0, pair.beta0, short_run(20.0),
                       [&](std::size_t, double t, const ComplexMatrix& a, const ComplexMatrix& b) {
                           recorder.record(t, a, b);
                           drift = std::max(drift, max_abs_diff(partial_trace(DensityMatrix::unchecked(a, SubsystemLayout::standard()), keep).matrix(), rho_b0));
                       });
        const auto sigma = recorder.sigma().values;
        double worst_sigma = 0.0;
        for (double v : sigma) worst_sigma = std::max(worst_sigma, std::abs(v));
        checks.push_back(within("isolated_battery_state", drift, 1e-9, "k = 0"));
        checks.push_back(within("isolated_battery_sigma", worst_sigma, 1e-9, "k = 0"));
    });

    guarded(checks, "benchmarks", [&] {
        const ComplexMatrix h = local_hamiltonian(defaults.omega_b);
        const ComplexMatrix ground{1, 0, 0, 0};
        const ComplexMatrix excited{0, 0, 0, 1};
        const ComplexMatrix plus{0.5, 0.5, 0.5, 0.5};
        const ComplexMatrix mixed{0.3, 0, 0, 0.7};
        checks.push_back(within("ergotropy_ground", ergotropy(ground, h), 1e-12));
        checks.push_back(within("ergotropy_excited", ergotropy(excited, h) - defaults.omega_b, 1e-12));
        checks.push_back(within("coherence_plus_one_bit", relative_entropy_of_coherence(plus) - 1.0, 1e-10));
        checks.push_back(within("coherence_diagonal_zero", relative_entropy_of_coherence(mixed), 1e-12));
        const double gibbs_entropy = von_neumann_entropy(thermal_qubit_state(1.0 / defaults.t1, defaults.omega_m1));
        const double p_e = 1.0 / (1.0 + std::exp(defaults.omega_m1 / defaults.t1));
        const double expected = -(p_e * std::log2(p_e) + (1 - p_e) * std::log2(1 - p_e));
        checks.push_back(within("gibbs_entropy", gibbs_entropy - expected, 1e-12));
    });

    manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return manifest;
}

}  // namespace qbattery
