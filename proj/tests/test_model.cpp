#include <doctest.h>

#include <numbers>

#include "qbattery/model.hpp"
#include "qbattery/observables.hpp"
#include "support.hpp"

using namespace qbattery;
using namespace testsupport;

namespace {

const auto kLayout = SubsystemLayout::standard();

std::size_t basis(int m1, int m2, int c, int b) { return 8 * m1 + 4 * m2 + 2 * c + b; }

ModelParams random_params() {
    ModelParams p;
    p.omega_m1 = uniform(0.5, 4.0);
    p.omega_m2 = p.omega_m1 + uniform(1.0, 10.0);
    p = p.with_resonant_charger();
    p.g = uniform(0.0, 1.0);
    p.k = uniform(0.0, 1.0);
    p.f = uniform(0.0, 1.0);
    p.gamma1 = uniform(0.0, 0.5);
    p.gamma2 = uniform(0.0, 0.5);
    p.t1 = uniform(0.5, 5.0);
    p.t2 = p.t1 + uniform(0.0, 40.0);
    return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("default parameters satisfy resonance and ordering") {
    const ModelParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.omega_m12() == 8.0);
    CHECK(p.omega_c == 8.0);
    CHECK(p.omega_b == 8.0);
    CHECK(p.weak_coupling_warnings().empty());
}

TEST_CASE("parameter validation") {
    ModelParams p;
    p.omega_c = 7.5;
    CHECK_THROWS_AS(p.validate(), InvalidParams);

    p = ModelParams{};
    p.t1 = 40;
    CHECK_THROWS_AS(p.validate(), InvalidParams);

    p = ModelParams{};
    p.g = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidParams);

    p = ModelParams{};
    p.k = std::nan("");
    CHECK_THROWS_AS(p.validate(), InvalidParams);

    p = ModelParams{};
    p.omega_m1 = 12;
    CHECK_THROWS_AS(p.with_resonant_charger().validate(), InvalidParams);

    p = ModelParams{};
    p.g = 2.0;
    CHECK_NOTHROW(p.validate());
    REQUIRE(p.weak_coupling_warnings().size() == 1);
    CHECK(p.weak_coupling_warnings()[0].find("g = 2") != std::string::npos);
}

TEST_CASE("free Hamiltonians") {
    const ModelParams p;
    const auto h = build_free_hamiltonians(p);
    const auto local_c = partial_trace(DensityMatrix::unchecked(h.h_c, kLayout), {"C"}).matrix() * cplx(1.0 / 8.0);
    const auto spectrum = hermitian_eigenvalues(local_c);
    CHECK(spectrum[0] == doctest::Approx(0.0));
    CHECK(spectrum[1] == doctest::Approx(8.0));

    CHECK(h.h_m12.trace().real() == doctest::Approx(96.0).epsilon(1e-15));
    CHECK(h.h_c.trace().real() == doctest::Approx(64.0).epsilon(1e-15));
    for (const auto* m : {&h.h_m12, &h.h_c, &h.h_b}) CHECK(m->hermiticity_residual() <= 1e-12);

    CHECK(local_hamiltonian(0.0) == ComplexMatrix(2));
    CHECK(local_hamiltonian(3.0) == (ComplexMatrix{0, 0, 0, 3}));
}

TEST_CASE("interaction Hamiltonians") {
    ModelParams p;
    auto in = build_interactions(p);
    CHECK(in.h_cb.hermiticity_residual() <= 1e-12);
    CHECK(in.h_m12c.hermiticity_residual() <= 1e-12);
    CHECK(std::abs(in.h_cb.trace()) == 0.0);
    CHECK(std::abs(in.h_m12c.trace()) == 0.0);

    // |1 0 1 0> -> g |0 1 0 0>, and nothing else in that column
    const std::size_t from = basis(1, 0, 1, 0), to = basis(0, 1, 0, 0);
    for (std::size_t r = 0; r < 16; ++r) CHECK(in.h_m12c(r, from) == cplx(r == to ? p.g : 0.0));

    // h_cb^2 on span{|1_C 0_B>, |0_C 1_B>} is k^2 I (M1 = M2 = 0 sector)
    const ComplexMatrix sq = in.h_cb * in.h_cb;
    const std::size_t a = basis(0, 0, 1, 0), b = basis(0, 0, 0, 1);
    CHECK(sq(a, a).real() == doctest::Approx(p.k * p.k));
    CHECK(sq(b, b).real() == doctest::Approx(p.k * p.k));
    CHECK(std::abs(sq(a, b)) == 0.0);
    CHECK(in.h_cb(b, a) == cplx(p.k));

    p.g = 0.0;
    CHECK(build_interactions(p).h_m12c == ComplexMatrix(16));
}

TEST_CASE("coherent drive") {
    ModelParams p;
    CHECK(build_drive(p, 1.3) == ComplexMatrix(16));

    p.f = 0.8;
    const ComplexMatrix d0 = build_drive(p, 0.0);
    CHECK(max_abs_diff(d0, embed(qubit::sigma_x(), "C", kLayout) * cplx(0.8)) <= 1e-15);

    const double half_period = std::numbers::pi / p.omega_c;
    CHECK(max_abs_diff(build_drive(p, half_period), d0 * cplx(-1.0)) <= 1e-14);

    for (double t : {0.0, 0.1, 1.7, 42.0}) {
        const ComplexMatrix d = build_drive(p, t);
        CHECK(d.hermiticity_residual() <= 1e-12);
        CHECK(d.frobenius_norm() == doctest::Approx(p.f * std::sqrt(2.0) * std::sqrt(8.0)).epsilon(1e-13));
    }
    CHECK(max_abs_diff(build_system_operators(p).drive(0.3), build_drive(p, 0.3)) == 0.0);
}

TEST_CASE("thermal qubit states") {
    const auto cold = thermal_qubit_state(1e6, 2.0);
    CHECK(max_abs_diff(cold.matrix(), ComplexMatrix{1, 0, 0, 0}) <= 1e-9);

    const auto hot = thermal_qubit_state(1e-12, 2.0);
    CHECK(hot.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));

    // Independent Gibbs evaluation with Z as a direct sum over the two levels.
    const double beta = 1.0 / 3.0, omega = 2.0;
    const double z = std::exp(-beta * 0.0) + std::exp(-beta * omega);
    const double p_e = std::exp(-beta * omega) / z;
    const auto rho = thermal_qubit_state(beta, omega);
    CHECK(rho.matrix()(1, 1).real() == doctest::Approx(p_e).epsilon(1e-14));
    CHECK(p_e == doctest::Approx(0.33924).epsilon(2e-5));
    CHECK(rho.matrix()(0, 0).real() + rho.matrix()(1, 1).real() == 1.0);
    CHECK(rho.matrix()(0, 1) == cplx(0.0));
}

TEST_CASE("Bose occupations") {
    CHECK(bose_occupation(1.0, 50.0) <= 1e-20);
    CHECK(bose_occupation(1.0, 50.0) > 0.0);
    CHECK(bose_occupation(3.0, 2.0) == doctest::Approx(1.0 / (std::exp(2.0 / 3.0) - 1.0)).epsilon(1e-14));
    CHECK(bose_occupation(3.0, 2.0) == doctest::Approx(1.055148).epsilon(1e-6));
    CHECK(bose_occupation(30.0, 10.0) == doctest::Approx(2.52773).epsilon(1e-5));
}

TEST_CASE("jump operators") {
    const ModelParams p;
    const auto jumps = build_jump_operators(p);
    REQUIRE(jumps.size() == 4);
    CHECK(jumps[0].op == embed(qubit::sigma_minus(), "M1", kLayout));
    CHECK(jumps[1].op == embed(qubit::sigma_plus(), "M1", kLayout));
    CHECK(jumps[2].op == embed(qubit::sigma_minus(), "M2", kLayout));
    CHECK(jumps[3].op == embed(qubit::sigma_plus(), "M2", kLayout));
    CHECK(jumps[0].rate == doctest::Approx(0.2 * (1.0 + 1.0 / (std::exp(2.0 / 3.0) - 1.0))).epsilon(1e-14));
    CHECK(jumps[0].rate == doctest::Approx(0.411030).epsilon(1e-6));

    for (int trial = 0; trial < 20; ++trial) {
        ModelParams r = random_params();
        r.gamma1 = uniform(0.01, 0.5);
        r.gamma2 = uniform(0.01, 0.5);
        const auto j = build_jump_operators(r);
        CHECK(j[1].rate / j[0].rate == doctest::Approx(std::exp(-r.omega_m1 / r.t1)).epsilon(1e-12));
        CHECK(j[3].rate / j[2].rate == doctest::Approx(std::exp(-r.omega_m2 / r.t2)).epsilon(1e-12));
        for (const auto& jump : j) CHECK(jump.rate >= 0.0);
    }

    ModelParams closed;
    closed.gamma1 = closed.gamma2 = 0.0;
    for (const auto& jump : build_jump_operators(closed)) CHECK(jump.rate == 0.0);
}

TEST_CASE("virtual temperature and regime") {
    CHECK(virtual_temperature(2, 10, 7, 7) == doctest::Approx(7.0).epsilon(1e-14));

    const ModelParams p;
    CHECK(std::abs(virtual_temperature(p) + 24.0) <= 1e-12);
    CHECK(virtual_temperature(p) / p.omega_m2 == doctest::Approx(-2.4));
    CHECK(classify_regime(p) == MachineRegime::HeatPump);
    CHECK(to_string(MachineRegime::HeatPump) == "heat pump");

    CHECK(virtual_temperature(2, 10, 30, 3) > 0.0);
    CHECK_THROWS_AS(virtual_temperature(2, 10, 3, 15), std::domain_error);

    ModelParams warm = p;
    warm.t2 = 12.0;  // 10/12 - 2/3 > 0 and T_v = 8/(1/6) = 48 > T2
    CHECK(classify_regime(warm) == MachineRegime::Heater);
}

TEST_CASE("conservation commutators") {
    ModelParams p;
    const auto r = verify_conservation_commutators(p, 0.7);
    CHECK(r.machine_charger <= 1e-12);
    CHECK(r.charger_battery <= 1e-12);
    CHECK(r.drive_residual == 0.0);
    CHECK(r.drive_commutator == 0.0);

    for (int trial = 0; trial < 50; ++trial) {
        const ModelParams q = random_params();
        const auto s = verify_conservation_commutators(q, uniform(0.0, 20.0));
        CHECK(s.machine_charger <= 1e-12);
        CHECK(s.charger_battery <= 1e-12);
        CHECK(s.drive_residual <= 1e-12);
    }
}

TEST_CASE("drive commutator closed form") {
    ModelParams p;
    p.f = 0.8;
    const auto ops = build_system_operators(p);
    const double t = 0.9;
    const cplx i(0, 1);
    // Independent assembly of f ω_C (e^{-iωt} σ⁺ - e^{iωt} σ⁻) from embedded operators.
    const ComplexMatrix expected = (embed(qubit::sigma_plus(), "C", kLayout) * std::exp(-i * p.omega_c * t) -
                                    embed(qubit::sigma_minus(), "C", kLayout) * std::exp(i * p.omega_c * t)) *
                                   cplx(p.f * p.omega_c);
    CHECK(max_abs_diff(commutator(ops.h0, build_drive(p, t)), expected) <= 1e-13);
    CHECK(verify_conservation_commutators(p, t).drive_residual <= 1e-13);
}

TEST_CASE("initial product states") {
    const ModelParams p;
    const auto rho = initial_product_state(p, ChargerPreparation::Plus, BatteryPreparation::Ground);
    CHECK(rho.layout() == kLayout);
    const auto c = partial_trace(rho, {"C"}).matrix();
    CHECK(max_abs_diff(c, ComplexMatrix{0.5, 0.5, 0.5, 0.5}) <= 1e-15);
    const auto m1 = partial_trace(rho, {"M1"}).matrix();
    CHECK(max_abs_diff(m1, thermal_qubit_state(1.0 / p.t1, p.omega_m1).matrix()) <= 1e-15);
    CHECK(max_abs_diff(partial_trace(rho, {"B"}).matrix(), ComplexMatrix{1, 0, 0, 0}) <= 1e-15);

    // E_C(0)/ω_C of |+> is 1/2, of |1> is 1
    const auto h = local_hamiltonian(p.omega_c);
    CHECK(trace_of_product(h, charger_state(ChargerPreparation::Plus).matrix()).real() / p.omega_c == 0.5);
    CHECK(trace_of_product(h, charger_state(ChargerPreparation::Excited).matrix()).real() / p.omega_c == 1.0);
}

TEST_CASE("all built operators are Hermitian for random parameters") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto ops = build_system_operators(random_params());
        for (const auto* m : {&ops.h_m12, &ops.h_c, &ops.h_b, &ops.h_cb, &ops.h_m12c, &ops.h0})
            CHECK(m->hermiticity_residual() <= 1e-12);
        CHECK(ops.drive(uniform(0, 10)).hermiticity_residual() <= 1e-12);
    }
}

}  // TEST_SUITE
