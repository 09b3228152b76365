#include <doctest.h>

#include <numbers>

#include "qbattery/observables.hpp"
#include "support.hpp"

using namespace qbattery;
using namespace testsupport;

namespace {

const auto kLayout = SubsystemLayout::standard();
const SubsystemLayout kQubit({"q"}, {2});

IntegratorSettings settings(double t_max, std::size_t stride = 10) {
    IntegratorSettings s;
    s.t_max = t_max;
    s.stride = stride;
    return s;
}

double binary_entropy(double p) { return -(p * std::log2(p) + (1 - p) * std::log2(1 - p)); }

/// Tr(ρ log ρ) - Tr(ρ log ρ̃) for a qubit, each log taken through the closed-form 2x2 spectrum.
double direct_coherence(const ComplexMatrix& rho) {
    const auto l = eig2(rho);
    double tr_rho_log_rho = 0;
    for (double x : l)
        if (x > 1e-14) tr_rho_log_rho += x * std::log2(x);
    double tr_rho_log_deph = 0;
    for (int i = 0; i < 2; ++i) {
        const double d = rho(i, i).real();
        if (d > 1e-14) tr_rho_log_deph += d * std::log2(d);
    }
    return tr_rho_log_rho - tr_rho_log_deph;
}

ComplexMatrix random_qubit_state() { return random_density(2); }

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("von Neumann entropy examples") {
    CHECK(von_neumann_entropy(ComplexMatrix{0, 0, 0, 1}) == 0.0);
    CHECK(von_neumann_entropy(ComplexMatrix{0.5, 0, 0, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(von_neumann_entropy(ComplexMatrix{0.5, 0, 0, 0.5}, LogBase::E) == doctest::Approx(std::log(2.0)));

    const double p_e = std::exp(-2.0 / 3.0) / (1 + std::exp(-2.0 / 3.0));
    const double s = von_neumann_entropy(thermal_qubit_state(1.0 / 3.0, 2.0));
    CHECK(s == doctest::Approx(binary_entropy(p_e)).epsilon(1e-14));
    CHECK(s == doctest::Approx(0.924093).epsilon(1e-6));
}

TEST_CASE("entropy bounds and oracle agreement on random states") {
    for (std::size_t dim : {2u, 4u, 16u})
        for (int trial = 0; trial < 20; ++trial) {
            const auto rho = random_density(dim);
            const double s = von_neumann_entropy(rho);
            CHECK(s >= -1e-10);
            CHECK(s <= std::log2(static_cast<double>(dim)) + 1e-12);
            CHECK(std::abs(s - oracle_entropy_bits(rho)) <= 1e-10);
        }
}

TEST_CASE("mutual information") {
    const auto product = tensor(tensor(DensityMatrix(random_density(4), SubsystemLayout({"M1", "M2"}, {2, 2})),
                                       DensityMatrix(random_density(2), SubsystemLayout({"C"}, {2}))),
                                DensityMatrix(random_density(2), SubsystemLayout({"B"}, {2})));
    CHECK(std::abs(mutual_information_cb(product)) <= 1e-10);
    CHECK(std::abs(mutual_information_m12cb(product)) <= 1e-10);

    // M12 in a random state, CB in a Bell state
    const double s = 1 / std::numbers::sqrt2;
    const cplx phi[] = {s, 0, 0, s};
    const auto bell = DensityMatrix::pure(phi, SubsystemLayout({"C", "B"}, {2, 2}));
    const auto with_bell = tensor(DensityMatrix(random_density(4), SubsystemLayout({"M1", "M2"}, {2, 2})), bell);
    CHECK(mutual_information_cb(with_bell) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mutual_information_cb(with_bell, LogBase::E) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));

    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_state16();
        const auto& m = rho.matrix();
        const double s_m12 = oracle_entropy_bits(naive_partial_trace(m, {true, true, false, false}));
        const double s_c = oracle_entropy_bits(naive_partial_trace(m, {false, false, true, false}));
        const double s_b = oracle_entropy_bits(naive_partial_trace(m, {false, false, false, true}));
        const double s_cb = oracle_entropy_bits(naive_partial_trace(m, {false, false, true, true}));
        const double s_all = oracle_entropy_bits(m);
        CHECK(std::abs(mutual_information_m12cb(rho) - (s_m12 + s_c + s_b - s_all)) <= 1e-9);
        CHECK(std::abs(mutual_information_cb(rho) - (s_c + s_b - s_cb)) <= 1e-9);
        CHECK(mutual_information_m12cb(rho) >= mutual_information_cb(rho) - 1e-9);
    }

    const DensityMatrix small(random_density(4), SubsystemLayout({"C", "B"}, {2, 2}));
    CHECK_THROWS_AS(mutual_information_cb(small), std::invalid_argument);
}

TEST_CASE("relative entropy of coherence") {
    CHECK(relative_entropy_of_coherence(ComplexMatrix{0.3, 0, 0, 0.7}) == 0.0);
    CHECK(relative_entropy_of_coherence(ComplexMatrix{0.5, 0.5, 0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-10));

    for (int trial = 0; trial < 50; ++trial) {
        const auto rho = random_qubit_state();
        const double c = relative_entropy_of_coherence(rho);
        CHECK(std::abs(c - direct_coherence(rho)) <= 1e-12);
        CHECK(c >= -1e-12);
        CHECK(c <= 1.0 + 1e-12);

        const double theta = uniform(0, 2 * std::numbers::pi);
        const ComplexMatrix u{1, 0, 0, std::polar(1.0, theta)};
        CHECK(std::abs(relative_entropy_of_coherence(u * rho * u.adjoint()) - c) <= 1e-12);
    }
}

TEST_CASE("passive state") {
    const auto h = local_hamiltonian(8.0);
    const ComplexMatrix passive{0.8, 0, 0, 0.2};
    CHECK(max_abs_diff(passive_state(passive, h), passive) <= 1e-15);
    CHECK(max_abs_diff(passive_state(ComplexMatrix{0, 0, 0, 1}, h), ComplexMatrix{1, 0, 0, 0}) <= 1e-15);

    const auto rho = random_qubit_state();
    const auto p = passive_state(rho, h);
    const auto lr = eig2(rho), lp = eig2(p);
    CHECK(std::abs(lr[0] - lp[0]) <= 1e-14);
    CHECK(std::abs(lr[1] - lp[1]) <= 1e-14);
    CHECK(std::abs(p(0, 1)) <= 1e-15);
    CHECK(p(0, 0).real() >= p(1, 1).real());
}

TEST_CASE("passive state beats sampled unitaries") {
    const auto h = local_hamiltonian(8.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_qubit_state();
        const double floor = trace_of_product(h, passive_state(rho, h)).real();
        double best = std::numeric_limits<double>::infinity();
        for (int n = 0; n < 1000; ++n) {
            const auto u = euler_unitary(uniform(0, 2 * std::numbers::pi), uniform(0, std::numbers::pi),
                                         uniform(0, 2 * std::numbers::pi));
            best = std::min(best, trace_of_product(h, u * rho * u.adjoint()).real());
        }
        CHECK(floor <= best + 1e-6);
        CHECK(best - floor <= 0.05);  // sampling gets close, so the bound is not vacuous
    }
}

TEST_CASE("ergotropy") {
    const double w = 8.0;
    const auto h = local_hamiltonian(w);
    CHECK(ergotropy(ComplexMatrix{1, 0, 0, 0}, h) == 0.0);
    CHECK(ergotropy(ComplexMatrix{0, 0, 0, 1}, h) == doctest::Approx(w).epsilon(1e-15));
    CHECK(ergotropy(ComplexMatrix{0.7, 0, 0, 0.3}, h) == 0.0);
    CHECK(ergotropy(ComplexMatrix{0.5, 0.5, 0.5, 0.5}, h) == doctest::Approx(w / 2).epsilon(1e-14));
    for (int trial = 0; trial < 50; ++trial) {
        const auto rho = random_qubit_state();
        const double e = ergotropy(rho, h);
        CHECK(e >= 0.0);
        CHECK(e <= trace_of_product(h, rho).real() + 1e-12);
    }
}

TEST_CASE("energies on the closed Rabi exchange") {
    ModelParams p;
    p.g = 0.0;
    p.gamma1 = p.gamma2 = 0.0;
    const auto traj = integrate(p, initial_product_state(p, ChargerPreparation::Excited, BatteryPreparation::Ground), settings(10.0));
    const auto e_b = internal_energy(traj, p, "B");
    const auto e_c = internal_energy(traj, p, "C");
    const auto power = charging_power(e_b);
    CHECK(e_b.values.front() == 0.0);
    CHECK(power.values.front() == 0.0);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double s2 = std::sin(p.k * t) * std::sin(p.k * t);
        CHECK(std::abs(e_b.values[i] - s2) <= 1e-6);
        CHECK(std::abs(e_c.values[i] + s2) <= 1e-6);
        if (t > 0) CHECK(std::abs(power.values[i] - s2 / t) <= 1e-6 / t);
    }
    CHECK_THROWS_AS(internal_energy(traj, p, "M1"), std::invalid_argument);
}

TEST_CASE("charging power algebra") {
    TimeSeries zero{"dE_B", {0, 1, 2, 3}, {0, 0, 0, 0}, "1"};
    for (double v : charging_power(zero).values) CHECK(v == 0.0);

    TimeSeries plateau{"dE_B", {0, 1, 2, 4, 8}, {0, 0.5, 0.5, 0.5, 0.5}, "1"};
    const auto p = charging_power(plateau);
    CHECK(p.values[1] == 0.5);
    CHECK(p.values[2] == 0.25);
    CHECK(p.values[4] == 0.0625);
}

TEST_CASE("machine energy") {
    ModelParams p;
    p.g = 0.0;
    const auto flat = integrate(p, initial_product_state(p, ChargerPreparation::Excited, BatteryPreparation::Ground), settings(10.0));
    for (double v : machine_energy(flat, p).values) CHECK(std::abs(v) <= 1e-8);

    ModelParams q;
    const auto traj = integrate(q, initial_product_state(q, ChargerPreparation::Excited, BatteryPreparation::Ground), settings(10.0, 100));
    const auto series = machine_energy(traj, q);
    CHECK(series.values.front() == 0.0);
    const ComplexMatrix n1 = embed(qubit::projector(1), "M1", kLayout);
    const ComplexMatrix n2 = embed(qubit::projector(1), "M2", kLayout);
    const auto& rho0 = traj.states.front().matrix();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& rho = traj.states[i].matrix();
        // (ω_M1 ΔP1)/ω_M1 + (ω_M2 ΔP2)/ω_M2
        const double expected = (trace_of_product(n1, rho) - trace_of_product(n1, rho0)).real() +
                                (trace_of_product(n2, rho) - trace_of_product(n2, rho0)).real();
        CHECK(std::abs(series.values[i] - expected) <= 1e-12);
    }
}

TEST_CASE("finite differences and backflow") {
    std::vector<double> quad;
    for (int i = 0; i < 11; ++i) quad.push_back(0.5 * i * i * 0.01);  // t²/2 at h = 0.1
    const auto d = finite_difference(quad, 0.1);
    for (int i = 1; i < 10; ++i) CHECK(d[i] == doctest::Approx(0.1 * i).epsilon(1e-12));
    CHECK(d[0] == doctest::Approx(0.05));
    CHECK_THROWS_AS(finite_difference(std::vector<double>{1.0}, 0.1), std::invalid_argument);

    const TimeSeries sigma{"sigma", {0, 1, 2, 3}, {1, -1, -1, 1}, "1/time"};
    CHECK(backflow_integral(sigma) == doctest::Approx(0.5 + 1.0 + 0.5));
}

TEST_CASE("trace-distance derivative limits") {
    ModelParams p;
    const auto rho0 = initial_product_state(p, ChargerPreparation::Excited, BatteryPreparation::Ground);
    const auto [a, b] = integrate_pair(p, rho0, rho0, settings(2.0, 1));
    for (const std::vector<std::string>& keep : {std::vector<std::string>{"B"}, {"C"}, {"M1", "M2"}})
        for (double v : sigma_n(a, b, keep).values) CHECK(v == 0.0);

    ModelParams iso;
    iso.k = 0.0;
    const auto pair = make_sigma_pair(iso, ChargerPreparation::Excited);
    const std::vector<std::string> keep{"B"};
    TraceDistanceRecorder rec("B", keep, 1e-3);
    integrate_pair(iso, pair.alpha0, pair.beta0, settings(5.0),
                   [&](std::size_t, double t, const ComplexMatrix& x, const ComplexMatrix& y) { rec.record(t, x, y); });
    for (double d : rec.distance().values) CHECK(std::abs(d - 1.0) <= 1e-12);
    for (double s : rec.sigma().values) CHECK(std::abs(s) <= 1e-9);
}

TEST_CASE("trace-distance derivative on the closed two-qubit exchange") {
    // Branch α: |1_C 0_B> Rabi-oscillates; branch β: |1_C 1_B> is frozen.
    // D_B = cos²(kt), D_C = sin²(kt).
    ModelParams p;
    p.g = 0.0;
    p.gamma1 = p.gamma2 = 0.0;
    const auto pair = make_sigma_pair(p, ChargerPreparation::Excited);
    const double dt = 1e-3;
    const std::vector<std::string> keep_b{"B"}, keep_c{"C"};
    TraceDistanceRecorder rb("B", keep_b, dt), rc("C", keep_c, dt);
    integrate_pair(p, pair.alpha0, pair.beta0, settings(10.0),
                   [&](std::size_t, double t, const ComplexMatrix& x, const ComplexMatrix& y) {
                       rb.record(t, x, y);
                       rc.record(t, x, y);
                   });
    const auto sb = rb.sigma(), sc = rc.sigma();
    const auto db = rb.distance();
    const double k = p.k;
    for (std::size_t i = 1; i + 1 < sb.t.size(); ++i) {
        const double t = sb.t[i];
        CHECK(std::abs(db.values[i] - std::cos(k * t) * std::cos(k * t)) <= 1e-9);
        // central-difference truncation: (dt²/6)|D'''| with |D'''| ≤ 4k³
        CHECK(std::abs(sb.values[i] + k * std::sin(2 * k * t)) <= dt * dt * 4 * k * k * k / 6 + 1e-6);
        CHECK(std::abs(sc.values[i] - k * std::sin(2 * k * t)) <= dt * dt * 4 * k * k * k / 6 + 1e-6);
    }
    // one-sided endpoint is first order
    CHECK(std::abs(sb.values.front()) <= dt * 2 * k * k);
}

TEST_CASE("stored-trajectory sigma agrees with the streaming recorder") {
    ModelParams p;
    p.f = 0.8;
    const auto pair = make_sigma_pair(p, ChargerPreparation::Excited);
    const std::vector<std::string> keep{"M1", "M2"};
    TraceDistanceRecorder rec("M12", keep, 1e-3);
    const auto [a, b] = integrate_pair(p, pair.alpha0, pair.beta0, settings(1.0, 1),
                                       [&](std::size_t, double t, const ComplexMatrix& x, const ComplexMatrix& y) { rec.record(t, x, y); });
    const auto stored = sigma_n(a, b, keep), streamed = rec.sigma();
    REQUIRE(stored.values.size() == streamed.values.size());
    for (std::size_t i = 0; i < stored.values.size(); ++i) CHECK(stored.values[i] == streamed.values[i]);
}

TEST_CASE("information flows out of the battery into charger or machine") {
    // Wherever the battery regains distinguishability (σ_B < 0), the charger or
    // the machine must be losing it.
    ModelParams p;
    const auto pair = make_sigma_pair(p, ChargerPreparation::Excited);
    const double dt = 1e-3;
    const std::vector<std::string> kb{"B"}, kc{"C"}, km{"M1", "M2"};
    TraceDistanceRecorder rb("B", kb, dt), rc("C", kc, dt), rm("M12", km, dt);
    auto s = settings(100.0);
    s.store_states = false;
    integrate_pair(p, pair.alpha0, pair.beta0, s, [&](std::size_t, double t, const ComplexMatrix& x, const ComplexMatrix& y) {
        rb.record(t, x, y);
        rc.record(t, x, y);
        rm.record(t, x, y);
    });
    const auto sb = rb.sigma().values, sc = rc.sigma().values, sm = rm.sigma().values;
    std::size_t considered = 0, matched = 0;
    for (std::size_t i = 1; i + 1 < sb.size(); ++i) {
        if (!(sb[i] < 0) || std::abs(sb[i]) <= 1e-4) continue;
        ++considered;
        if (sc[i] > 0 || sm[i] > 0) ++matched;
    }
    REQUIRE(considered > 1000);
    CHECK(static_cast<double>(matched) >= 0.9 * static_cast<double>(considered));
}

TEST_CASE("trajectory series share the stored grid") {
    ModelParams p;
    const auto traj = integrate(p, initial_product_state(p, ChargerPreparation::Plus, BatteryPreparation::Ground), settings(1.0));
    for (const auto& s : {coherence_series(traj, "C"), coherence_series(traj, "B"), ergotropy_series(traj, p),
                          mutual_information_series(traj, false), mutual_information_series(traj, true)}) {
        CHECK(s.t == traj.times);
        CHECK(s.values.size() == traj.times.size());
    }
    CHECK(coherence_series(traj, "C").values.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(coherence_series(traj, "B").values.front() == 0.0);
    CHECK(ergotropy_series(traj, p).values.front() == 0.0);
}

}  // TEST_SUITE
