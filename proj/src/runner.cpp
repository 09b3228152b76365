// runner.cpp: Job expansion, parallel execution, CSV and manifest emission

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "qbattery/scenarios.hpp"

namespace qbattery {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

ChargerPreparation charger_for(InitialState s) {
    return s == InitialState::ExcitedChargerEmptyBattery ? ChargerPreparation::Excited : ChargerPreparation::Plus;
}

struct SigmaTarget {
    const char* observable;
    std::vector<std::string> keep;
};

const std::vector<SigmaTarget>& sigma_targets() {
    static const std::vector<SigmaTarget> targets{
        {"sigma_B", {"B"}}, {"sigma_C", {"C"}}, {"sigma_M12", {"M1", "M2"}}};
    return targets;
}

bool wants(const ScenarioConfig& cfg, const std::string& name) {
    return std::find(cfg.observables.begin(), cfg.observables.end(), name) != cfg.observables.end();
}

struct JobSpec {
    double f;
    std::optional<double> sweep_value;
};

std::vector<JobSpec> expand_jobs(const ScenarioConfig& cfg) {
    std::vector<JobSpec> jobs;
    for (double f : cfg.effective_drive_variants()) {
        if (!cfg.sweep) {
            jobs.push_back({f, std::nullopt});
            continue;
        }
        for (double v : cfg.sweep->values) jobs.push_back({f, v});
    }
    return jobs;
}

ModelParams job_params(const ScenarioConfig& cfg, const JobSpec& job) {
    ModelParams p = cfg.params;
    p.f = job.f;
    if (cfg.sweep && job.sweep_value) {
        switch (cfg.sweep->parameter) {
            case SweepParameter::G: p.g = *job.sweep_value; break;
            case SweepParameter::K: p.k = *job.sweep_value; break;
            case SweepParameter::F: p.f = *job.sweep_value; break;
        }
    }
    return p;
}

std::string describe(const ScenarioConfig& cfg, const JobSpec& job) {
    std::string s = "f=" + format_double(job.f);
    if (cfg.sweep && job.sweep_value) s += ", " + to_string(cfg.sweep->parameter) + "=" + format_double(*job.sweep_value);
    return s;
}

/// max over stored states of (ε_B - E_B)/ω_B
double ergotropy_excess(const Trajectory& traj, const ModelParams& p) {
    const ComplexMatrix h = local_hamiltonian(p.omega_b);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& state : traj.states) {
        const ComplexMatrix rho_b = partial_trace(state, {"B"}).matrix();
        const double energy = trace_of_product(h, rho_b).real();
        worst = std::max(worst, (ergotropy(rho_b, h) - energy) / p.omega_b);
    }
    return traj.states.empty() ? 0.0 : worst;
}

JobResult run_job(const ScenarioConfig& cfg, const JobSpec& job) {
    const auto start = Clock::now();
    JobResult result;
    result.f = job.f;
    result.sweep_value = job.sweep_value;
    result.params = job_params(cfg, job);
    const ModelParams& p = result.params;

    IntegratorSettings settings = cfg.integrator_settings();
    settings.store_states = cfg.needs_states();
    const ChargerPreparation charger = charger_for(cfg.initial_state);

    Trajectory traj;
    if (cfg.needs_sigma()) {
        const SigmaPairSpec spec = cfg.sigma_pair.value_or(SigmaPairSpec{});
        std::vector<std::pair<std::string, TraceDistanceRecorder>> recorders;
        for (const auto& target : sigma_targets())
            if (wants(cfg, target.observable))
                recorders.emplace_back(target.observable, TraceDistanceRecorder(target.observable, target.keep, cfg.dt));

        const auto sink = [&](std::size_t, double t, const ComplexMatrix& a, const ComplexMatrix& b) {
            for (auto& [_, rec] : recorders) rec.record(t, a, b);
        };
        auto [alpha, beta] = integrate_pair(p, initial_product_state(p, charger, spec.alpha),
                                            initial_product_state(p, charger, spec.beta), settings, sink);

        for (const auto& [name, rec] : recorders) {
            const TimeSeries dense = rec.sigma();
            std::vector<double> sampled;
            for (std::size_t i = 0; i < dense.values.size(); i += cfg.stride) sampled.push_back(dense.values[i]);
            result.series[name] = std::move(sampled);
        }
        // Every other observable follows the branch with the empty battery.
        traj = spec.alpha == BatteryPreparation::Ground ? std::move(alpha) : std::move(beta);
        traj.stats.merge(spec.alpha == BatteryPreparation::Ground ? beta.stats : alpha.stats);
    } else {
        traj = integrate(p, initial_product_state(p, charger, BatteryPreparation::Ground), settings);
    }

    result.t = traj.times;
    result.stats = traj.stats;

    if (cfg.needs_states()) {
        const auto put = [&](const std::string& name, const TimeSeries& s) {
            if (wants(cfg, name)) result.series[name] = s.values;
        };
        if (wants(cfg, "I_CB")) put("I_CB", mutual_information_series(traj, false, cfg.log_base));
        if (wants(cfg, "I_M12CB")) put("I_M12CB", mutual_information_series(traj, true, cfg.log_base));
        if (wants(cfg, "dE_C")) put("dE_C", internal_energy(traj, p, "C"));
        if (wants(cfg, "dE_B") || wants(cfg, "P_B")) {
            const TimeSeries e_b = internal_energy(traj, p, "B");
            put("dE_B", e_b);
            put("P_B", charging_power(e_b));
        }
        if (wants(cfg, "dE_M12")) put("dE_M12", machine_energy(traj, p));
        if (wants(cfg, "C_C")) put("C_C", coherence_series(traj, "C", cfg.log_base));
        if (wants(cfg, "C_B")) put("C_B", coherence_series(traj, "B", cfg.log_base));
        if (wants(cfg, "ergotropy_B")) put("ergotropy_B", ergotropy_series(traj, p));
        result.ergotropy_excess = ergotropy_excess(traj, p);
    }

    result.wall_time = seconds_since(start);
    return result;
}

std::string units_of(const std::string& observable, LogBase base) {
    const std::string info = base == LogBase::Two ? "bits" : "nats";
    if (observable.rfind("sigma_", 0) == 0) return "1/time";
    if (observable.rfind("I_", 0) == 0 || observable.rfind("C_", 0) == 0) return info;
    if (observable == "P_B") return "1/time";
    return "1";
}

std::string csv_file_name(const std::string& observable, double f) {
    return observable + "_f" + format_double(f) + ".csv";
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json stats_json(const HygieneStats& s) {
    return {{"max_trace_correction", s.max_trace_correction},
            {"max_hermiticity_residual", s.max_hermiticity_residual},
            {"min_eigenvalue", s.min_eigenvalue},
            {"steps", s.steps},
            {"renormalizations", s.renormalizations}};
}

InvariantCheck upper_bound(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

InvariantCheck lower_bound(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value >= threshold, value, threshold, std::move(detail)};
}

}  // namespace

ScenarioData compute_scenario(const ScenarioConfig& cfg, unsigned threads) {
    cfg.validate();
    const auto start = Clock::now();
    const std::vector<JobSpec> specs = expand_jobs(cfg);

    ScenarioData data;
    data.config = cfg;
    data.jobs.resize(specs.size());
    std::vector<std::string> failures(specs.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < specs.size();) {
            try {
                data.jobs[i] = run_job(cfg, specs[i]);
            } catch (const IntegrationError& e) {
                std::ostringstream os;
                os << e.what() << " (step " << e.step() << ", t = " << format_double(e.time()) << ")";
                failures[i] = os.str();
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(specs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < specs.size(); ++i)
        if (!failures[i].empty())
            throw ScenarioFailure("scenario '" + cfg.name + "', job " + describe(cfg, specs[i]) + ": " + failures[i]);

    data.wall_time = seconds_since(start);
    return data;
}

std::vector<InvariantCheck> evaluate_invariants(const ScenarioData& data) {
    const auto& cfg = data.config;
    HygieneStats hygiene;
    double min_info = std::numeric_limits<double>::infinity();
    double max_info_at_zero = 0.0;
    double max_excess = -std::numeric_limits<double>::infinity();
    double min_ergotropy = std::numeric_limits<double>::infinity();
    double min_coherence = std::numeric_limits<double>::infinity();
    double max_coherence = -std::numeric_limits<double>::infinity();
    double max_battery_coherence_at_zero = 0.0;
    bool finite = true;
    bool grids_match = true;

    for (const auto& job : data.jobs) {
        hygiene.merge(job.stats);
        if (cfg.needs_states()) max_excess = std::max(max_excess, job.ergotropy_excess);
        for (const auto& [name, values] : job.series) {
            if (values.size() != job.t.size()) grids_match = false;
            for (double v : values) finite = finite && std::isfinite(v);
            if (values.empty()) continue;
            if (name.rfind("I_", 0) == 0) {
                min_info = std::min(min_info, *std::min_element(values.begin(), values.end()));
                max_info_at_zero = std::max(max_info_at_zero, std::abs(values.front()));
            } else if (name == "ergotropy_B") {
                min_ergotropy = std::min(min_ergotropy, *std::min_element(values.begin(), values.end()));
            } else if (name.rfind("C_", 0) == 0) {
                min_coherence = std::min(min_coherence, *std::min_element(values.begin(), values.end()));
                max_coherence = std::max(max_coherence, *std::max_element(values.begin(), values.end()));
                if (name == "C_B") max_battery_coherence_at_zero = std::max(max_battery_coherence_at_zero, std::abs(values.front()));
            }
        }
    }

    std::vector<InvariantCheck> checks;
    checks.push_back(upper_bound("trace_drift", hygiene.max_trace_correction, 1e-8, "max |Tr rho - 1| per step"));
    checks.push_back(upper_bound("hermiticity", hygiene.max_hermiticity_residual, 1e-10));
    checks.push_back(lower_bound("min_eigenvalue", hygiene.min_eigenvalue, -1e-8, "over stored steps"));
    checks.push_back({"series_finite", finite, finite ? 1.0 : 0.0, 1.0, {}});
    checks.push_back({"series_on_grid", grids_match, grids_match ? 1.0 : 0.0, 1.0, {}});
    if (std::isfinite(min_info)) {
        checks.push_back(lower_bound("mutual_information_nonnegative", min_info, -1e-9));
        checks.push_back(upper_bound("mutual_information_initially_zero", max_info_at_zero, 1e-9));
    }
    if (std::isfinite(max_excess)) checks.push_back(upper_bound("ergotropy_below_energy", max_excess, 1e-9, "max (eps_B - E_B)/omega_B"));
    if (std::isfinite(min_ergotropy)) checks.push_back(lower_bound("ergotropy_nonnegative", min_ergotropy, 0.0));
    if (std::isfinite(min_coherence)) {
        const double qubit_max = cfg.log_base == LogBase::Two ? 1.0 : std::log(2.0);
        checks.push_back(lower_bound("coherence_nonnegative", min_coherence, -1e-12));
        checks.push_back(upper_bound("coherence_below_qubit_max", max_coherence, qubit_max + 1e-12));
    }
    if (wants(cfg, "C_B")) checks.push_back(upper_bound("battery_coherence_initially_zero", max_battery_coherence_at_zero, 1e-12));
    return checks;
}

bool RunManifest::all_passed() const {
    return std::all_of(invariants.begin(), invariants.end(), [](const auto& c) { return c.passed; });
}

json RunManifest::to_json() const {
    json checks = json::array();
    for (const auto& c : invariants) {
        json entry{{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}};
        if (!c.detail.empty()) entry["detail"] = c.detail;
        checks.push_back(entry);
    }
    json outputs = json::array();
    for (const auto& f : files) outputs.push_back({{"path", f.path}, {"sha256", f.sha256}, {"rows", f.rows}});
    return {{"scenario", scenario},
            {"config", config},
            {"config_sha256", config_sha256},
            {"integrator", integrator},
            {"hygiene", stats_json(hygiene)},
            {"wall_time_seconds", wall_time},
            {"invariants", checks},
            {"all_passed", all_passed()},
            {"files", outputs},
            {"warnings", warnings}};
}

RunManifest write_scenario(const ScenarioData& data, const std::filesystem::path& dir) {
    const auto& cfg = data.config;
    std::filesystem::create_directories(dir);

    RunManifest manifest;
    manifest.scenario = cfg.name;
    manifest.config = to_json(cfg);
    manifest.config_sha256 = sha256_hex(manifest.config.dump());
    const IntegratorSettings s = cfg.integrator_settings();
    manifest.integrator = {{"method", "rk4"},
                           {"dt", s.dt},
                           {"t_max", s.t_max},
                           {"steps", s.steps()},
                           {"stride", s.stride},
                           {"abort_trace_drift", s.abort_trace_drift},
                           {"abort_negativity", s.abort_negativity}};
    manifest.wall_time = data.wall_time;
    manifest.invariants = evaluate_invariants(data);

    std::set<std::string> warnings;
    for (const auto& job : data.jobs) {
        manifest.hygiene.merge(job.stats);
        for (auto& w : job.params.weak_coupling_warnings()) warnings.insert(w);
    }
    manifest.warnings.assign(warnings.begin(), warnings.end());

    const std::string sweep_name = cfg.sweep ? to_string(cfg.sweep->parameter) : "";
    bool rows_ok = true;
    for (const auto& observable : cfg.observables) {
        for (double f : cfg.effective_drive_variants()) {
            std::ostringstream out;
            out << "# scenario: " << cfg.name << '\n'
                << "# observable: " << observable << '\n'
                << "# f: " << format_double(f) << '\n'
                << "# config_sha256: " << manifest.config_sha256 << '\n';
            out << "t (time)";
            if (cfg.sweep) out << ',' << sweep_name << " (energy)";
            out << ',' << observable << " (" << units_of(observable, cfg.log_base) << ")\n";

            std::size_t rows = 0;
            std::size_t expected = 0;
            for (const auto& job : data.jobs) {
                if (job.f != f && !(cfg.sweep && cfg.sweep->parameter == SweepParameter::F)) continue;
                const auto& values = job.series.at(observable);
                expected += job.t.size();
                for (std::size_t i = 0; i < job.t.size(); ++i) {
                    out << format_double(job.t[i]);
                    if (cfg.sweep) out << ',' << format_double(*job.sweep_value);
                    out << ',' << format_double(values[i]) << '\n';
                    ++rows;
                }
            }
            rows_ok = rows_ok && rows == expected && rows > 0;

            const std::string name = csv_file_name(observable, f);
            const std::string content = out.str();
            write_text(dir / name, content);
            manifest.files.push_back({name, sha256_hex(content), rows});
        }
    }
    manifest.invariants.push_back({"csv_row_counts", rows_ok, rows_ok ? 1.0 : 0.0, 1.0, "rows = grid length x sweep size"});

    write_text(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    return manifest;
}

RunManifest run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
    const ScenarioData data = compute_scenario(cfg, options.threads);
    return write_scenario(data, options.out_dir / cfg.name);
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < length; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string format_double(double value) {
    if (value == 0.0) return "0";
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

}  // namespace qbattery
