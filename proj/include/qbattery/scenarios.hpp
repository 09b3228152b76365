// scenarios.hpp: Scenario configuration, scenario catalog, sweep runner, CSV and
// manifest emission, and the self-check suite

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qbattery/dynamics.hpp"
#include "qbattery/model.hpp"
#include "qbattery/observables.hpp"

namespace qbattery {

/// Schema or invariant violation in a scenario document; `path()` names the
/// offending field (e.g. "params.g").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Integration failure inside a scenario run, tagged with the failing job.
class ScenarioFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitialState {
    ExcitedChargerEmptyBattery,  // ρ_C = |1><1|, ρ_B = |0><0|
    PlusChargerEmptyBattery,     // ρ_C = |+><+|, ρ_B = |0><0|
};

enum class SweepParameter { G, K, F };

struct SigmaPairSpec {
    BatteryPreparation alpha = BatteryPreparation::Ground;
    BatteryPreparation beta = BatteryPreparation::Excited;
};

struct Sweep {
    SweepParameter parameter = SweepParameter::G;
    std::vector<double> values;
};

struct ScenarioConfig {
    std::string name = "default";
    std::string description;
    ModelParams params;
    InitialState initial_state = InitialState::ExcitedChargerEmptyBattery;
    std::optional<SigmaPairSpec> sigma_pair;
    std::vector<double> drive_variants;  // f values run as separate variants; empty: params.f only
    double dt = 1e-3;
    double t_max = 100.0;
    std::size_t stride = 10;
    std::vector<std::string> observables;
    std::optional<Sweep> sweep;
    LogBase log_base = LogBase::Two;

    /// Throws ConfigError.
    void validate() const;

    std::vector<double> effective_drive_variants() const;
    bool needs_sigma() const;
    bool needs_states() const;
    IntegratorSettings integrator_settings() const;
};

const std::vector<std::string>& registered_observables();

std::string to_string(SweepParameter p);
std::string to_string(InitialState s);

/// Defaults of every field, the reference parameter set and all single-trajectory observables.
ScenarioConfig default_config();

/// Parses a JSON document (empty or whitespace-only means `{}`). A "base" key
/// starts from a catalog entry instead of the defaults.
ScenarioConfig load_config(std::string_view document);
ScenarioConfig load_config_file(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioConfig& cfg);

/// Figure-reproduction entries fig2 … fig8.
const std::vector<ScenarioConfig>& scenario_catalog();
std::optional<ScenarioConfig> find_scenario(std::string_view name);

/// `run` argument resolution: catalog name first, then a config file path.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

/// Evenly spaced values in (0, max]: max/count, 2 max/count, …, max.
std::vector<double> evenly_spaced_positive(double max, std::size_t count);

// --- execution ---------------------------------------------------------------

struct JobResult {
    double f = 0.0;
    std::optional<double> sweep_value;
    ModelParams params;
    std::vector<double> t;                                  // output grid
    std::map<std::string, std::vector<double>> series;      // observable -> values on t
    HygieneStats stats;
    double ergotropy_excess = 0.0;                          // max(ε_B - E_B)/ω_B, should be <= 0
    double wall_time = 0.0;
};

struct ScenarioData {
    ScenarioConfig config;
    std::vector<JobResult> jobs;  // variant-major, sweep-minor order
    double wall_time = 0.0;
};

/// Runs every (drive variant, sweep value) job, `threads` at a time.
/// Throws ScenarioFailure identifying the failing job.
ScenarioData compute_scenario(const ScenarioConfig& cfg, unsigned threads = 1);

struct OutputFile {
    std::string path;  // relative to the run directory
    std::string sha256;
    std::size_t rows = 0;
};

struct InvariantCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct RunManifest {
    std::string scenario;
    nlohmann::json config;
    std::string config_sha256;
    nlohmann::json integrator;
    HygieneStats hygiene;
    double wall_time = 0.0;
    std::vector<InvariantCheck> invariants;
    std::vector<OutputFile> files;
    std::vector<std::string> warnings;

    bool all_passed() const;
    nlohmann::json to_json() const;
};

/// Checks shared by every run: state hygiene, correlation and bound invariants.
std::vector<InvariantCheck> evaluate_invariants(const ScenarioData& data);

/// Writes one CSV per (observable, drive variant) plus manifest.json into `dir`.
RunManifest write_scenario(const ScenarioData& data, const std::filesystem::path& dir);

struct RunOptions {
    std::filesystem::path out_dir = "out";
    unsigned threads = 1;
};

/// compute + write into out_dir/<scenario name>.
RunManifest run_scenario(const ScenarioConfig& cfg, const RunOptions& options);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

/// Fast acceptance subset: commutators, virtual temperature, conservation,
/// analytic oracles and benchmark values. Failures are reported, not thrown.
RunManifest self_check();

}  // namespace qbattery
