// qbattery: command-line front end for scenario runs, sweeps and the self-check

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "qbattery/scenarios.hpp"

using namespace qbattery;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRunFailure = 2, kSelfCheckFailure = 3 };

struct Overrides {
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<std::string> log_base;
    std::string out_dir;
    unsigned threads = 1;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--dt", o.dt, "Integrator step");
    cmd->add_option("--t-max", o.t_max, "Final time");
    cmd->add_option("--log-base", o.log_base, "Entropy logarithm base: 2 or e")->check(CLI::IsMember({"2", "e"}));
    cmd->add_option("--out-dir", o.out_dir, "Output root (default: $QBATTERY_OUT_DIR or ./out)");
    cmd->add_option("--threads", o.threads, "Parallel jobs")->check(CLI::Range(1u, 1024u));
}

ScenarioConfig apply(ScenarioConfig cfg, const Overrides& o) {
    if (o.dt) cfg.dt = *o.dt;
    if (o.t_max) cfg.t_max = *o.t_max;
    if (o.log_base) cfg.log_base = *o.log_base == "e" ? LogBase::E : LogBase::Two;
    cfg.validate();
    return cfg;
}

std::filesystem::path output_root(const Overrides& o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv("QBATTERY_OUT_DIR"); env && *env) return env;
    return "out";
}

void print_checks(const RunManifest& m) {
    for (const auto& c : m.invariants)
        std::cout << (c.passed ? "  ok    " : "  FAIL  ") << c.name << "  value=" << format_double(c.value)
                  << " threshold=" << format_double(c.threshold) << (c.detail.empty() ? "" : "  (" + c.detail + ")")
                  << '\n';
}

int execute(const ScenarioConfig& cfg, const Overrides& o) {
    const auto root = output_root(o);
    std::cout << "scenario " << cfg.name << ": " << cfg.effective_drive_variants().size() << " drive variant(s)";
    if (cfg.sweep) std::cout << " x " << cfg.sweep->values.size() << " " << to_string(cfg.sweep->parameter) << " values";
    std::cout << ", dt=" << format_double(cfg.dt) << ", t_max=" << format_double(cfg.t_max) << '\n';

    const RunManifest m = run_scenario(cfg, {root, o.threads});
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : m.files) std::cout << "  wrote " << (root / cfg.name / f.path).string() << " (" << f.rows << " rows)\n";
    print_checks(m);
    std::cout << "manifest: " << (root / cfg.name / "manifest.json").string() << "  wall time "
              << format_double(std::round(m.wall_time * 100) / 100) << " s\n";
    return m.all_passed() ? kOk : kRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum battery charged through a two-qubit autonomous thermal machine"};
    app.require_subcommand(1);

    Overrides run_opts;
    std::string run_target;
    auto* run = app.add_subcommand("run", "Run a catalog scenario or a JSON config file");
    run->add_option("scenario", run_target, "Catalog name (see 'list') or config path")->required();
    add_overrides(run, run_opts);

    auto* list = app.add_subcommand("list", "List catalog scenarios");
    auto* check = app.add_subcommand("self-check", "Run the fast verification suite");

    Overrides sweep_opts;
    std::string sweep_target = "default";
    std::string sweep_param;
    std::vector<double> sweep_values;
    std::size_t sweep_count = 0;
    double sweep_max = 0.0;
    auto* sweep = app.add_subcommand("sweep", "Run a scenario over a coupling or drive sweep");
    sweep->add_option("scenario", sweep_target, "Catalog name or config path (default: reference parameters)");
    sweep->add_option("--param", sweep_param, "Swept parameter")->required()->check(CLI::IsMember({"g", "k", "f"}));
    auto* values_opt = sweep->add_option("--values", sweep_values, "Explicit values")->delimiter(',');
    auto* count_opt = sweep->add_option("--count", sweep_count, "Number of evenly spaced values in (0, max]");
    auto* max_opt = sweep->add_option("--max", sweep_max, "Upper end of the evenly spaced range");
    count_opt->needs(max_opt);
    max_opt->needs(count_opt);
    values_opt->excludes(count_opt);
    add_overrides(sweep, sweep_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& cfg : scenario_catalog()) {
                std::cout << cfg.name << "  " << cfg.description << "\n    observables:";
                for (const auto& o : cfg.observables) std::cout << ' ' << o;
                std::cout << "\n    f:";
                for (double f : cfg.effective_drive_variants()) std::cout << ' ' << format_double(f);
                if (cfg.sweep)
                    std::cout << "   " << to_string(cfg.sweep->parameter) << ": " << cfg.sweep->values.size() << " values";
                std::cout << '\n';
            }
            return kOk;
        }
        if (*check) {
            const RunManifest m = self_check();
            print_checks(m);
            std::cout << (m.all_passed() ? "self-check passed" : "self-check FAILED") << " in "
                      << format_double(std::round(m.wall_time * 100) / 100) << " s\n";
            return m.all_passed() ? kOk : kSelfCheckFailure;
        }
        if (*run) return execute(apply(resolve_scenario(run_target), run_opts), run_opts);
        if (*sweep) {
            ScenarioConfig cfg = resolve_scenario(sweep_target);
            Sweep s;
            s.parameter = sweep_param == "g" ? SweepParameter::G : sweep_param == "k" ? SweepParameter::K : SweepParameter::F;
            if (!sweep_values.empty()) {
                s.values = sweep_values;
            } else if (sweep_count > 0) {
                if (!(sweep_max > 0)) throw ConfigError("sweep.max", "must be positive");
                s.values = evenly_spaced_positive(sweep_max, sweep_count);
            } else {
                throw ConfigError("sweep", "give --values or --count with --max");
            }
            cfg.sweep = s;
            if (s.parameter == SweepParameter::F) cfg.drive_variants.clear();
            cfg.name += "-sweep-" + sweep_param;
            return execute(apply(cfg, sweep_opts), sweep_opts);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ScenarioFailure& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return kRunFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRunFailure;
    }
    return kOk;
}
