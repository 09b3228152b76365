// scenario_config.cpp: Scenario documents: defaults, parsing, validation, echo

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qbattery/scenarios.hpp"

namespace qbattery {

using nlohmann::json;

namespace {

const std::set<std::string> kSigmaObservables{"sigma_B", "sigma_C", "sigma_M12"};

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void require_object(const json& v, const std::string& path, const std::set<std::string>& allowed) {
    if (!v.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [key, _] : v.items())
        if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
}

void require_distinct_finite(const std::vector<double>& values, const std::string& path) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw ConfigError(path, "values must be finite");
        for (std::size_t j = 0; j < i; ++j)
            if (values[i] == values[j]) throw ConfigError(path, "values must be distinct");
    }
}

InitialState parse_initial_state(const std::string& s, const std::string& path) {
    if (s == "excited_charger_empty_battery") return InitialState::ExcitedChargerEmptyBattery;
    if (s == "plus_charger_empty_battery") return InitialState::PlusChargerEmptyBattery;
    throw ConfigError(path, "unknown initial state '" + s + "'");
}

BatteryPreparation parse_battery(const std::string& s, const std::string& path) {
    if (s == "ground") return BatteryPreparation::Ground;
    if (s == "excited") return BatteryPreparation::Excited;
    throw ConfigError(path, "expected 'ground' or 'excited'");
}

std::string battery_name(BatteryPreparation b) { return b == BatteryPreparation::Ground ? "ground" : "excited"; }

SweepParameter parse_sweep_parameter(const std::string& s, const std::string& path) {
    if (s == "g") return SweepParameter::G;
    if (s == "k") return SweepParameter::K;
    if (s == "f") return SweepParameter::F;
    throw ConfigError(path, "sweep parameter must be one of g, k, f");
}

LogBase parse_log_base(const json& v, const std::string& path) {
    if (v.is_number() && v.get<double>() == 2.0) return LogBase::Two;
    if (v.is_string() && (v == "2")) return LogBase::Two;
    if (v.is_string() && (v == "e")) return LogBase::E;
    throw ConfigError(path, "log_base must be 2 or \"e\"");
}

void apply_params(ModelParams& p, const json& doc) {
    static const std::set<std::string> keys{"omega_m1", "omega_m2", "omega_c", "omega_b", "g",  "k",  "f",
                                            "gamma1",   "gamma2",   "t1",      "t2",      "tau"};
    require_object(doc, "params", keys);
    auto number = [&](const char* key, double& target) {
        if (doc.contains(key)) target = as_number(doc.at(key), join("params", key));
    };
    number("omega_m1", p.omega_m1);
    number("omega_m2", p.omega_m2);
    number("omega_c", p.omega_c);
    number("omega_b", p.omega_b);
    number("g", p.g);
    number("k", p.k);
    number("f", p.f);
    number("gamma1", p.gamma1);
    number("gamma2", p.gamma2);
    number("t1", p.t1);
    number("t2", p.t2);
    if (doc.contains("tau")) {
        const auto& v = doc.at("tau");
        if (v.is_null() || (v.is_string() && (v == "inf" || v == "infinity")))
            p.tau = std::numeric_limits<double>::infinity();
        else
            p.tau = as_number(v, "params.tau");
    }
    const bool machine_changed = doc.contains("omega_m1") || doc.contains("omega_m2");
    const bool charger_given = doc.contains("omega_c") || doc.contains("omega_b");
    if (machine_changed && !charger_given) p = p.with_resonant_charger();
}

ModelParams with_sweep_value(ModelParams p, SweepParameter param, double value) {
    switch (param) {
        case SweepParameter::G: p.g = value; break;
        case SweepParameter::K: p.k = value; break;
        case SweepParameter::F: p.f = value; break;
    }
    return p;
}

}  // namespace

const std::vector<std::string>& registered_observables() {
    static const std::vector<std::string> names{"sigma_B", "sigma_C", "sigma_M12", "I_CB", "I_M12CB",    "dE_C",
                                                "dE_B",    "dE_M12",  "P_B",       "C_C",  "C_B", "ergotropy_B"};
    return names;
}

std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::G: return "g";
        case SweepParameter::K: return "k";
        case SweepParameter::F: return "f";
    }
    return "?";
}

std::string to_string(InitialState s) {
    return s == InitialState::ExcitedChargerEmptyBattery ? "excited_charger_empty_battery"
                                                         : "plus_charger_empty_battery";
}

std::vector<double> evenly_spaced_positive(double max, std::size_t count) {
    if (!(max > 0) || count == 0) throw std::invalid_argument("evenly_spaced_positive: need max > 0 and count >= 1");
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = max * static_cast<double>(i + 1) / static_cast<double>(count);
    return v;
}

std::vector<double> ScenarioConfig::effective_drive_variants() const {
    return drive_variants.empty() ? std::vector<double>{params.f} : drive_variants;
}

bool ScenarioConfig::needs_sigma() const {
    return std::any_of(observables.begin(), observables.end(), [](const auto& o) { return kSigmaObservables.count(o); });
}

bool ScenarioConfig::needs_states() const {
    return std::any_of(observables.begin(), observables.end(), [](const auto& o) { return !kSigmaObservables.count(o); });
}

IntegratorSettings ScenarioConfig::integrator_settings() const {
    IntegratorSettings s;
    s.dt = dt;
    s.t_max = t_max;
    s.stride = stride;
    return s;
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ConfigError("name", "must not be empty");
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
            throw ConfigError("name", "only letters, digits, '-', '_' and '.' are allowed");
    if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt", "must be positive");
    if (!(t_max > 0) || !std::isfinite(t_max)) throw ConfigError("t_max", "must be positive");
    if (stride < 1) throw ConfigError("stride", "must be >= 1");
    try {
        (void)integrator_settings().steps();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("t_max", e.what());
    }
    if (dt * params.omega_m2 > IntegratorSettings{}.max_dt_omega * (1.0 + 1e-12))
        throw ConfigError("dt", "dt * omega_m2 exceeds the stability guard 0.05");

    if (observables.empty()) throw ConfigError("observables", "at least one observable is required");
    const auto& known = registered_observables();
    for (std::size_t i = 0; i < observables.size(); ++i) {
        const auto path = "observables[" + std::to_string(i) + "]";
        if (std::find(known.begin(), known.end(), observables[i]) == known.end())
            throw ConfigError(path, "unknown observable '" + observables[i] + "'");
        for (std::size_t j = 0; j < i; ++j)
            if (observables[i] == observables[j]) throw ConfigError(path, "duplicate observable");
    }

    require_distinct_finite(drive_variants, "drive_variants");
    for (double f : drive_variants)
        if (f < 0) throw ConfigError("drive_variants", "drive amplitudes must be nonnegative");

    std::vector<double> sweep_values{std::numeric_limits<double>::quiet_NaN()};
    if (sweep) {
        if (sweep->values.empty()) throw ConfigError("sweep.values", "must not be empty");
        require_distinct_finite(sweep->values, "sweep.values");
        if (sweep->parameter == SweepParameter::F && drive_variants.size() > 1)
            throw ConfigError("sweep.parameter", "an f sweep cannot be combined with several drive_variants");
        sweep_values = sweep->values;
    }

    for (double f : effective_drive_variants())
        for (double v : sweep_values) {
            ModelParams p = params;
            p.f = f;
            if (sweep) p = with_sweep_value(p, sweep->parameter, v);
            try {
                p.validate();
            } catch (const InvalidParams& e) {
                throw ConfigError(sweep ? "sweep.values" : "params", e.what());
            }
        }
}

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    cfg.observables = {"I_CB", "I_M12CB", "dE_C", "dE_B", "dE_M12", "P_B", "C_C", "C_B", "ergotropy_B"};
    return cfg;
}

ScenarioConfig load_config(std::string_view document) {
    json doc;
    const bool blank = std::all_of(document.begin(), document.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(document);
        } catch (const json::parse_error& e) {
            throw ConfigError("", std::string("malformed document: ") + e.what());
        }
    }

    static const std::set<std::string> keys{"base",   "name",          "description", "params", "initial_state",
                                            "sigma_pair", "drive_variants", "dt",     "t_max",  "stride",
                                            "observables", "sweep",       "log_base"};
    require_object(doc, "", keys);

    ScenarioConfig cfg = default_config();
    if (doc.contains("base")) {
        const auto base = as_string(doc.at("base"), "base");
        auto found = find_scenario(base);
        if (!found) throw ConfigError("base", "unknown catalog scenario '" + base + "'");
        cfg = *found;
    }

    if (doc.contains("name")) cfg.name = as_string(doc.at("name"), "name");
    if (doc.contains("description")) cfg.description = as_string(doc.at("description"), "description");
    if (doc.contains("params")) apply_params(cfg.params, doc.at("params"));
    if (doc.contains("initial_state"))
        cfg.initial_state = parse_initial_state(as_string(doc.at("initial_state"), "initial_state"), "initial_state");
    if (doc.contains("drive_variants")) cfg.drive_variants = as_number_list(doc.at("drive_variants"), "drive_variants");
    if (doc.contains("dt")) cfg.dt = as_number(doc.at("dt"), "dt");
    if (doc.contains("t_max")) cfg.t_max = as_number(doc.at("t_max"), "t_max");
    if (doc.contains("stride")) {
        const auto& v = doc.at("stride");
        if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError("stride", "expected an integer >= 1");
        cfg.stride = v.get<std::size_t>();
    }
    if (doc.contains("observables")) {
        const auto& v = doc.at("observables");
        if (!v.is_array()) throw ConfigError("observables", "expected an array of names");
        cfg.observables.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
            cfg.observables.push_back(as_string(v[i], "observables[" + std::to_string(i) + "]"));
    }
    if (doc.contains("log_base")) cfg.log_base = parse_log_base(doc.at("log_base"), "log_base");

    if (doc.contains("sigma_pair")) {
        const auto& v = doc.at("sigma_pair");
        if (v.is_null()) {
            cfg.sigma_pair.reset();
        } else {
            require_object(v, "sigma_pair", {"alpha_battery", "beta_battery"});
            SigmaPairSpec spec;
            if (v.contains("alpha_battery"))
                spec.alpha = parse_battery(as_string(v.at("alpha_battery"), "sigma_pair.alpha_battery"),
                                           "sigma_pair.alpha_battery");
            if (v.contains("beta_battery"))
                spec.beta = parse_battery(as_string(v.at("beta_battery"), "sigma_pair.beta_battery"),
                                          "sigma_pair.beta_battery");
            if (spec.alpha == spec.beta) throw ConfigError("sigma_pair", "branches must differ");
            cfg.sigma_pair = spec;
        }
    }

    if (doc.contains("sweep")) {
        const auto& v = doc.at("sweep");
        if (v.is_null()) {
            cfg.sweep.reset();
        } else {
            require_object(v, "sweep", {"parameter", "values", "count", "max"});
            if (!v.contains("parameter")) throw ConfigError("sweep.parameter", "required");
            Sweep sweep;
            sweep.parameter = parse_sweep_parameter(as_string(v.at("parameter"), "sweep.parameter"), "sweep.parameter");
            const bool listed = v.contains("values");
            const bool spaced = v.contains("count") || v.contains("max");
            if (listed == spaced) throw ConfigError("sweep", "give either 'values' or 'count' and 'max'");
            if (listed) {
                sweep.values = as_number_list(v.at("values"), "sweep.values");
            } else {
                if (!v.contains("count") || !v.contains("max")) throw ConfigError("sweep", "'count' and 'max' go together");
                const auto& c = v.at("count");
                if (!c.is_number_integer() || c.get<long long>() < 1) throw ConfigError("sweep.count", "expected an integer >= 1");
                const double max = as_number(v.at("max"), "sweep.max");
                if (!(max > 0)) throw ConfigError("sweep.max", "must be positive");
                sweep.values = evenly_spaced_positive(max, c.get<std::size_t>());
            }
            cfg.sweep = std::move(sweep);
        }
    }

    if (cfg.needs_sigma() && !cfg.sigma_pair) cfg.sigma_pair = SigmaPairSpec{};
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

json to_json(const ScenarioConfig& cfg) {
    const auto& p = cfg.params;
    json params{{"omega_m1", p.omega_m1}, {"omega_m2", p.omega_m2}, {"omega_c", p.omega_c}, {"omega_b", p.omega_b},
                {"g", p.g},               {"k", p.k},               {"f", p.f},             {"gamma1", p.gamma1},
                {"gamma2", p.gamma2},     {"t1", p.t1},             {"t2", p.t2}};
    params["tau"] = std::isinf(p.tau) ? json("inf") : json(p.tau);

    json doc{{"name", cfg.name},
             {"params", params},
             {"initial_state", to_string(cfg.initial_state)},
             {"dt", cfg.dt},
             {"t_max", cfg.t_max},
             {"stride", cfg.stride},
             {"observables", cfg.observables},
             {"log_base", cfg.log_base == LogBase::Two ? "2" : "e"}};
    if (!cfg.description.empty()) doc["description"] = cfg.description;
    if (!cfg.drive_variants.empty()) doc["drive_variants"] = cfg.drive_variants;
    if (cfg.sigma_pair)
        doc["sigma_pair"] = {{"alpha_battery", battery_name(cfg.sigma_pair->alpha)},
                             {"beta_battery", battery_name(cfg.sigma_pair->beta)}};
    if (cfg.sweep) doc["sweep"] = {{"parameter", to_string(cfg.sweep->parameter)}, {"values", cfg.sweep->values}};
    return doc;
}

}  // namespace qbattery
