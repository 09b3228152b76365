// catalog.cpp: Built-in scenario catalog

#include <filesystem>

#include "qbattery/scenarios.hpp"

namespace qbattery {

namespace {

const std::vector<double> kLineCouplings{0.1, 0.3, 0.6, 0.9};
const std::vector<double> kDriveVariants{0.0, 0.8};
constexpr std::size_t kDensityPoints = 40;
constexpr std::size_t kDensityStride = 250;  // 400 time columns over t_max = 100 at dt = 1e-3

ScenarioConfig line_scenario(std::string name, std::string description, InitialState initial,
                             std::vector<std::string> observables) {
    ScenarioConfig cfg = default_config();
    cfg.name = std::move(name);
    cfg.description = std::move(description);
    cfg.initial_state = initial;
    cfg.drive_variants = kDriveVariants;
    cfg.observables = std::move(observables);
    cfg.sweep = Sweep{SweepParameter::G, kLineCouplings};
    return cfg;
}

ScenarioConfig density_scenario(std::string name, std::string description, SweepParameter parameter,
                                std::vector<double> drive_variants, std::vector<std::string> observables) {
    ScenarioConfig cfg = default_config();
    cfg.name = std::move(name);
    cfg.description = std::move(description);
    cfg.initial_state = InitialState::PlusChargerEmptyBattery;
    cfg.drive_variants = std::move(drive_variants);
    cfg.observables = std::move(observables);
    cfg.stride = kDensityStride;
    cfg.sweep = Sweep{parameter, evenly_spaced_positive(0.1 * cfg.params.omega_m2, kDensityPoints)};
    return cfg;
}

std::vector<ScenarioConfig> build_catalog() {
    std::vector<ScenarioConfig> all;

    auto fig2 = line_scenario("fig2", "Trace-distance derivatives of battery, charger and machine",
                              InitialState::ExcitedChargerEmptyBattery, {"sigma_B", "sigma_C", "sigma_M12"});
    fig2.sigma_pair = SigmaPairSpec{};
    all.push_back(fig2);

    all.push_back(line_scenario("fig3", "Charger-battery and machine-charger-battery mutual information",
                                InitialState::ExcitedChargerEmptyBattery, {"I_CB", "I_M12CB"}));
    all.push_back(line_scenario("fig4", "Normalized internal energies of charger, battery and machine",
                                InitialState::PlusChargerEmptyBattery, {"dE_C", "dE_B", "dE_M12"}));
    all.push_back(density_scenario("fig5", "Normalized charging power over time and g", SweepParameter::G,
                                   kDriveVariants, {"P_B"}));
    all.push_back(line_scenario("fig6", "Relative entropy of coherence of charger and battery",
                                InitialState::PlusChargerEmptyBattery, {"C_C", "C_B"}));
    all.push_back(density_scenario("fig7", "Normalized battery ergotropy over time and g", SweepParameter::G,
                                   kDriveVariants, {"ergotropy_B"}));

    auto fig8 = density_scenario("fig8", "Battery information flow, coherence, power and ergotropy over time and k",
                                 SweepParameter::K, {0.0}, {"sigma_B", "C_B", "P_B", "ergotropy_B"});
    fig8.params.g = 0.3;
    fig8.sigma_pair = SigmaPairSpec{};
    all.push_back(fig8);

    for (const auto& cfg : all) cfg.validate();
    return all;
}

}  // namespace

const std::vector<ScenarioConfig>& scenario_catalog() {
    static const std::vector<ScenarioConfig> catalog = build_catalog();
    return catalog;
}

std::optional<ScenarioConfig> find_scenario(std::string_view name) {
    for (const auto& cfg : scenario_catalog())
        if (cfg.name == name) return cfg;
    return std::nullopt;
}

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
    if (auto found = find_scenario(name_or_path)) return *found;
    if (name_or_path == "default") return default_config();
    if (std::filesystem::is_regular_file(name_or_path)) return load_config_file(name_or_path);
    throw ConfigError("", "'" + name_or_path + "' is neither a catalog scenario nor a readable config file");
}

}  // namespace qbattery
