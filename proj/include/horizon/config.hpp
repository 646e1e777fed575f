#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "horizon/chinchilla.hpp"
#include "horizon/forecast.hpp"
#include "horizon/growth_model.hpp"
#include "horizon/scaling_fit.hpp"

namespace horizon {

struct DataPaths {
    std::filesystem::path horizons;
    std::filesystem::path family_benchmarks;
    std::filesystem::path flop_per_usd;
    std::filesystem::path compute_history;
    std::filesystem::path compute_projection;
};

struct Config {
    DataPaths data;
    chinchilla::Params chinchilla;
    growth::GrowthParams growth;
    growth::JonesParams jones;
    std::vector<forecast::Milestone> milestones = forecast::default_milestones();
    forecast::Window calibration_window{2019.0, 2025.75};
    // Horizon rows from this developer calibrate the forecast; empty means all rows.
    std::string calibration_developer = "OpenAI";
    double forecast_end_year = 2050.0;
    scaling::ComputeTransform fit_transform = scaling::ComputeTransform::chinchilla_adjusted;
    std::size_t bootstrap_resamples = 10000;
    std::uint16_t port = 8080;

    void validate() const;
};

// Relative data paths resolve against the config file's directory. Every
// referenced file must exist.
Config load_config(const std::filesystem::path& path);
Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

// --config wins, then HORIZON_CONFIG, then data/config.json under the source tree.
std::filesystem::path resolve_config_path(const std::string& flag_value);

}  // namespace horizon
