#include "horizon/config.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "horizon/csv.hpp"
#include "horizon/errors.hpp"

#ifndef HORIZON_DEFAULT_CONFIG
#define HORIZON_DEFAULT_CONFIG "data/config.json"
#endif

namespace horizon {

namespace {

std::filesystem::path data_file(const nlohmann::json& data, const char* key, const std::filesystem::path& base) {
    if (!data.contains(key)) throw SchemaError(fmt::format("config: data.{} is required", key));
    std::filesystem::path p = data.at(key).get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::is_regular_file(p)) {
        throw InputError(fmt::format("config: data.{} file not found: {}", key, p.string()));
    }
    return p;
}

}  // namespace

void Config::validate() const {
    chinchilla.validate();
    growth.validate();
    jones.validate();
    if (milestones.empty()) throw DomainError("config: milestone ladder is empty");
    for (const auto& m : milestones) {
        if (!(m.threshold_minutes > 0.0)) {
            throw DomainError(fmt::format("config: milestone '{}' needs a positive threshold", m.label));
        }
    }
    if (!(calibration_window.end > calibration_window.start)) {
        throw DomainError("config: calibration_window must be [start, end] with start < end");
    }
    if (!(forecast_end_year > calibration_window.end)) {
        throw DomainError("config: forecast_end_year must lie after the calibration window");
    }
    if (bootstrap_resamples < 1) throw DomainError("config: bootstrap_resamples must be at least 1");
}

Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    Config c;
    try {
        const auto& d = j.at("data");
        c.data.horizons = data_file(d, "horizons", base_dir);
        c.data.family_benchmarks = data_file(d, "family_benchmarks", base_dir);
        c.data.flop_per_usd = data_file(d, "flop_per_usd", base_dir);
        c.data.compute_history = data_file(d, "compute_history", base_dir);
        c.data.compute_projection = data_file(d, "compute_projection", base_dir);

        if (j.contains("chinchilla")) {
            const auto& p = j.at("chinchilla");
            c.chinchilla.irreducible_loss = p.value("irreducible_loss", c.chinchilla.irreducible_loss);
            c.chinchilla.coef_params = p.value("coef_params", c.chinchilla.coef_params);
            c.chinchilla.coef_tokens = p.value("coef_tokens", c.chinchilla.coef_tokens);
            c.chinchilla.exp_params = p.value("exp_params", c.chinchilla.exp_params);
            c.chinchilla.exp_tokens = p.value("exp_tokens", c.chinchilla.exp_tokens);
        }
        if (j.contains("growth")) {
            const auto& g = j.at("growth");
            c.growth.gamma = g.value("gamma", c.growth.gamma);
            c.growth.lambda_over_beta = g.value("lambda_over_beta", c.growth.lambda_over_beta);
            c.growth.labor_share = g.value("labor_share", c.growth.labor_share);
            c.growth.training_share = g.value("training_share", c.growth.training_share);
        }
        if (j.contains("jones")) {
            const auto& p = j.at("jones");
            c.jones.k = p.value("k", c.jones.k);
            c.jones.beta = p.value("beta", c.jones.beta);
            c.jones.lambda = p.value("lambda", c.jones.lambda);
        }
        if (j.contains("milestones")) {
            c.milestones.clear();
            for (const auto& m : j.at("milestones")) {
                c.milestones.push_back({m.at("label").get<std::string>(), m.at("minutes").get<double>()});
            }
        }
        if (j.contains("calibration_window")) {
            const auto& w = j.at("calibration_window");
            if (!w.is_array() || w.size() != 2) throw SchemaError("config: calibration_window must be [start, end]");
            c.calibration_window = {w[0].get<double>(), w[1].get<double>()};
        }
        c.calibration_developer = j.value("calibration_developer", c.calibration_developer);
        c.forecast_end_year = j.value("forecast_end_year", c.forecast_end_year);
        if (j.contains("fit_transform")) {
            c.fit_transform = scaling::transform_from_string(j.at("fit_transform").get<std::string>());
        }
        c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
        c.port = j.value("port", c.port);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(fmt::format("config: {}", e.what()));
    }
    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
    }
    return config_from_json(j, path.parent_path());
}

std::filesystem::path resolve_config_path(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("HORIZON_CONFIG"); env && *env) return env;
    return HORIZON_DEFAULT_CONFIG;
}

}  // namespace horizon
