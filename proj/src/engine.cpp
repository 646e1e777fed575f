#include "horizon/engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "horizon/errors.hpp"

namespace horizon {

namespace {

using nlohmann::json;

std::vector<SpendRecord> load_spend(const std::filesystem::path& p) {
    return parse_compute_spend_csv(read_text_file(p)).records;
}

double number_field(const json& j, const std::string& field) {
    if (!j.is_number()) throw FieldError(field, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw FieldError(field, "must be finite");
    return v;
}

std::string milestone_label(double minutes, const std::vector<forecast::Milestone>& ladder) {
    for (const auto& m : ladder) {
        if (m.threshold_minutes == minutes) return m.label;
    }
    return fmt::format("{:g} min", minutes);
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json series_json(const TimeSeries& s) {
    json out = json::array();
    for (const auto& p : s.points()) out.push_back({{"year", p.t}, {"minutes", p.value}});
    return out;
}

json calibration_json(const forecast::CalibrationResult& c) {
    return {{"c", c.c}, {"past_gY", c.past_gY}, {"past_gK", c.past_gK}};
}

}  // namespace

ForecastRequest parse_forecast_request(const json& j, const Config& config) {
    if (!j.is_object()) throw FieldError("request", "must be a JSON object");
    static const std::vector<std::string> known{"path",  "unit", "reliability", "model", "thresholds_minutes",
                                                "calibration_window"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) throw FieldError(key, "unknown field");
    }

    ForecastRequest req;
    if (!j.contains("path")) throw FieldError("path", "is required");
    const auto& path = j.at("path");
    if (!path.is_array()) throw FieldError("path", "must be an array of {year, value}");
    if (path.size() < 2) throw FieldError("path", "needs at least 2 knots");
    if (path.size() > kMaxPathKnots) {
        throw FieldError("path", fmt::format("has {} knots; the limit is {}", path.size(), kMaxPathKnots));
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto& k = path[i];
        const auto base = fmt::format("path[{}]", i);
        if (!k.is_object()) throw FieldError(base, "must be an object with year and value");
        if (!k.contains("year")) throw FieldError(base + ".year", "is required");
        if (!k.contains("value")) throw FieldError(base + ".value", "is required");
        const double year = number_field(k.at("year"), base + ".year");
        const double value = number_field(k.at("value"), base + ".value");
        if (!(value > 0.0)) throw FieldError(base + ".value", "must be positive");
        if (!req.path.empty() && !(year > req.path.back().t)) {
            throw FieldError(base + ".year", "years must be strictly increasing");
        }
        req.path.push_back({year, value});
    }

    if (j.contains("unit")) {
        const auto& u = j.at("unit");
        if (u == "flop") {
            req.unit = SpendUnit::flop;
        } else if (u == "usd_2025") {
            req.unit = SpendUnit::usd;
        } else {
            throw FieldError("unit", "must be \"flop\" or \"usd_2025\"");
        }
    }
    if (j.contains("reliability")) {
        const auto& r = j.at("reliability");
        if (r == "p50") {
            req.reliability = Reliability::p50;
        } else if (r == "p80") {
            req.reliability = Reliability::p80;
        } else {
            throw FieldError("reliability", "must be \"p50\" or \"p80\"");
        }
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        if (m == "linear") {
            req.model = ForecastModel::linear;
        } else if (m == "concave") {
            req.model = ForecastModel::concave;
        } else {
            throw FieldError("model", "must be \"linear\" or \"concave\"");
        }
    }
    if (j.contains("thresholds_minutes")) {
        const auto& t = j.at("thresholds_minutes");
        if (!t.is_array() || t.empty()) throw FieldError("thresholds_minutes", "must be a non-empty array");
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto field = fmt::format("thresholds_minutes[{}]", i);
            const double v = number_field(t[i], field);
            if (!(v > 0.0)) throw FieldError(field, "must be positive");
            req.milestones.push_back({milestone_label(v, config.milestones), v});
        }
    } else {
        req.milestones = config.milestones;
    }
    req.calibration_window = config.calibration_window;
    if (j.contains("calibration_window")) {
        const auto& w = j.at("calibration_window");
        if (!w.is_array() || w.size() != 2) throw FieldError("calibration_window", "must be [start, end]");
        const double a = number_field(w[0], "calibration_window[0]");
        const double b = number_field(w[1], "calibration_window[1]");
        if (!(b > a)) throw FieldError("calibration_window", "start must precede end");
        req.calibration_window = {a, b};
    }
    return req;
}

Engine::Engine(Config config)
    : config_(std::move(config)),
      horizons_(parse_horizons_csv(read_text_file(config_.data.horizons)).records),
      benchmarks_(parse_family_benchmarks_csv(read_text_file(config_.data.family_benchmarks)).records),
      flop_per_usd_(forecast::flop_per_usd_series(
          parse_flop_per_usd_csv(read_text_file(config_.data.flop_per_usd)).records)),
      projection_(load_spend(config_.data.compute_projection)),
      compute_history_([this] {
          auto spend = load_spend(config_.data.compute_history);
          if (spend.empty()) throw InputError("compute history has no rows");
          const double last = std::max_element(spend.begin(), spend.end(), [](const auto& a, const auto& b) {
                                  return a.year < b.year;
                              })->year;
          for (const auto& r : projection_) {
              if (r.year > last) spend.push_back(r);
          }
          return forecast::compute_path_from_spend(spend, flop_per_usd_);
      }()),
      shared_fit_(scaling::fit_shared_slope(benchmarks_, config_.fit_transform, config_.chinchilla)),
      concave_fit_(scaling::fit_concave(benchmarks_, config_.fit_transform, config_.chinchilla)) {}

std::vector<HorizonObservation> Engine::calibration_horizons() const {
    if (config_.calibration_developer.empty()) return horizons_;
    std::vector<HorizonObservation> out;
    for (const auto& h : horizons_) {
        if (h.developer == config_.calibration_developer) out.push_back(h);
    }
    return out;
}

ComputePath Engine::request_path(const ForecastRequest& req) const {
    const TimeSeries series(req.path);
    return req.unit == SpendUnit::flop ? forecast::flop_path(series)
                                       : forecast::usd_to_flop_path(series, flop_per_usd_);
}

forecast::CalibrationResult Engine::calibrate(Reliability r, forecast::Window w) const {
    return forecast::calibrate(calibration_horizons(), compute_history_, r, w);
}

ForecastOutput Engine::forecast(const ForecastRequest& req, double end_year) const {
    const auto cal = calibrate(req.reliability, req.calibration_window);
    const auto path = request_path(req);
    auto trend = forecast::trend_path(cal, end_year);
    if (req.model == ForecastModel::linear) {
        auto horizon = forecast::forecast_horizon(cal, path, end_year);
        auto milestones = forecast::milestone_delays(trend, horizon, req.milestones);
        return {cal, {std::move(horizon), std::move(trend), std::move(milestones)}, std::nullopt};
    }
    const auto history = forecast::select_horizons(calibration_horizons(), req.reliability, req.calibration_window);
    const double lb = forecast::fit_lambda_over_beta_concave(history, compute_history_, concave_fit_,
                                                             config_.growth.training_share);
    if (!(lb > 0.0)) throw CalibrationError(fmt::format("fitted lambda/beta = {} is not positive", lb));
    growth::GrowthParams p = config_.growth;
    p.lambda_over_beta = lb;
    auto horizon = forecast::forecast_horizon_concave(cal.t0, cal.y0, path, concave_fit_, p, end_year);
    auto milestones = forecast::milestone_delays(trend, horizon, req.milestones);
    return {cal, {std::move(horizon), std::move(trend), std::move(milestones)}, lb};
}

json Engine::forecast_json(const json& request, std::optional<double> end_year) const {
    const auto req = parse_forecast_request(request, config_);
    return to_json(forecast(req, end_year.value_or(config_.forecast_end_year)));
}

json Engine::defaults_json() const {
    json calibration = json::object();
    for (const auto r : {Reliability::p50, Reliability::p80}) {
        const auto c = calibrate(r, config_.calibration_window);
        calibration[std::string(to_string(r))] = {{"c", c.c},   {"past_gY", c.past_gY}, {"past_gK", c.past_gK},
                                                  {"t0", c.t0}, {"y0", c.y0}};
    }
    json milestones = json::array();
    for (const auto& m : config_.milestones) {
        milestones.push_back({{"label", m.label}, {"threshold_minutes", m.threshold_minutes}});
    }
    json horizons = json::array();
    for (const auto& h : horizons_) {
        horizons.push_back({{"model_id", h.model_id},
                            {"developer", h.developer},
                            {"year", h.release.year},
                            {"p50_minutes", optional_number(h.p50_minutes)},
                            {"p80_minutes", optional_number(h.p80_minutes)}});
    }
    json history = json::array();
    for (const auto& k : compute_history_.knots()) history.push_back({{"year", k.t}, {"log10_flop", k.log10_flop}});
    json projection = json::array();
    for (const auto& r : projection_) projection.push_back({{"year", r.year}, {"value", r.value}});
    json flop_per_usd = json::array();
    for (const auto& p : flop_per_usd_.points()) flop_per_usd.push_back({{"year", p.t}, {"flop_per_usd", p.value}});

    return {
        {"calibration", calibration},
        {"calibration_window", {config_.calibration_window.start, config_.calibration_window.end}},
        {"forecast_end_year", config_.forecast_end_year},
        {"milestones", milestones},
        {"growth",
         {{"gamma", config_.growth.gamma},
          {"lambda_over_beta", config_.growth.lambda_over_beta},
          {"labor_share", config_.growth.labor_share},
          {"training_share", config_.growth.training_share}}},
        {"concave_fit", {{"beta_coef", concave_fit_.beta_coef}, {"rho", concave_fit_.rho}}},
        {"max_path_knots", kMaxPathKnots},
        {"history",
         {{"horizons", horizons},
          {"compute_flop", history},
          {"compute_projection_usd", projection},
          {"flop_per_usd", flop_per_usd}}},
        {"default_request", {{"path", projection}, {"unit", "usd_2025"}, {"reliability", "p50"}, {"model", "linear"}}},
    };
}

alg::AlgProgressEstimate Engine::alg_progress(Reliability r, const alg::BootstrapOptions& options) const {
    const auto sample = alg::paired_sample(horizons_, r);
    return alg::bootstrap_ci(sample, shared_fit_.gamma, shared_fit_.se_gamma_clustered, options);
}

json to_json(const ForecastOutput& out) {
    json milestones = json::array();
    for (const auto& m : out.result.milestones) {
        milestones.push_back({{"label", m.milestone.label},
                              {"threshold_minutes", m.milestone.threshold_minutes},
                              {"date_trend", optional_number(m.date_trend)},
                              {"date_forecast", optional_number(m.date_forecast)},
                              {"delay_years", optional_number(m.delay_years)}});
    }
    return {
        {"horizon_path", series_json(out.result.horizon_path)},
        {"trend_path", series_json(out.result.trend_path)},
        {"milestones", milestones},
        {"calibration", calibration_json(out.calibration)},
    };
}

std::string forecast_csv(const ForecastOutput& out) {
    std::string s = "year,trend_minutes,forecast_minutes\n";
    const auto trend = out.result.trend_path.points();
    const auto fc = out.result.horizon_path.points();
    for (std::size_t i = 0; i < std::min(trend.size(), fc.size()); ++i) {
        s += fmt::format("{:.17g},{:.17g},{:.17g}\n", fc[i].t, trend[i].value, fc[i].value);
    }
    return s;
}

}  // namespace horizon
