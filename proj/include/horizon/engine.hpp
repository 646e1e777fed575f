#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "horizon/alg_progress.hpp"
#include "horizon/config.hpp"
#include "horizon/csv.hpp"
#include "horizon/forecast.hpp"
#include "horizon/scaling_fit.hpp"

namespace horizon {

enum class ForecastModel { linear, concave };

constexpr std::size_t kMaxPathKnots = 500;

struct ForecastRequest {
    std::vector<Sample> path;  // raw FLOP or 2025 USD, per `unit`
    SpendUnit unit = SpendUnit::flop;
    Reliability reliability = Reliability::p50;
    ForecastModel model = ForecastModel::linear;
    std::vector<forecast::Milestone> milestones;
    forecast::Window calibration_window{0.0, 0.0};
};

// Missing optional fields take config defaults. Throws FieldError naming the
// offending field.
ForecastRequest parse_forecast_request(const nlohmann::json& j, const Config& config);

struct ForecastOutput {
    forecast::CalibrationResult calibration;
    forecast::ForecastResult result;
    std::optional<double> lambda_over_beta;  // concave model only
};

// Fixtures are loaded once; every method is const and safe to call concurrently.
class Engine {
public:
    explicit Engine(Config config);

    const Config& config() const noexcept { return config_; }
    const std::vector<HorizonObservation>& horizons() const noexcept { return horizons_; }
    const std::vector<ModelBenchmarkObservation>& family_benchmarks() const noexcept { return benchmarks_; }
    const TimeSeries& flop_per_usd() const noexcept { return flop_per_usd_; }
    // History followed by the projection's later knots, in FLOP.
    const ComputePath& compute_history() const noexcept { return compute_history_; }
    const std::vector<SpendRecord>& compute_projection() const noexcept { return projection_; }
    const scaling::SharedSlopeFit& shared_fit() const noexcept { return shared_fit_; }
    const scaling::ConcaveFit& concave_fit() const noexcept { return concave_fit_; }

    // Rows used for calibration (the configured developer only).
    std::vector<HorizonObservation> calibration_horizons() const;

    ComputePath request_path(const ForecastRequest& req) const;
    forecast::CalibrationResult calibrate(Reliability r, forecast::Window w) const;
    ForecastOutput forecast(const ForecastRequest& req, double end_year) const;

    // Request JSON to response JSON; `end_year` defaults to the config's.
    nlohmann::json forecast_json(const nlohmann::json& request, std::optional<double> end_year = {}) const;
    nlohmann::json defaults_json() const;

    // Bootstrap over the in-sample horizon rows, gamma and its clustered SE
    // taken from the shared-slope fit.
    alg::AlgProgressEstimate alg_progress(Reliability r, const alg::BootstrapOptions& options) const;

private:
    Config config_;
    std::vector<HorizonObservation> horizons_;
    std::vector<ModelBenchmarkObservation> benchmarks_;
    TimeSeries flop_per_usd_;
    std::vector<SpendRecord> projection_;
    ComputePath compute_history_;
    scaling::SharedSlopeFit shared_fit_;
    scaling::ConcaveFit concave_fit_;
};

nlohmann::json to_json(const ForecastOutput& out);

// year,trend_minutes,forecast_minutes
std::string forecast_csv(const ForecastOutput& out);

}  // namespace horizon
