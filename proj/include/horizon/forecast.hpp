#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "horizon/csv.hpp"
#include "horizon/growth_model.hpp"
#include "horizon/scaling_fit.hpp"
#include "horizon/types.hpp"

namespace horizon::forecast {

constexpr double kMonth = 1.0 / 12.0;

struct Window {
    double start;
    double end;
};

struct CalibrationResult {
    double c = 0.0;        // past_gY / past_gK
    double past_gY = 0.0;  // ln minutes per year
    double past_gK = 0.0;  // ln total R&D FLOP per year
    double t0 = 0.0;       // anchor: last observation date in the window
    double y0 = 0.0;       // fitted trend value at t0, minutes
    Reliability reliability = Reliability::p50;
};

struct Milestone {
    std::string label;
    double threshold_minutes;
};

// 1 hour, 1 work-day (8 h), 1 work-week (40 h), 1 work-month (167 h).
std::vector<Milestone> default_milestones();

struct MilestoneOutcome {
    Milestone milestone;
    std::optional<double> date_trend;
    std::optional<double> date_forecast;
    std::optional<double> delay_years;  // empty when either date lies beyond the span
};

struct ForecastResult {
    TimeSeries horizon_path;
    TimeSeries trend_path;
    std::vector<MilestoneOutcome> milestones;
};

// Knots at each point of `flop`, in log10.
ComputePath flop_path(const TimeSeries& flop);

// Dollars to FLOP through the log-linear trend fitted to the FLOP-per-dollar
// history (the trend, not the raw history, is used at every date).
ComputePath usd_to_flop_path(const TimeSeries& usd, const TimeSeries& flop_per_usd_history);

// Mixed-unit spend records are rejected.
ComputePath compute_path_from_spend(const std::vector<SpendRecord>& spend,
                                    const TimeSeries& flop_per_usd_history);

TimeSeries flop_per_usd_series(const std::vector<FlopPerUsdRecord>& rows);

// Observations carrying the chosen reliability inside the closed window.
std::vector<Sample> select_horizons(const std::vector<HorizonObservation>& obs, Reliability reliability,
                                    Window window);

// past_gY from the horizon trend; past_gK from the compute path sampled on a
// monthly grid across the window; anchor at the last observation's trend value.
CalibrationResult calibrate(const std::vector<HorizonObservation>& horizon_history,
                            const ComputePath& compute_history, Reliability reliability, Window window);

// t0, t0 + 1/12, ... up to `end`, with `end` appended when off-grid.
std::vector<double> monthly_grid(double t0, double end);

// ln Y(t) = ln Y0 + past_gY * (t - t0)
TimeSeries trend_path(const CalibrationResult& cal, double end);

// ln Y(t) = ln Y0 + c * ln10 * (log_interp(path, t) - log_interp(path, t0))
TimeSeries forecast_horizon(const CalibrationResult& cal, const ComputePath& future_compute, double end);

// RK4 of d ln Y/dt = local_elasticity(fit, s_C * K) * (1 + lambda/beta) * g_K,
// stepping monthly and splitting steps at path knots.
TimeSeries forecast_horizon_concave(double t0, double y0, const ComputePath& future_compute,
                                    const scaling::ConcaveFit& fit, const growth::GrowthParams& p, double end);

// Least-squares lambda/beta matching the concave model to observed ln Y;
// the level of the prediction is profiled out.
double fit_lambda_over_beta_concave(std::span<const Sample> horizon_history, const ComputePath& compute_history,
                                    const scaling::ConcaveFit& fit, double training_share);

// First crossing of `threshold_minutes`, interpolated linearly in (t, ln Y).
std::optional<double> milestone_date(const TimeSeries& path, double threshold_minutes);

std::vector<MilestoneOutcome> milestone_delays(const TimeSeries& trend, const TimeSeries& forecast,
                                               const std::vector<Milestone>& milestones);

}  // namespace horizon::forecast
