#include "horizon/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "horizon/errors.hpp"
#include "horizon/trend.hpp"

namespace horizon::forecast {

namespace {

constexpr double kGridSlack = 1e-9;

void require_end_after(double t0, double end) {
    if (!std::isfinite(end) || !(end > t0)) {
        throw DomainError(fmt::format("forecast end {} must lie after the anchor {}", end, t0));
    }
}

// Integral of the concave model's d ln Y/dt from `from` to each of `times`
// (sorted, all >= from). Steps are at most a month and never straddle a knot,
// so g_K is constant inside every step.
std::vector<double> concave_gain(const ComputePath& path, const scaling::ConcaveFit& fit, double training_share,
                                 double lambda_over_beta, double from, std::span<const double> times) {
    std::vector<double> breaks;
    breaks.reserve(times.size() + path.size() + 1);
    breaks.push_back(from);
    const double last = times.empty() ? from : times.back();
    for (const auto& k : path.knots()) {
        if (k.t > from && k.t < last) breaks.push_back(k.t);
    }
    for (double t : times) breaks.push_back(t);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double multiplier = 1.0 + lambda_over_beta;
    const auto rate = [&](double t, double g) {
        const double training = training_share * std::pow(10.0, path.log_interp(t));
        const double v = scaling::local_elasticity(fit, training) * multiplier * g;
        if (!std::isfinite(v)) {
            throw IntegrationError(fmt::format("concave forecast overflowed at t={}", t), t);
        }
        return v;
    };

    std::vector<double> out;
    out.reserve(times.size());
    std::size_t next = 0;
    double gain = 0.0;
    // Requested times equal to `from` have zero gain.
    while (next < times.size() && times[next] <= from) {
        out.push_back(0.0);
        ++next;
    }
    for (std::size_t b = 1; b < breaks.size(); ++b) {
        const double a = breaks[b - 1];
        const double z = breaks[b];
        const double g = path.growth_rate(0.5 * (a + z));
        const auto steps = static_cast<std::size_t>(std::ceil((z - a) / kMonth - kGridSlack));
        const double h = (z - a) / static_cast<double>(std::max<std::size_t>(steps, 1));
        for (std::size_t s = 0; s < std::max<std::size_t>(steps, 1); ++s) {
            const double t = a + h * static_cast<double>(s);
            const double k1 = rate(t, g);
            const double k2 = rate(t + h / 2, g);
            const double k4 = rate(t + h, g);
            // The right-hand side does not depend on ln Y, so k2 == k3.
            gain += h / 6 * (k1 + 4 * k2 + k4);
        }
        while (next < times.size() && times[next] <= z) {
            out.push_back(gain);
            ++next;
        }
    }
    return out;
}

}  // namespace

std::vector<Milestone> default_milestones() {
    return {
        {"1 hour", 60.0},
        {"1 work-day", 480.0},
        {"1 work-week", 2400.0},
        {"1 work-month", 10020.0},
    };
}

ComputePath flop_path(const TimeSeries& flop) {
    std::vector<Knot> knots;
    for (const auto& p : flop.points()) {
        if (!(p.value > 0.0)) {
            throw DomainError(fmt::format("compute must be positive (t={})", p.t));
        }
        knots.push_back({p.t, std::log10(p.value)});
    }
    return ComputePath(std::move(knots));
}

ComputePath usd_to_flop_path(const TimeSeries& usd, const TimeSeries& flop_per_usd_history) {
    if (flop_per_usd_history.back().t - flop_per_usd_history.front().t < 2.0) {
        throw InsufficientDataError("FLOP-per-dollar history must span at least 2 years");
    }
    const auto trend = fit_loglinear_trend(flop_per_usd_history, true);
    std::vector<Knot> knots;
    for (const auto& p : usd.points()) {
        if (!(p.value > 0.0)) {
            throw DomainError(fmt::format("spend must be positive (t={}, value={})", p.t, p.value));
        }
        knots.push_back({p.t, std::log10(p.value) + trend.at(p.t) / std::numbers::ln10});
    }
    return ComputePath(std::move(knots));
}

TimeSeries flop_per_usd_series(const std::vector<FlopPerUsdRecord>& rows) {
    std::vector<Sample> s;
    for (const auto& r : rows) s.push_back({r.year, r.flop_per_usd});
    std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    return TimeSeries(std::move(s));
}

ComputePath compute_path_from_spend(const std::vector<SpendRecord>& spend, const TimeSeries& flop_per_usd_history) {
    if (spend.empty()) throw InsufficientDataError("compute spend has no rows");
    const SpendUnit unit = spend.front().unit;
    std::vector<Sample> s;
    for (const auto& r : spend) {
        if (r.unit != unit) throw InputError("compute spend mixes 'flop' and 'usd' rows");
        s.push_back({r.year, r.value});
    }
    std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    TimeSeries series(std::move(s));
    return unit == SpendUnit::flop ? flop_path(series) : usd_to_flop_path(series, flop_per_usd_history);
}

std::vector<Sample> select_horizons(const std::vector<HorizonObservation>& obs, Reliability reliability,
                                    Window window) {
    std::vector<Sample> out;
    for (const auto& o : obs) {
        const auto minutes = o.minutes(reliability);
        if (!minutes) continue;
        if (o.release.year < window.start || o.release.year > window.end) continue;
        out.push_back({o.release.year, *minutes});
    }
    std::stable_sort(out.begin(), out.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    return out;
}

std::vector<double> monthly_grid(double t0, double end) {
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double t = t0 + static_cast<double>(k) * kMonth;
        if (t > end + kGridSlack) break;
        grid.push_back(t);
    }
    if (grid.back() < end - kGridSlack) grid.push_back(end);
    return grid;
}

CalibrationResult calibrate(const std::vector<HorizonObservation>& horizon_history,
                            const ComputePath& compute_history, Reliability reliability, Window window) {
    if (!(window.end > window.start)) {
        throw DomainError(fmt::format("calibration window [{}, {}] is empty", window.start, window.end));
    }
    const auto points = select_horizons(horizon_history, reliability, window);
    if (points.size() < 2) {
        throw InsufficientDataError(fmt::format("calibration needs at least 2 {} horizons in [{}, {}] (found {})",
                                                to_string(reliability), window.start, window.end, points.size()));
    }
    if (compute_history.start() > window.start || compute_history.end() < window.end) {
        throw CalibrationError(fmt::format("compute path [{}, {}] does not span the calibration window [{}, {}]",
                                           compute_history.start(), compute_history.end(), window.start,
                                           window.end));
    }

    std::vector<double> t;
    std::vector<double> y;
    for (const auto& p : points) {
        t.push_back(p.t);
        y.push_back(std::log(p.value));
    }
    const auto horizon_trend = fit_ols(t, y);

    const auto grid = monthly_grid(window.start, window.end);
    std::vector<double> log_k;
    for (double g : grid) log_k.push_back(compute_history.log_interp(g) * std::numbers::ln10);
    const auto compute_trend = fit_ols(grid, log_k);
    if (std::abs(compute_trend.slope) < 1e-12) {
        throw CalibrationError("past compute growth is zero; horizon/compute ratio is undefined");
    }

    CalibrationResult cal;
    cal.past_gY = horizon_trend.slope;
    cal.past_gK = compute_trend.slope;
    cal.c = cal.past_gY / cal.past_gK;
    cal.t0 = points.back().t;
    cal.y0 = std::exp(horizon_trend.at(cal.t0));
    cal.reliability = reliability;
    return cal;
}

TimeSeries trend_path(const CalibrationResult& cal, double end) {
    require_end_after(cal.t0, end);
    const double ly0 = std::log(cal.y0);
    std::vector<Sample> out;
    for (double t : monthly_grid(cal.t0, end)) out.push_back({t, std::exp(ly0 + cal.past_gY * (t - cal.t0))});
    return TimeSeries(std::move(out));
}

TimeSeries forecast_horizon(const CalibrationResult& cal, const ComputePath& future_compute, double end) {
    require_end_after(cal.t0, end);
    const double ly0 = std::log(cal.y0);
    const double base = future_compute.log_interp(cal.t0);
    std::vector<Sample> out;
    for (double t : monthly_grid(cal.t0, end)) {
        const double ly = ly0 + cal.c * std::numbers::ln10 * (future_compute.log_interp(t) - base);
        out.push_back({t, std::exp(ly)});
    }
    return TimeSeries(std::move(out));
}

TimeSeries forecast_horizon_concave(double t0, double y0, const ComputePath& future_compute,
                                    const scaling::ConcaveFit& fit, const growth::GrowthParams& p, double end) {
    require_end_after(t0, end);
    if (!(y0 > 0.0)) throw DomainError("anchor horizon must be positive");
    if (!(p.training_share > 0.0 && p.training_share <= 1.0)) {
        throw DomainError(fmt::format("training share must lie in (0, 1] (got {})", p.training_share));
    }
    const auto grid = monthly_grid(t0, end);
    const auto gain = concave_gain(future_compute, fit, p.training_share, p.lambda_over_beta, t0, grid);
    const double ly0 = std::log(y0);
    std::vector<Sample> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double y = std::exp(ly0 + gain[i]);
        if (!(y > 0.0) || !std::isfinite(y)) {
            throw IntegrationError(fmt::format("concave forecast left (0, inf) at t={}", grid[i]), grid[i]);
        }
        out.push_back({grid[i], y});
    }
    return TimeSeries(std::move(out));
}

double fit_lambda_over_beta_concave(std::span<const Sample> horizon_history, const ComputePath& compute_history,
                                    const scaling::ConcaveFit& fit, double training_share) {
    std::vector<Sample> points;
    for (const auto& s : horizon_history) {
        if (s.t >= compute_history.start() && s.t <= compute_history.end()) points.push_back(s);
    }
    if (points.size() < 2) {
        throw InsufficientDataError(fmt::format(
            "lambda/beta fit needs at least 2 horizon observations overlapping the compute history (found {})",
            points.size()));
    }
    std::stable_sort(points.begin(), points.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });

    // With lambda/beta = 0 the model's gain is J(t); in general it is (1 + lambda/beta) J(t),
    // so the least-squares multiplier is the OLS slope of ln Y on J.
    std::vector<double> times;
    std::vector<double> ly;
    for (const auto& p : points) {
        if (!(p.value > 0.0)) throw DomainError("horizon minutes must be positive");
        times.push_back(p.t);
        ly.push_back(std::log(p.value));
    }
    const auto j = concave_gain(compute_history, fit, training_share, 0.0, times.front(), times);
    double j_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        j_mean += j[i];
        y_mean += ly[i];
    }
    j_mean /= static_cast<double>(j.size());
    y_mean /= static_cast<double>(j.size());
    double sjj = 0.0;
    double sjy = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        sjj += (j[i] - j_mean) * (j[i] - j_mean);
        sjy += (j[i] - j_mean) * (ly[i] - y_mean);
    }
    if (!(sjj > 0.0)) {
        throw CalibrationError("compute history is flat over the horizon observations; lambda/beta unidentified");
    }
    return sjy / sjj - 1.0;
}

std::optional<double> milestone_date(const TimeSeries& path, double threshold_minutes) {
    if (!(threshold_minutes > 0.0)) throw DomainError("milestone threshold must be positive");
    const auto pts = path.points();
    if (pts.front().value >= threshold_minutes) return pts.front().t;
    const double target = std::log(threshold_minutes);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].value >= threshold_minutes) {
            const double a = std::log(pts[i - 1].value);
            const double b = std::log(pts[i].value);
            return pts[i - 1].t + (target - a) / (b - a) * (pts[i].t - pts[i - 1].t);
        }
    }
    return std::nullopt;
}

std::vector<MilestoneOutcome> milestone_delays(const TimeSeries& trend, const TimeSeries& forecast,
                                               const std::vector<Milestone>& milestones) {
    std::vector<MilestoneOutcome> out;
    out.reserve(milestones.size());
    for (const auto& m : milestones) {
        MilestoneOutcome o{m, milestone_date(trend, m.threshold_minutes),
                           milestone_date(forecast, m.threshold_minutes), std::nullopt};
        if (o.date_trend && o.date_forecast) o.delay_years = *o.date_forecast - *o.date_trend;
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace horizon::forecast
