#include "horizon/trend.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "horizon/errors.hpp"

namespace horizon {

LinearTrend fit_ols(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) {
        throw DomainError(fmt::format("fit_ols: {} times but {} values", t.size(), y.size()));
    }
    const std::size_t n = t.size();
    if (n < 2) {
        throw InsufficientDataError("trend fit needs at least 2 points with distinct times");
    }

    // Centre first; the raw-moment form loses digits at t ~ 2000.
    double t_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_mean += t[i];
        y_mean += y[i];
    }
    t_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);

    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = t[i] - t_mean;
        const double dy = y[i] - y_mean;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0)) {
        throw InsufficientDataError("trend fit needs at least 2 distinct times");
    }

    LinearTrend out;
    out.slope = sty / stt;
    out.intercept = y_mean - out.slope * t_mean;

    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (y_mean + out.slope * (t[i] - t_mean));
        ssr += r * r;
    }
    out.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return out;
}

LinearTrend fit_loglinear_trend(const TimeSeries& series, bool log_transform) {
    const auto t = series.times();
    auto y = series.values();
    if (log_transform) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (!(y[i] > 0.0)) {
                throw DomainError(
                    fmt::format("log-linear trend requires positive values (t={})", t[i]));
            }
            y[i] = std::log(y[i]);
        }
    }
    return fit_ols(t, y);
}

}  // namespace horizon
