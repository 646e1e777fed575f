#pragma once

#include <span>

#include "horizon/types.hpp"

namespace horizon {

struct LinearTrend {
    double slope = 0.0;      // per year; natural-log units when log-transformed
    double intercept = 0.0;  // value (or ln value) at t = 0
    double r2 = 0.0;         // 1 when the series is fitted exactly, including constant series

    double at(double t) const noexcept { return intercept + slope * t; }
};

// Ordinary least squares of y on t. Requires at least two distinct t.
LinearTrend fit_ols(std::span<const double> t, std::span<const double> y);

// OLS of value (or ln value when `log_transform`) on t.
LinearTrend fit_loglinear_trend(const TimeSeries& series, bool log_transform);

}  // namespace horizon
