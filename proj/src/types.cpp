#include "horizon/types.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "horizon/errors.hpp"

namespace horizon {

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DomainError(fmt::format("invalid {} '{}' in date", what, s));
    }
    return v;
}

}  // namespace

Instant instant_from_ymd(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) {
        throw DomainError(fmt::format("invalid calendar date {}-{:02}-{:02}", year, month, day));
    }
    const sys_days jan1{std::chrono::year{year} / January / 1};
    const auto offset = (sys_days{ymd} - jan1).count();
    const double days_in_year = std::chrono::year{year}.is_leap() ? 366.0 : 365.0;
    return Instant{static_cast<double>(year) + static_cast<double>(offset) / days_in_year};
}

Instant instant_from_iso(std::string_view iso_date) {
    // YYYY-MM-DD; a trailing time component is ignored.
    if (iso_date.size() >= 10 && iso_date[4] == '-' && iso_date[7] == '-') {
        const int y = parse_int(iso_date.substr(0, 4), "year");
        const int m = parse_int(iso_date.substr(5, 2), "month");
        const int d = parse_int(iso_date.substr(8, 2), "day");
        if (m < 1 || d < 1) {
            throw DomainError(fmt::format("invalid ISO date '{}'", iso_date));
        }
        return instant_from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
    }
    throw DomainError(fmt::format("invalid ISO date '{}'", iso_date));
}

TimeSeries::TimeSeries(std::vector<Sample> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw DomainError("time series needs at least one point");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].t) || !std::isfinite(points_[i].value)) {
            throw DomainError(fmt::format("time series point {} is not finite", i));
        }
        if (i > 0 && !(points_[i].t > points_[i - 1].t)) {
            throw DomainError(fmt::format("time series times must be strictly increasing (duplicate or "
                                          "out-of-order t={} at index {})",
                                          points_[i].t, i));
        }
    }
}

std::vector<double> TimeSeries::times() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.t);
    return out;
}

std::vector<double> TimeSeries::values() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.value);
    return out;
}

std::string_view to_string(Reliability r) noexcept {
    return r == Reliability::p50 ? "p50" : "p80";
}

Reliability reliability_from_string(std::string_view s) {
    if (s == "p50") return Reliability::p50;
    if (s == "p80") return Reliability::p80;
    throw DomainError(fmt::format("unknown reliability '{}' (expected p50 or p80)", s));
}

ComputePath::ComputePath(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) {
        throw DomainError("compute path needs at least 2 knots");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!std::isfinite(knots_[i].t) || !std::isfinite(knots_[i].log10_flop)) {
            throw DomainError(fmt::format("compute path knot {} is not finite", i));
        }
        if (i > 0 && !(knots_[i].t > knots_[i - 1].t)) {
            throw DomainError(fmt::format("compute path years must be strictly increasing (knot {})", i));
        }
    }
}

std::size_t ComputePath::segment_index(double t) const noexcept {
    // Segment i spans [t_i, t_{i+1}); the last segment also covers everything beyond.
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                     [](double v, const Knot& k) { return v < k.t; });
    const auto idx = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    if (idx == 0) return 0;
    return std::min(idx - 1, knots_.size() - 2);
}

double ComputePath::segment_slope(std::size_t i) const noexcept {
    const auto& a = knots_[i];
    const auto& b = knots_[i + 1];
    return (b.log10_flop - a.log10_flop) / (b.t - a.t);
}

double ComputePath::log_interp(double t) const noexcept {
    const std::size_t i = segment_index(t);
    const auto& a = knots_[i];
    if (t == a.t) return a.log10_flop;
    if (t == knots_[i + 1].t) return knots_[i + 1].log10_flop;
    return a.log10_flop + segment_slope(i) * (t - a.t);
}

double ComputePath::growth_rate(double t) const noexcept {
    return segment_slope(segment_index(t)) * std::numbers::ln10;
}

ComputePath ComputePath::shifted(double delta) const {
    auto k = knots_;
    for (auto& knot : k) knot.log10_flop += delta;
    return ComputePath(std::move(k));
}

}  // namespace horizon
