#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace horizon {

// Decimal calendar year; 2025.0 is 2025-01-01T00:00.
struct Instant {
    double year = 0.0;

    friend auto operator<=>(const Instant&, const Instant&) = default;
};

// Leap-aware: day-of-year offset divided by the number of days in that year.
Instant instant_from_iso(std::string_view iso_date);
Instant instant_from_ymd(int year, unsigned month, unsigned day);

struct Sample {
    double t;
    double value;
};

// Ordered samples with strictly increasing t and finite values.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<Sample> points);

    std::span<const Sample> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    const Sample& front() const noexcept { return points_.front(); }
    const Sample& back() const noexcept { return points_.back(); }

    std::vector<double> times() const;
    std::vector<double> values() const;

private:
    std::vector<Sample> points_;
};

enum class Reliability { p50, p80 };

std::string_view to_string(Reliability r) noexcept;
Reliability reliability_from_string(std::string_view s);

struct HorizonObservation {
    std::string model_id;
    std::string developer;
    Instant release;
    std::optional<double> p50_minutes;
    std::optional<double> p80_minutes;
    std::optional<double> training_flop;
    // Fixture-level sample flag for the algorithmic-progress estimate.
    bool alg_progress_sample = true;

    std::optional<double> minutes(Reliability r) const noexcept {
        return r == Reliability::p50 ? p50_minutes : p80_minutes;
    }
};

struct ModelBenchmarkObservation {
    std::string family;
    std::string model_id;
    std::string benchmark;
    double params_count = 0.0;
    double tokens_count = 0.0;
    double training_flop = 0.0;
    double horizon_minutes = 0.0;

    // Regression group: algorithms are shared within a family, so intercepts
    // are per (family, benchmark).
    std::string group_key() const { return family + "/" + benchmark; }
};

struct Knot {
    double t;
    double log10_flop;
};

// Piecewise-linear total R&D compute path in (decimal year, log10 FLOP).
class ComputePath {
public:
    explicit ComputePath(std::vector<Knot> knots);

    std::span<const Knot> knots() const noexcept { return knots_; }
    std::size_t size() const noexcept { return knots_.size(); }
    double start() const noexcept { return knots_.front().t; }
    double end() const noexcept { return knots_.back().t; }

    // Linear in each segment; outside the knots the edge segment's slope continues.
    double log_interp(double t) const noexcept;

    // Natural-log growth rate per year; right-hand segment slope at interior knots.
    double growth_rate(double t) const noexcept;

    // Adds `delta` log10 units to every knot.
    ComputePath shifted(double delta) const;

private:
    std::size_t segment_index(double t) const noexcept;
    double segment_slope(std::size_t i) const noexcept;

    std::vector<Knot> knots_;
};

}  // namespace horizon
