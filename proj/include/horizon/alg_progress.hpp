#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"

#include "horizon/types.hpp"

namespace horizon::alg {

// Rows usable for the estimate: flagged as in-sample, with a horizon at the
// chosen reliability and a training-compute estimate.
struct PairedObservation {
    double t;
    double ln_horizon;
    double ln_flop;
};

std::vector<PairedObservation> paired_sample(const std::vector<HorizonObservation>& obs, Reliability reliability);

// gY / gamma - gC. Throws DomainError when gamma is zero.
double alg_progress_point(double gY, double gC, double gamma);

struct TrendSlopes {
    double gY;
    double gC;
};

// OLS slopes of ln horizon and ln training FLOP on release date.
TrendSlopes estimate_trend_slopes(std::span<const PairedObservation> sample);
TrendSlopes estimate_trend_slopes(const std::vector<HorizonObservation>& obs, Reliability reliability);

struct BootstrapOptions {
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;            // 0: hardware concurrency
    bool force_full_sample = false;  // every resample is the full sample, in order
    std::size_t max_retries = 1000;  // per resample, for degenerate rows or gamma* <= 0
};

struct AlgProgressEstimate {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_resamples = 0;
    std::uint64_t seed = 0;
    std::size_t rejected_draws = 0;        // gamma* <= 0
    std::size_t degenerate_resamples = 0;  // fewer than two distinct dates
};

// Paired bootstrap with gamma* ~ Normal(gamma_hat, gamma_se). Resample i draws
// from its own generator seeded by (seed, i), so the result does not depend on
// thread count. Percentile interval at 2.5 / 97.5.
AlgProgressEstimate bootstrap_ci(std::span<const PairedObservation> sample, double gamma_hat, double gamma_se,
                                 const BootstrapOptions& options);

// Linear interpolation between order statistics (type 7).
double percentile(std::vector<double> values, double q);

nlohmann::json to_json(const AlgProgressEstimate& e);

}  // namespace horizon::alg
