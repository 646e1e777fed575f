#include "horizon/alg_progress.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "horizon/errors.hpp"
#include "horizon/trend.hpp"

namespace horizon::alg {

namespace {

std::mt19937_64 resample_engine(std::uint64_t seed, std::size_t index) {
    const auto i = static_cast<std::uint64_t>(index);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    return std::mt19937_64(seq);
}

bool has_two_dates(std::span<const PairedObservation> s) {
    for (const auto& o : s) {
        if (o.t != s.front().t) return true;
    }
    return false;
}

struct Draw {
    double value = 0.0;
    std::size_t rejected = 0;
    std::size_t degenerate = 0;
};

Draw one_resample(std::span<const PairedObservation> sample, double gamma_hat, double gamma_se,
                  const BootstrapOptions& options, std::size_t index) {
    auto rng = resample_engine(options.seed, index);
    std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
    std::normal_distribution<double> gamma_dist(gamma_hat, gamma_se);

    Draw d;
    std::vector<PairedObservation> rows(sample.size());
    for (std::size_t attempt = 0;; ++attempt) {
        if (attempt > options.max_retries) {
            throw ComputeError(fmt::format("resample {} stayed degenerate after {} retries", index,
                                           options.max_retries));
        }
        if (options.force_full_sample) {
            std::copy(sample.begin(), sample.end(), rows.begin());
        } else {
            for (auto& r : rows) r = sample[pick(rng)];
        }
        if (has_two_dates(rows)) break;
        ++d.degenerate;
    }

    double gamma = gamma_hat;
    if (gamma_se > 0.0) {
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt > options.max_retries) {
                throw ComputeError(fmt::format("gamma draws for resample {} stayed non-positive after {} retries",
                                               index, options.max_retries));
            }
            gamma = gamma_dist(rng);
            if (gamma > 0.0) break;
            ++d.rejected;
        }
    }
    const auto slopes = estimate_trend_slopes(rows);
    d.value = alg_progress_point(slopes.gY, slopes.gC, gamma);
    return d;
}

}  // namespace

std::vector<PairedObservation> paired_sample(const std::vector<HorizonObservation>& obs, Reliability reliability) {
    std::vector<PairedObservation> out;
    for (const auto& o : obs) {
        const auto minutes = o.minutes(reliability);
        if (!o.alg_progress_sample || !minutes || !o.training_flop) continue;
        out.push_back({o.release.year, std::log(*minutes), std::log(*o.training_flop)});
    }
    return out;
}

double alg_progress_point(double gY, double gC, double gamma) {
    if (gamma == 0.0) throw DomainError("gamma must be nonzero");
    return gY / gamma - gC;
}

TrendSlopes estimate_trend_slopes(std::span<const PairedObservation> sample) {
    if (sample.size() < 2) {
        throw InsufficientDataError(
            fmt::format("need at least 2 observations with horizon and compute (found {})", sample.size()));
    }
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> c;
    for (const auto& o : sample) {
        t.push_back(o.t);
        y.push_back(o.ln_horizon);
        c.push_back(o.ln_flop);
    }
    return {fit_ols(t, y).slope, fit_ols(t, c).slope};
}

TrendSlopes estimate_trend_slopes(const std::vector<HorizonObservation>& obs, Reliability reliability) {
    return estimate_trend_slopes(paired_sample(obs, reliability));
}

AlgProgressEstimate bootstrap_ci(std::span<const PairedObservation> sample, double gamma_hat, double gamma_se,
                                 const BootstrapOptions& options) {
    if (options.n < 1) throw DomainError("bootstrap needs at least one resample");
    if (!(gamma_se >= 0.0) || !std::isfinite(gamma_se)) {
        throw DomainError(fmt::format("gamma_se must be finite and non-negative (got {})", gamma_se));
    }
    if (!(gamma_hat > 0.0)) throw DomainError(fmt::format("gamma_hat must be positive (got {})", gamma_hat));
    if (!has_two_dates(sample)) {
        throw InsufficientDataError("bootstrap sample needs at least 2 distinct release dates");
    }

    const auto full = estimate_trend_slopes(sample);
    AlgProgressEstimate est;
    est.point = alg_progress_point(full.gY, full.gC, gamma_hat);
    est.n_resamples = options.n;
    est.seed = options.seed;

    std::vector<Draw> draws(options.n);
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, options.n));
    std::vector<std::exception_ptr> failures(threads);
    const auto work = [&](unsigned w) {
        try {
            for (std::size_t i = w; i < options.n; i += threads) {
                draws[i] = one_resample(sample, gamma_hat, gamma_se, options, i);
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    std::vector<double> values;
    values.reserve(draws.size());
    for (const auto& d : draws) {
        values.push_back(d.value);
        est.rejected_draws += d.rejected;
        est.degenerate_resamples += d.degenerate;
    }
    est.ci_low = percentile(values, 0.025);
    est.ci_high = percentile(std::move(values), 0.975);
    return est;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw InsufficientDataError("percentile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError(fmt::format("quantile {} outside [0, 1]", q));
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

nlohmann::json to_json(const AlgProgressEstimate& e) {
    return {
        {"point", e.point},
        {"ci", {e.ci_low, e.ci_high}},
        {"n", e.n_resamples},
        {"seed", e.seed},
        {"rejected_draws", e.rejected_draws},
        {"degenerate_resamples", e.degenerate_resamples},
    };
}

}  // namespace horizon::alg
