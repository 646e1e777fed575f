#include "horizon/scaling_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "horizon/errors.hpp"
#include "horizon/optimize.hpp"

namespace horizon::scaling {

namespace {

constexpr double kRhoLower = -2.0;
constexpr double kRhoUpper = 1.0;
constexpr double kRhoTolerance = 1e-6;
constexpr int kRhoGridPoints = 61;
constexpr int kMaxBracketExpansions = 4;

struct GroupIndex {
    std::vector<std::size_t> of;  // group index per observation
    std::vector<std::string> names;
    std::vector<std::size_t> counts;
};

GroupIndex index_groups(std::span<const std::string> groups) {
    GroupIndex g;
    std::unordered_map<std::string, std::size_t> ids;
    g.of.reserve(groups.size());
    for (const auto& key : groups) {
        auto [it, inserted] = ids.emplace(key, g.names.size());
        if (inserted) {
            g.names.push_back(key);
            g.counts.push_back(0);
        }
        g.of.push_back(it->second);
        ++g.counts[it->second];
    }
    return g;
}

std::vector<double> demean(std::span<const double> values, const GroupIndex& g) {
    std::vector<double> sums(g.names.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) sums[g.of[i]] += values[i];
    std::vector<double> out(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] -= sums[g.of[i]] / static_cast<double>(g.counts[g.of[i]]);
    }
    return out;
}

std::vector<std::string> group_keys(const std::vector<ModelBenchmarkObservation>& obs) {
    std::vector<std::string> keys;
    keys.reserve(obs.size());
    for (const auto& o : obs) keys.push_back(o.group_key());
    return keys;
}

std::vector<double> log_horizons(const std::vector<ModelBenchmarkObservation>& obs) {
    std::vector<double> y;
    y.reserve(obs.size());
    for (const auto& o : obs) y.push_back(std::log(o.horizon_minutes));
    return y;
}

void check_design(const std::vector<ModelBenchmarkObservation>& obs, std::size_t extra_params) {
    const auto keys = group_keys(obs);
    const auto g = index_groups(keys);
    if (obs.size() < g.names.size() + extra_params) {
        throw InsufficientDataError(fmt::format("{} observations cannot identify {} group constants plus {} "
                                                "slope parameter(s)",
                                                obs.size(), g.names.size(), extra_params));
    }
    if (std::none_of(g.counts.begin(), g.counts.end(), [](std::size_t c) { return c >= 2; })) {
        throw InsufficientDataError("every group has a single observation; no within-group variation");
    }
}

double clustered_se(const SlopeRegression& reg, const std::vector<ModelBenchmarkObservation>& obs,
                    std::size_t n_groups) {
    std::map<std::string, double> scores;
    double sxx = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        scores[obs[i].family] += reg.x_resid[i] * reg.residuals[i];
        sxx += reg.x_resid[i] * reg.x_resid[i];
    }
    const double n = static_cast<double>(obs.size());
    const double k = static_cast<double>(n_groups + 1);
    const double clusters = static_cast<double>(scores.size());
    if (clusters < 2.0 || n <= k) return std::numeric_limits<double>::quiet_NaN();
    double meat = 0.0;
    for (const auto& [family, s] : scores) meat += s * s;
    // CR1 small-sample factor.
    const double correction = clusters / (clusters - 1.0) * (n - 1.0) / (n - k);
    return std::sqrt(correction * meat) / sxx;
}

ConcaveFit concave_at(const std::vector<double>& log_compute, const std::vector<double>& y,
                      const std::vector<std::string>& keys, double rho) {
    double centre = 0.0;
    for (double v : log_compute) centre += v;
    centre /= static_cast<double>(log_compute.size());

    std::vector<double> x(log_compute.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = boxcox(std::exp(log_compute[i] - centre), rho);
    auto reg = fit_within(x, y, keys);

    ConcaveFit fit;
    fit.rho = rho;
    fit.beta_coef = reg.slope * std::exp(-rho * centre);
    const double shift = reg.slope * boxcox(std::exp(-centre), rho);
    for (auto& [k, v] : reg.intercepts) fit.intercepts[k] = v + shift;
    fit.partial_r2 = reg.partial_r2;
    fit.n_obs = y.size();
    fit.n_groups = fit.intercepts.size();
    return fit;
}

}  // namespace

std::string_view to_string(ComputeTransform t) noexcept {
    return t == ComputeTransform::raw ? "raw" : "chinchilla";
}

ComputeTransform transform_from_string(std::string_view s) {
    if (s == "raw") return ComputeTransform::raw;
    if (s == "chinchilla" || s == "chinchilla_adjusted") return ComputeTransform::chinchilla_adjusted;
    throw DomainError(fmt::format("unknown compute transform '{}' (expected raw or chinchilla)", s));
}

double boxcox(double x, double rho) {
    if (!(x > 0.0)) {
        throw DomainError(fmt::format("boxcox requires x > 0 (got {})", x));
    }
    const double l = std::log(x);
    if (rho == 0.0) return l;
    const double z = rho * l;
    if (std::abs(rho) < 1e-6) {
        return l * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
    }
    return std::expm1(z) / rho;
}

std::vector<double> demean_by_group(std::span<const double> values, std::span<const std::string> groups) {
    if (values.size() != groups.size()) {
        throw DomainError(
            fmt::format("demean_by_group: {} values but {} group keys", values.size(), groups.size()));
    }
    return demean(values, index_groups(groups));
}

SlopeRegression fit_within(std::span<const double> x, std::span<const double> y,
                           std::span<const std::string> groups) {
    if (x.size() != y.size() || x.size() != groups.size()) {
        throw DomainError("fit_within: regressor, response and group lengths differ");
    }
    const auto g = index_groups(groups);
    SlopeRegression out;
    out.x_resid = demean(x, g);
    const auto y_resid = demean(y, g);

    double sxx = 0.0;
    double sxy = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += out.x_resid[i] * out.x_resid[i];
        sxy += out.x_resid[i] * y_resid[i];
        scale += x[i] * x[i];
    }
    if (!(sxx > 1e-24 * std::max(scale, 1.0))) {
        throw InsufficientDataError("slope unidentified: compute is constant within every group");
    }
    out.slope = sxy / sxx;

    out.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.residuals[i] = y_resid[i] - out.slope * out.x_resid[i];
        out.ssr += out.residuals[i] * out.residuals[i];
        out.sst_within += y_resid[i] * y_resid[i];
    }
    out.partial_r2 = out.sst_within > 0.0 ? std::clamp(1.0 - out.ssr / out.sst_within, 0.0, 1.0) : 1.0;

    std::vector<double> sums(g.names.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) sums[g.of[i]] += y[i] - out.slope * x[i];
    for (std::size_t k = 0; k < g.names.size(); ++k) {
        out.intercepts[g.names[k]] = sums[k] / static_cast<double>(g.counts[k]);
    }
    return out;
}

std::vector<double> transformed_compute(const std::vector<ModelBenchmarkObservation>& obs,
                                        ComputeTransform transform, const chinchilla::Params& params) {
    std::vector<double> out;
    out.reserve(obs.size());
    for (const auto& o : obs) {
        const double c = transform == ComputeTransform::raw
                             ? o.training_flop
                             : chinchilla::equivalent_optimal_compute(params, o.params_count, o.tokens_count);
        out.push_back(std::log(c));
    }
    return out;
}

SharedSlopeFit fit_shared_slope(const std::vector<ModelBenchmarkObservation>& obs,
                                ComputeTransform transform, const chinchilla::Params& params) {
    check_design(obs, 1);
    const auto keys = group_keys(obs);
    const auto x = transformed_compute(obs, transform, params);
    const auto y = log_horizons(obs);
    const auto reg = fit_within(x, y, keys);

    SharedSlopeFit fit;
    fit.gamma = reg.slope;
    fit.intercepts = reg.intercepts;
    fit.partial_r2 = reg.partial_r2;
    fit.n_obs = obs.size();
    fit.n_groups = reg.intercepts.size();
    fit.se_gamma_clustered = clustered_se(reg, obs, fit.n_groups);
    fit.transform = transform;
    return fit;
}

ConcaveFit fit_concave_fixed_rho(const std::vector<ModelBenchmarkObservation>& obs,
                                 ComputeTransform transform, double rho, const chinchilla::Params& params) {
    check_design(obs, 1);
    auto fit = concave_at(transformed_compute(obs, transform, params), log_horizons(obs), group_keys(obs), rho);
    fit.transform = transform;
    return fit;
}

ConcaveFit fit_concave(const std::vector<ModelBenchmarkObservation>& obs, ComputeTransform transform,
                       const chinchilla::Params& params) {
    check_design(obs, 2);
    const auto keys = group_keys(obs);
    const auto log_compute = transformed_compute(obs, transform, params);
    const auto y = log_horizons(obs);

    double centre = 0.0;
    for (double v : log_compute) centre += v;
    centre /= static_cast<double>(log_compute.size());

    const auto profile_ssr = [&](double rho) {
        std::vector<double> x(log_compute.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = boxcox(std::exp(log_compute[i] - centre), rho);
        return fit_within(x, y, keys).ssr;
    };

    // Coarse scan locates the basin; golden-section refines inside it. A
    // minimum on the scan boundary widens the range on that side.
    double lo = kRhoLower;
    double hi = kRhoUpper;
    for (int expansion = 0;; ++expansion) {
        const double step = (hi - lo) / (kRhoGridPoints - 1);
        std::size_t best = 0;
        double best_ssr = std::numeric_limits<double>::infinity();
        for (int k = 0; k < kRhoGridPoints; ++k) {
            const double s = profile_ssr(lo + step * k);
            if (s < best_ssr) {
                best_ssr = s;
                best = static_cast<std::size_t>(k);
            }
        }
        const bool at_lower = best == 0;
        const bool at_upper = best == kRhoGridPoints - 1;
        if (!at_lower && !at_upper) {
            const double a = lo + step * static_cast<double>(best - 1);
            const double b = lo + step * static_cast<double>(best + 1);
            const auto m = golden_section_minimize(profile_ssr, a, b, kRhoTolerance);
            auto fit = concave_at(log_compute, y, keys, m.x);
            fit.transform = transform;
            return fit;
        }
        if (expansion >= kMaxBracketExpansions) {
            throw SolverError(fmt::format("concave fit did not converge: profiled SSR still minimised at the "
                                          "rho search boundary {} after {} bracket expansions (range [{}, {}], "
                                          "SSR {})",
                                          at_lower ? lo : hi, expansion, lo, hi, best_ssr));
        }
        const double width = hi - lo;
        if (at_lower) {
            lo -= width;
        } else {
            hi += width;
        }
    }
}

double local_elasticity(const ConcaveFit& fit, double compute) {
    if (!(compute > 0.0)) {
        throw DomainError(fmt::format("local_elasticity requires compute > 0 (got {})", compute));
    }
    return fit.beta_coef * std::pow(compute, fit.rho);
}

namespace {

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const SharedSlopeFit& fit) {
    return {
        {"model", "shared_slope"},
        {"gamma", fit.gamma},
        {"intercepts", fit.intercepts},
        {"partial_r2", fit.partial_r2},
        {"se", number_or_null(fit.se_gamma_clustered)},
        {"cluster", "family"},
        {"n_obs", fit.n_obs},
        {"n_groups", fit.n_groups},
        {"transform", to_string(fit.transform)},
    };
}

nlohmann::json to_json(const ConcaveFit& fit) {
    return {
        {"model", "concave"},
        {"beta_coef", fit.beta_coef},
        {"rho", fit.rho},
        {"intercepts", fit.intercepts},
        {"partial_r2", fit.partial_r2},
        {"se", nullptr},
        {"n_obs", fit.n_obs},
        {"n_groups", fit.n_groups},
        {"transform", to_string(fit.transform)},
    };
}

}  // namespace horizon::scaling
