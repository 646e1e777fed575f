#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "horizon/chinchilla.hpp"
#include "horizon/types.hpp"

namespace horizon::scaling {

enum class ComputeTransform { raw, chinchilla_adjusted };

std::string_view to_string(ComputeTransform t) noexcept;
ComputeTransform transform_from_string(std::string_view s);

// Elasticity of horizon with respect to training compute, one slope shared by
// all (family, benchmark) groups.
struct SharedSlopeFit {
    double gamma = 0.0;
    std::map<std::string, double> intercepts;
    double partial_r2 = 0.0;
    double se_gamma_clustered = 0.0;  // clustered by model family
    std::size_t n_obs = 0;
    std::size_t n_groups = 0;
    ComputeTransform transform = ComputeTransform::raw;
};

// ln Y = group constant + beta_coef * boxcox(C, rho), C in FLOP.
struct ConcaveFit {
    double beta_coef = 0.0;
    double rho = 0.0;
    std::map<std::string, double> intercepts;
    double partial_r2 = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_groups = 0;
    ComputeTransform transform = ComputeTransform::raw;
};

// (x^rho - 1) / rho, with the ln x limit at rho = 0 and a series form for |rho| < 1e-6.
double boxcox(double x, double rho);

// Each value minus the mean of its group.
std::vector<double> demean_by_group(std::span<const double> values, std::span<const std::string> groups);

// Generic shared-slope regression over pre-transformed regressors.
struct SlopeRegression {
    double slope = 0.0;
    std::map<std::string, double> intercepts;
    double partial_r2 = 0.0;
    double ssr = 0.0;
    double sst_within = 0.0;
    std::vector<double> x_resid;  // demeaned regressor
    std::vector<double> residuals;
};

SlopeRegression fit_within(std::span<const double> x, std::span<const double> y,
                           std::span<const std::string> groups);

// Regressor values per observation: ln of training compute (raw) or of the
// compute-optimal equivalent.
std::vector<double> transformed_compute(const std::vector<ModelBenchmarkObservation>& obs,
                                        ComputeTransform transform,
                                        const chinchilla::Params& params = {});

SharedSlopeFit fit_shared_slope(const std::vector<ModelBenchmarkObservation>& obs,
                                ComputeTransform transform, const chinchilla::Params& params = {});

ConcaveFit fit_concave(const std::vector<ModelBenchmarkObservation>& obs, ComputeTransform transform,
                       const chinchilla::Params& params = {});

// Same model with rho held fixed; rho = 0 reproduces fit_shared_slope.
ConcaveFit fit_concave_fixed_rho(const std::vector<ModelBenchmarkObservation>& obs,
                                 ComputeTransform transform, double rho,
                                 const chinchilla::Params& params = {});

double local_elasticity(const ConcaveFit& fit, double compute);

nlohmann::json to_json(const SharedSlopeFit& fit);
nlohmann::json to_json(const ConcaveFit& fit);

}  // namespace horizon::scaling
