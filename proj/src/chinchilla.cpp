#include "horizon/chinchilla.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "horizon/errors.hpp"
#include "horizon/optimize.hpp"

namespace horizon::chinchilla {

namespace {

constexpr double kLogNTolerance = 1e-8;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(fmt::format("{} must be positive and finite (got {})", name, v));
    }
}

}  // namespace

void Params::validate() const {
    require_positive(irreducible_loss, "irreducible_loss");
    require_positive(coef_params, "coef_params");
    require_positive(coef_tokens, "coef_tokens");
    if (!(exp_params > 0.0 && exp_params < 1.0)) {
        throw DomainError(fmt::format("exp_params must lie in (0, 1) (got {})", exp_params));
    }
    if (!(exp_tokens > 0.0 && exp_tokens < 1.0)) {
        throw DomainError(fmt::format("exp_tokens must lie in (0, 1) (got {})", exp_tokens));
    }
}

double loss(const Params& p, double n_params, double n_tokens) {
    require_positive(n_params, "n_params");
    require_positive(n_tokens, "n_tokens");
    return p.irreducible_loss + p.coef_params * std::pow(n_params, -p.exp_params) +
           p.coef_tokens * std::pow(n_tokens, -p.exp_tokens);
}

double raw_compute(double n_params, double n_tokens) {
    return 6.0 * n_params * n_tokens;
}

Allocation optimal_compute_for_loss(const Params& p, double target_loss) {
    p.validate();
    const double reducible = target_loss - p.irreducible_loss;
    if (!(reducible > 0.0) || !std::isfinite(target_loss)) {
        throw InfeasibleError(fmt::format("target loss {} is not above the irreducible loss {}",
                                          target_loss, p.irreducible_loss));
    }
    const double a = p.exp_params;
    const double b = p.exp_tokens;

    // Work in x = ln N. D exists only while the parameter term leaves room: x > x_min.
    const double x_min = std::log(p.coef_params / reducible) / a;
    const auto slack = [&](double x) { return reducible - p.coef_params * std::exp(-a * x); };
    const auto log_tokens = [&](double x) { return (std::log(p.coef_tokens) - std::log(slack(x))) / b; };
    const auto objective = [&](double x) {
        const double s = slack(x);
        if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
        return x + log_tokens(x);
    };
    // d/dx ln(N D); increasing in x, so its sign change brackets the minimum.
    const auto derivative = [&](double x) {
        const double param_term = p.coef_params * std::exp(-a * x);
        return 1.0 - (a / b) * param_term / (reducible - param_term);
    };

    double width = 1.0;
    int expansions = 0;
    while (!(derivative(x_min + width) > 0.0)) {
        width *= 2.0;
        if (++expansions > 200) {
            throw SolverError("optimal_compute_for_loss: bracket expansion failed");
        }
    }
    const auto m = golden_section_minimize(objective, x_min, x_min + width, kLogNTolerance);

    Allocation out{};
    out.n_params = std::exp(m.x);
    out.n_tokens = std::exp(log_tokens(m.x));
    out.flop = raw_compute(out.n_params, out.n_tokens);
    return out;
}

double equivalent_optimal_compute(const Params& p, double n_params, double n_tokens) {
    return optimal_compute_for_loss(p, loss(p, n_params, n_tokens)).flop;
}

}  // namespace horizon::chinchilla
