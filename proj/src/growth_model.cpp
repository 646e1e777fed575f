#include "horizon/growth_model.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "horizon/errors.hpp"

namespace horizon::growth {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(fmt::format("{} must be positive and finite (got {})", name, v));
    }
}

constexpr double kHalfLifeStep = 1e-3;
constexpr double kHalfLifeHorizon = 100.0;

}  // namespace

void JonesParams::validate() const {
    require_positive(k, "k");
    require_positive(beta, "beta");
    require_positive(lambda, "lambda");
}

void GrowthParams::validate() const {
    if (!std::isfinite(gamma)) throw DomainError("gamma must be finite");
    require_positive(lambda_over_beta, "lambda_over_beta");
    if (!(labor_share >= 0.0 && labor_share < 1.0)) {
        throw DomainError(fmt::format("labor_share must lie in [0, 1) (got {})", labor_share));
    }
    if (!(training_share > 0.0 && training_share < 1.0)) {
        throw DomainError(fmt::format("training_share must lie in (0, 1) (got {})", training_share));
    }
}

ComputeInput exponential_input(double e0, double growth, double t0) {
    require_positive(e0, "E0");
    return [=](double t) { return e0 * std::exp(growth * (t - t0)); };
}

ComputeInput path_input(ComputePath path, double experiment_share) {
    if (!(experiment_share > 0.0 && experiment_share < 1.0)) {
        throw DomainError(fmt::format("experiment_share must lie in (0, 1) (got {})", experiment_share));
    }
    return [path = std::move(path), experiment_share](double t) {
        return experiment_share * std::pow(10.0, path.log_interp(t));
    };
}

double jones_rhs(const AlgorithmState& state, double experimental_compute, const JonesParams& p) {
    return p.k * std::pow(state.A, 1.0 - p.beta) * std::pow(experimental_compute, p.lambda);
}

TimeSeries simulate_jones(double a0, const ComputeInput& input, const JonesParams& p, double t0, double t1,
                          double dt) {
    p.validate();
    require_positive(a0, "A0");
    require_positive(dt, "dt");
    if (!(t1 > t0)) throw DomainError(fmt::format("simulation span [{}, {}] is empty", t0, t1));

    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9));
    const double h = (t1 - t0) / static_cast<double>(steps);
    const auto f = [&](double t, double a) { return jones_rhs({a, t}, input(t), p); };

    std::vector<Sample> out;
    out.reserve(steps + 1);
    out.push_back({t0, a0});
    double a = a0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = t0 + h * static_cast<double>(i);
        const double k1 = f(t, a);
        const double k2 = f(t + h / 2, a + h / 2 * k1);
        const double k3 = f(t + h / 2, a + h / 2 * k2);
        const double k4 = f(t + h, a + h * k3);
        a += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        const double t_next = i + 1 == steps ? t1 : t0 + h * static_cast<double>(i + 1);
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw IntegrationError(fmt::format("algorithm state left (0, inf) at t={}", t_next), t_next);
        }
        out.push_back({t_next, a});
    }
    return TimeSeries(std::move(out));
}

double steady_state_growth(double lambda_over_beta, double input_growth) {
    return lambda_over_beta * input_growth;
}

double steady_state_growth(const JonesParams& p, double input_growth) {
    return steady_state_growth(p.lambda_over_beta(), input_growth);
}

double steady_state_growth(const GrowthParams& p, double input_growth) {
    return steady_state_growth(p.lambda_over_beta, input_growth);
}

double convergence_half_life(const JonesParams& p, double input_growth, double initial_growth_gap) {
    p.validate();
    require_positive(input_growth, "input growth");
    if (initial_growth_gap == 0.0) return 0.0;

    const double target = steady_state_growth(p, input_growth);
    const double g0 = target + initial_growth_gap;
    if (!(g0 > 0.0)) {
        throw DomainError(fmt::format("initial growth {} must stay positive", g0));
    }

    // State u = ln A with E(t) = exp(gE t); then g_A = k exp(-beta u) E^lambda.
    const auto growth_at = [&](double t, double u) {
        return p.k * std::exp(-p.beta * u + p.lambda * input_growth * t);
    };
    double u = (std::log(p.k) - std::log(g0)) / p.beta;
    double t = 0.0;
    const double half = std::abs(initial_growth_gap) / 2.0;
    double prev_gap = std::abs(initial_growth_gap);
    const double h = kHalfLifeStep;
    while (t < kHalfLifeHorizon) {
        const double k1 = growth_at(t, u);
        const double k2 = growth_at(t + h / 2, u + h / 2 * k1);
        const double k3 = growth_at(t + h / 2, u + h / 2 * k2);
        const double k4 = growth_at(t + h, u + h * k3);
        u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
        const double gap = std::abs(growth_at(t, u) - target);
        if (!std::isfinite(gap)) {
            throw IntegrationError(fmt::format("growth rate diverged at t={}", t), t);
        }
        if (gap <= half) {
            return t - h + h * (prev_gap - half) / (prev_gap - gap);
        }
        prev_gap = gap;
    }
    throw ComputeError(fmt::format("growth gap did not halve within {} years", kHalfLifeHorizon));
}

double horizon_growth(const GrowthParams& p, double g_total) {
    return p.gamma * (1.0 + p.lambda_over_beta) * g_total;
}

double horizon_growth_split(const GrowthParams& p, double g_training, double g_experiment) {
    return p.gamma * (g_training + p.lambda_over_beta * g_experiment);
}

double horizon_growth_with_labor(const GrowthParams& p, double g_compute, double g_labor) {
    const double lb = p.lambda_over_beta;
    const double alpha = p.labor_share;
    return p.gamma * ((1.0 + lb * (1.0 - alpha)) * g_compute + lb * alpha * g_labor);
}

double decomposition_error(const GrowthParams& p, double g_training, double g_experiment) {
    return (p.experiment_share() - p.lambda_over_beta * p.training_share) * (g_training - g_experiment);
}

double total_compute_growth(const GrowthParams& p, double g_training, double g_experiment) {
    return p.training_share * g_training + p.experiment_share() * g_experiment;
}

double implied_elasticity(double horizon_growth_rate, double compute_growth_rate, double lambda_over_beta) {
    const double denom = compute_growth_rate * (1.0 + lambda_over_beta);
    if (denom == 0.0) throw CalibrationError("compute growth is zero; elasticity is unidentified");
    return horizon_growth_rate / denom;
}

ComputeInput JonesScenario::input() const {
    if (path) return path_input(*path, experiment_share);
    return exponential_input(e0, input_growth.value_or(0.0), t0);
}

JonesScenario scenario_from_json(const nlohmann::json& j) {
    JonesScenario s;
    try {
        s.a0 = j.value("A0", s.a0);
        s.params.k = j.value("k", s.params.k);
        s.params.beta = j.value("beta", s.params.beta);
        s.params.lambda = j.value("lambda", s.params.lambda);
        s.e0 = j.value("E0", s.e0);
        s.experiment_share = j.value("experiment_share", s.experiment_share);
        s.t0 = j.value("t0", s.t0);
        s.t1 = j.value("t1", s.t1);
        s.dt = j.value("dt", s.dt);
        if (j.contains("gE")) s.input_growth = j.at("gE").get<double>();
        if (j.contains("path")) {
            std::vector<Knot> knots;
            for (const auto& k : j.at("path")) {
                const double value = k.at("value").get<double>();
                require_positive(value, "path value");
                knots.push_back({k.at("year").get<double>(), std::log10(value)});
            }
            s.path = ComputePath(std::move(knots));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(fmt::format("invalid simulation scenario: {}", e.what()));
    }
    if (!s.input_growth && !s.path) {
        throw InputError("simulation scenario needs either 'gE' or 'path'");
    }
    s.params.validate();
    return s;
}

}  // namespace horizon::growth
