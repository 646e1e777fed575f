#pragma once

#include <functional>
#include <optional>

#include "json.hpp"

#include "horizon/types.hpp"

namespace horizon::growth {

// dA/dt = k * A^(1 - beta) * E^lambda
struct JonesParams {
    double k = 1.0;
    double beta = 0.5;
    double lambda = 0.475;

    double lambda_over_beta() const noexcept { return lambda / beta; }
    void validate() const;
};

struct GrowthParams {
    double gamma = 0.454;            // d ln Y / d ln C holding algorithms fixed
    double lambda_over_beta = 0.95;
    double labor_share = 0.0;        // alpha in the compute-labor extension
    double training_share = 0.1;     // s_C; experiments take the rest

    double experiment_share() const noexcept { return 1.0 - training_share; }
    void validate() const;
};

struct AlgorithmState {
    double A;
    double t;
};

// Experimental compute as a function of decimal year.
using ComputeInput = std::function<double(double)>;

ComputeInput exponential_input(double e0, double growth, double t0);
// E(t) = s_E * 10^log_interp(path, t).
ComputeInput path_input(ComputePath path, double experiment_share);

double jones_rhs(const AlgorithmState& state, double experimental_compute, const JonesParams& p);

// Classical RK4 from (t0, A0) to t1 with step dt (the last step is shortened
// to land on t1). Throws IntegrationError if A leaves (0, inf).
TimeSeries simulate_jones(double a0, const ComputeInput& input, const JonesParams& p, double t0, double t1,
                          double dt);

// Long-run d ln A / dt under exponential input growth.
double steady_state_growth(double lambda_over_beta, double input_growth);
double steady_state_growth(const JonesParams& p, double input_growth);
double steady_state_growth(const GrowthParams& p, double input_growth);

// Years until g_A = d ln A / dt closes half of an initial gap to its steady
// state. Scale-free in k and the input level. Throws ComputeError if the gap
// has not halved within 100 years.
double convergence_half_life(const JonesParams& p, double input_growth, double initial_growth_gap);

// gamma * (1 + lambda/beta) * g_total
double horizon_growth(const GrowthParams& p, double g_total);

// gamma * (gC + lambda/beta * gE)
double horizon_growth_split(const GrowthParams& p, double g_training, double g_experiment);

// gamma * [(1 + lambda/beta * (1 - alpha)) * gEC + lambda/beta * alpha * gL]
double horizon_growth_with_labor(const GrowthParams& p, double g_compute, double g_labor);

// (s_E - lambda/beta * s_C) * (gC - gE)
double decomposition_error(const GrowthParams& p, double g_training, double g_experiment);

// Growth of E + C when shares are held at (s_C, s_E).
double total_compute_growth(const GrowthParams& p, double g_training, double g_experiment);

// Elasticity implied by observed horizon and compute growth: gY / (gK * (1 + lambda/beta)).
double implied_elasticity(double horizon_growth_rate, double compute_growth_rate, double lambda_over_beta);

// Simulator run description, read from JSON:
// {A0, k, beta, lambda, E0, gE | path, experiment_share?, t0, t1, dt}
struct JonesScenario {
    double a0 = 1.0;
    JonesParams params;
    double e0 = 1.0;
    std::optional<double> input_growth;
    std::optional<ComputePath> path;
    double experiment_share = 0.9;
    double t0 = 0.0;
    double t1 = 20.0;
    double dt = 0.01;

    ComputeInput input() const;
};

JonesScenario scenario_from_json(const nlohmann::json& j);

}  // namespace horizon::growth
