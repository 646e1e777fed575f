#pragma once

namespace horizon::chinchilla {

// Parametric loss E0 + A0 * N^-a + B0 * D^-b. Defaults are the Hoffmann et al. fit.
struct Params {
    double irreducible_loss = 1.69;  // E0
    double coef_params = 406.4;      // A0
    double coef_tokens = 410.7;      // B0
    double exp_params = 0.34;        // a
    double exp_tokens = 0.28;        // b

    // Throws DomainError unless all constants are positive and the exponents lie in (0, 1).
    void validate() const;
};

struct Allocation {
    double flop;
    double n_params;
    double n_tokens;
};

double loss(const Params& p, double n_params, double n_tokens);

// 6 * N * D.
double raw_compute(double n_params, double n_tokens);

// Cheapest 6ND allocation reaching `target_loss`. Golden-section search over
// ln N; D follows from the loss constraint. Throws InfeasibleError when
// target_loss <= E0.
Allocation optimal_compute_for_loss(const Params& p, double target_loss);

// Compute a compute-optimal run would need to match the loss of (N, D).
double equivalent_optimal_compute(const Params& p, double n_params, double n_tokens);

}  // namespace horizon::chinchilla
