#pragma once

#include <functional>

#include "twostage/gaussian.hpp"

namespace twostage {

// Population size: finite N >= 2 or the infinite-population limit.
struct Population {
    bool is_infinite = true;
    int n = 0;

    static Population infinite() { return Population{true, 0}; }
    static Population finite(int n);
};

// Game primitives: signal noise sigma, discount gamma, population.
struct ModelParams {
    double sigma;
    double gamma;
    Population population = Population::infinite();

    ModelParams(double sigma, double gamma,
                Population population = Population::infinite());

    // Threshold uniqueness is guaranteed for sigma^2 < 2*pi.
    bool unique_guarantee() const;
};

struct Bracket {
    double low;
    double high;
};

struct EquilibriumSolution {
    double tau_star;
    double residual;
    Bracket bracket;   // delta(low) > 0 > delta(high)
    int iterations;    // delta evaluations consumed
    bool unique;
};

// Indifference function of the two-stage game: expected gain from acting
// in the first stage rather than delaying, for an agent with signal tau.
double delta_two_stage(double tau, const ModelParams& params,
                       const QuadratureSpec& spec = {});

// Single-stage indifference function E[Phi((tau-Theta)/sigma) - Theta | Y=tau].
double delta_single_stage(double tau, const ModelParams& params,
                          const QuadratureSpec& spec = {});

// Bracketed root of a (decreasing) indifference function. Bracket found by
// geometric expansion from tau=0, refined by bisection with secant
// acceleration to |delta| <= 1e-9. Under the uniqueness guarantee a
// 200-point scan of the bracket confirms a single sign change.
EquilibriumSolution solve_threshold(const std::function<double(double)>& delta,
                                    const ModelParams& params);

EquilibriumSolution solve_two_stage(const ModelParams& params,
                                    const QuadratureSpec& spec = {});
EquilibriumSolution solve_single_stage(const ModelParams& params,
                                       const QuadratureSpec& spec = {});

// Negative upper bound kappa on the slope of delta_two_stage, valid for
// sigma^2 < 2*pi: kappa = max(-alpha(1-gamma), alpha(sigma/sqrt(2*pi) - 1)).
double delta_slope_bound(const ModelParams& params);

// Optimal second-stage action of a delayed agent observing participation s:
// act iff s >= Phi((tau-1)/sigma). Boundary ties act.
bool second_stage_policy(double s, double tau, double sigma);

// Ex-post aggregate action F(theta): 1 for theta <= 1, else Phi((tau-theta)/sigma).
double aggregate_action(double theta, double tau, double sigma);

// dtau*/dgamma by the implicit function theorem: analytic d(delta)/d(gamma),
// numerical d(delta)/d(tau) (central difference, Richardson-checked).
double dtau_dgamma(const ModelParams& params, const QuadratureSpec& spec = {});

} // namespace twostage
