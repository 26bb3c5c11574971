#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "twostage/equilibrium.hpp"

namespace twostage {

// Homogeneous two-stage threshold policy. lambda[k] is the second-stage
// threshold at participation s = k/N; entries may be +-infinity (act
// always / never), matching the two-valued population limit.
struct ThresholdPolicy {
    double tau = 0.0;
    std::vector<double> lambda;   // size N+1, index k = N*s

    // Population-limit policy: lambda(s) = +inf iff the recovered
    // fundamental tau - sigma*Phi^{-1}(s) is <= 1.
    static ThresholdPolicy limit_policy(double tau, double sigma, int n);
    // Single-stage play embedded in the two-stage game: nobody acts late.
    static ThresholdPolicy single_stage(double tau, int n);
};

// One realized round of the finite game.
struct SimulationTrace {
    double theta = 0.0;
    std::vector<double> signals;
    std::vector<std::uint8_t> stage1_actions;
    std::vector<std::uint8_t> stage2_actions;
    double participation = 0.0;   // S = (1/N) sum of stage-1 actions
    std::vector<double> payoffs;

    double total_welfare() const;   // mean per-agent payoff
};

// Plays one seeded round: Theta ~ N(0,1), Y_i = Theta + sigma Z_i,
// stage 1 acts iff Y_i <= tau, stage 2 (non-actors only) iff
// Y_i <= lambda(S). Identical seeds give identical traces.
SimulationTrace simulate_round(const ThresholdPolicy& policy,
                               const ModelParams& params, std::uint64_t seed);

// theta = tau - sigma * Phi^{-1}(s) for s in (0,1). At s = 0 or 1 the
// fundamental is unidentified; the +-infinity bound is returned.
double recovered_fundamental(double s, double tau, double sigma);

// E[g(Theta) | successes-of-trials Bernoulli(Phi((tau-Theta)/sigma))
// observations, private signal y_i]. Log-space binomial weights on a
// Laplace-located window; throws NumericError on total underflow.
double binomial_posterior_expectation(const std::function<double(double)>& g,
                                      double y_i, int successes, int trials,
                                      double tau, double sigma,
                                      const QuadratureSpec& spec = {});

// E[g(Theta) | Y_i = y_i, S = s] for a delayed agent in a population of
// size N: s = k/N with k actors among the other N-1 agents.
double finite_posterior_expectation(const std::function<double(double)>& g,
                                    double y_i, double s, double tau,
                                    const ModelParams& params,
                                    const QuadratureSpec& spec = {});

// Conditional expected utility of acting in the second stage for a delayed
// agent with signal y_i observing participation s = k/N:
// (1-s-1/N) P(Y_j <= lambda(s) | Y_j > tau, y_i, s) + 1/N + s - E[Theta|y_i,s].
double second_stage_net_utility(double y_i, double s,
                                const ThresholdPolicy& policy,
                                const ModelParams& params,
                                const QuadratureSpec& spec = {});

// Net gain from acting in the first stage rather than delaying, for an
// agent with signal y_i when everyone else plays `policy`. Exact over the
// binomial distribution of the other agents' stage-1 actions.
double first_stage_net_gain(double y_i, const ThresholdPolicy& policy,
                            const ModelParams& params,
                            const QuadratureSpec& spec = {});

// One sweep of second-stage best responses: for every attainable s, the
// sign-change point of second_stage_net_utility in y_i (or +-inf).
std::vector<double> second_stage_best_response(const ThresholdPolicy& policy,
                                               const ModelParams& params,
                                               const QuadratureSpec& spec = {});

struct BestResponseResult {
    ThresholdPolicy policy;
    bool converged = false;
    int iterations = 0;
    // Set when a 2-cycle is detected: the alternating partner policy.
    std::optional<ThresholdPolicy> cycle_partner;
};

// Alternates lambda- and tau-updates until movement < 1e-6 or max_iters.
// Oscillation (a 2-cycle) is reported, not hidden.
BestResponseResult best_response_iteration(const ThresholdPolicy& initial,
                                           const ModelParams& params,
                                           int max_iters,
                                           const QuadratureSpec& spec = {});

} // namespace twostage
