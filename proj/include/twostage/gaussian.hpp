#pragma once

#include <functional>
#include <vector>

#include "twostage/errors.hpp"

namespace twostage {

// Standard normal density. Rejects non-finite input.
double std_pdf(double x);

// Standard normal CDF via erfc; accepts +-inf, rejects NaN.
double std_cdf(double x);

// log(std_cdf(x)), stable into the far left tail (asymptotic expansion
// below the erfc underflow point).
double log_std_cdf(double x);

// Inverse standard normal CDF on (0,1). Rational initial guess refined by
// one Newton step on std_cdf; round-trip |std_cdf(std_cdf_inv(p)) - p| is
// at the 1e-15 level.
double std_cdf_inv(double p);

// Conditional law of the fundamental given one private signal:
// Theta | Y=y ~ N(alpha*y, alpha*sigma^2) with alpha = 1/(1+sigma^2).
struct Posterior {
    double alpha;
    double mean;
    double variance;
};

Posterior posterior_of_signal(double y, double sigma);

// Quadrature controls. Semi-infinite integrals are truncated at
// mean +- tail_halfwidth standard deviations and split at domain_split
// (the dominance boundary theta = 1) where integrands kink.
struct QuadratureSpec {
    int node_count = 256;        // Gauss-Legendre nodes per sub-interval
    double domain_split = 1.0;
    double tail_halfwidth = 8.0;

    void validate() const;
};

// E[g(X)] for X ~ N(mean, variance). Evaluates at node_count and
// 2*node_count and returns the finer result; throws NumericError if the
// two disagree by more than 1e-6 (non-convergence diagnostic).
double gaussian_expectation(double mean, double variance,
                            const std::function<double(double)>& g,
                            const QuadratureSpec& spec = {});

// E[g(Theta) | Y=y] against a Posterior.
double posterior_expectation(const Posterior& post,
                             const std::function<double(double)>& g,
                             const QuadratureSpec& spec = {});

namespace detail {

struct GaussLegendreRule {
    std::vector<double> nodes;     // on [-1, 1]
    std::vector<double> weights;
};

// Cached n-point rule; thread-safe.
const GaussLegendreRule& gauss_legendre(int n);

} // namespace detail

} // namespace twostage
