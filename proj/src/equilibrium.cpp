#include "twostage/equilibrium.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace twostage {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kResidualTol = 1e-9;
constexpr double kBracketLimit = 50.0;
} // namespace

Population Population::finite(int n) {
    if (n < 2) throw std::domain_error("Population: finite N must be >= 2");
    return Population{false, n};
}

ModelParams::ModelParams(double sigma_, double gamma_, Population population_)
    : sigma(sigma_), gamma(gamma_), population(population_) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("ModelParams: sigma must be positive");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("ModelParams: gamma must lie in (0,1)");
    if (!population.is_infinite && population.n < 2)
        throw std::domain_error("ModelParams: finite N must be >= 2");
}

bool ModelParams::unique_guarantee() const { return sigma * sigma < kTwoPi; }

double delta_two_stage(double tau, const ModelParams& params,
                       const QuadratureSpec& spec) {
    if (!std::isfinite(tau)) throw std::domain_error("delta_two_stage: non-finite tau");
    const double sigma = params.sigma;
    const double gamma = params.gamma;
    const Posterior post = posterior_of_signal(tau, sigma);
    return posterior_expectation(
        post,
        [tau, sigma, gamma](double theta) {
            if (theta <= 1.0) return (1.0 - gamma) * (1.0 - theta);
            return std_cdf((tau - theta) / sigma) - theta;
        },
        spec);
}

double delta_single_stage(double tau, const ModelParams& params,
                          const QuadratureSpec& spec) {
    if (!std::isfinite(tau)) throw std::domain_error("delta_single_stage: non-finite tau");
    const double sigma = params.sigma;
    const Posterior post = posterior_of_signal(tau, sigma);
    return posterior_expectation(
        post,
        [tau, sigma](double theta) { return std_cdf((tau - theta) / sigma) - theta; },
        spec);
}

EquilibriumSolution solve_threshold(const std::function<double(double)>& delta,
                                    const ModelParams& params) {
    int evals = 0;
    auto f = [&](double t) {
        ++evals;
        return delta(t);
    };

    // Expand geometrically from 0 until the sign flips. delta is decreasing,
    // positive far left and negative far right.
    double lo, hi, flo, fhi;
    const double f0 = f(0.0);
    if (f0 > 0.0) {
        lo = 0.0;
        flo = f0;
        double step = 0.5;
        double t = step, ft;
        while (true) {
            ft = f(t);
            if (ft <= 0.0) break;
            lo = t;
            flo = ft;
            if (t >= kBracketLimit)
                throw SolverError("solve_threshold: no sign change in [0, 50] (degenerate parameters)");
            step *= 2.0;
            t = std::min(t + step, kBracketLimit);
        }
        hi = t;
        fhi = ft;
    } else if (f0 < 0.0) {
        hi = 0.0;
        fhi = f0;
        double step = 0.5;
        double t = -step, ft;
        while (true) {
            ft = f(t);
            if (ft >= 0.0) break;
            hi = t;
            fhi = ft;
            if (t <= -kBracketLimit)
                throw SolverError("solve_threshold: no sign change in [-50, 0] (degenerate parameters)");
            step *= 2.0;
            t = std::max(t - step, -kBracketLimit);
        }
        lo = t;
        flo = ft;
    } else {
        // Exact root at 0; nudge outward for a signed bracket.
        lo = -1e-7;
        hi = 1e-7;
        flo = f(lo);
        fhi = f(hi);
    }

    const Bracket expansion{lo, hi};

    if (!(flo >= 0.0 && fhi <= 0.0))
        throw SolverError("solve_threshold: bracket signs inconsistent with a decreasing delta");

    // Bisection with secant acceleration; bisect whenever the secant step
    // stalls or leaves the bracket.
    double a = lo, fa = flo, b = hi, fb = fhi;
    double x = b, fx = fb;
    double xp = a, fxp = fa;
    if (std::abs(fa) < std::abs(fb)) {
        x = a;
        fx = fa;
        xp = b;
        fxp = fb;
    }
    double last_width = b - a;
    double best_x = std::abs(fa) < std::abs(fb) ? a : b;
    double best_f = std::min(std::abs(fa), std::abs(fb));
    int steps = 0;
    while (best_f > kResidualTol && steps < 300) {
        ++steps;
        double cand = x - fx * (x - xp) / (fx - fxp);
        const bool stalled = (b - a) > 0.5 * last_width && steps > 2;
        if (!std::isfinite(cand) || cand <= a || cand >= b || stalled)
            cand = 0.5 * (a + b);
        last_width = b - a;
        const double fc = f(cand);
        if (std::abs(fc) < best_f) {
            best_f = std::abs(fc);
            best_x = cand;
        }
        if (fc > 0.0) {
            a = cand;
            fa = fc;
        } else {
            b = cand;
            fb = fc;
        }
        xp = x;
        fxp = fx;
        x = cand;
        fx = fc;
        if (b - a < 1e-15 * std::max(1.0, std::abs(a))) break;
    }
    if (best_f > kResidualTol)
        throw SolverError("solve_threshold: residual " + std::to_string(best_f) +
                          " above tolerance after refinement");

    EquilibriumSolution sol;
    sol.tau_star = best_x;
    sol.residual = best_f;
    sol.bracket = expansion;
    sol.unique = params.unique_guarantee();

    if (sol.unique) {
        // Confirm a single sign change across the expansion bracket.
        int changes = 0;
        double prev = f(expansion.low);
        for (int i = 1; i < 200; ++i) {
            const double t = expansion.low +
                             (expansion.high - expansion.low) * i / 199.0;
            const double v = f(t);
            if ((prev > 0.0 && v < 0.0) || (prev < 0.0 && v > 0.0)) ++changes;
            if (v != 0.0) prev = v;
        }
        if (changes > 1)
            throw NumericError("solve_threshold: multiple sign changes under the "
                               "uniqueness guarantee (quadrature inconsistency)");
    }
    sol.iterations = evals;
    return sol;
}

EquilibriumSolution solve_two_stage(const ModelParams& params,
                                    const QuadratureSpec& spec) {
    return solve_threshold(
        [&](double t) { return delta_two_stage(t, params, spec); }, params);
}

EquilibriumSolution solve_single_stage(const ModelParams& params,
                                       const QuadratureSpec& spec) {
    return solve_threshold(
        [&](double t) { return delta_single_stage(t, params, spec); }, params);
}

double delta_slope_bound(const ModelParams& params) {
    if (!params.unique_guarantee())
        throw std::domain_error("delta_slope_bound: requires sigma^2 < 2*pi");
    const double alpha = 1.0 / (1.0 + params.sigma * params.sigma);
    const double a = -alpha * (1.0 - params.gamma);
    const double b = alpha * (params.sigma / std::sqrt(kTwoPi) - 1.0);
    return std::max(a, b);
}

bool second_stage_policy(double s, double tau, double sigma) {
    if (!(s >= 0.0 && s <= 1.0))
        throw std::domain_error("second_stage_policy: s must lie in [0,1]");
    if (!(sigma > 0.0)) throw std::domain_error("second_stage_policy: sigma must be positive");
    return s >= std_cdf((tau - 1.0) / sigma);
}

double aggregate_action(double theta, double tau, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("aggregate_action: sigma must be positive");
    if (theta <= 1.0) return 1.0;
    return std_cdf((tau - theta) / sigma);
}

double dtau_dgamma(const ModelParams& params, const QuadratureSpec& spec) {
    if (!params.unique_guarantee())
        throw std::domain_error("dtau_dgamma: requires sigma^2 < 2*pi");
    const EquilibriumSolution sol = solve_two_stage(params, spec);
    const double tau = sol.tau_star;

    const Posterior post = posterior_of_signal(tau, params.sigma);
    const double ddelta_dgamma = -posterior_expectation(
        post,
        [](double theta) { return theta <= 1.0 ? 1.0 - theta : 0.0; },
        spec);

    auto d = [&](double t) { return delta_two_stage(t, params, spec); };
    const double h = 1e-5;
    const double d_h = (d(tau + h) - d(tau - h)) / (2.0 * h);
    const double d_h2 = (d(tau + 0.5 * h) - d(tau - 0.5 * h)) / h;
    const double ddelta_dtau = (4.0 * d_h2 - d_h) / 3.0;
    if (std::abs(d_h - d_h2) > std::max(1e-6, 1e-3 * std::abs(ddelta_dtau)))
        throw NumericError("dtau_dgamma: unstable d(delta)/d(tau) estimate");
    if (std::abs(ddelta_dtau) < 1e-8)
        throw NumericError("dtau_dgamma: ill-conditioned (|d(delta)/d(tau)| < 1e-8)");
    return -ddelta_dgamma / ddelta_dtau;
}

} // namespace twostage
