#include "twostage/finite_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "twostage/parallel.hpp"

namespace twostage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int require_finite_n(const ModelParams& params, const char* who) {
    if (params.population.is_infinite)
        throw std::domain_error(std::string(who) + ": requires a finite population");
    return params.population.n;
}

// 53-bit uniform strictly inside (0,1); keeps traces reproducible without
// relying on distribution internals.
double next_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double next_gaussian(std::mt19937_64& rng) { return std_cdf_inv(next_uniform(rng)); }

// P(Y_j <= max(tau, lambda) | Y_j > tau, Theta = theta): the truncated
// upper-tail ratio, computed through log CDFs so theta far below tau
// (both tails vanishing) stays stable.
double tail_action_probability(double theta, double tau, double lambda, double sigma) {
    if (lambda <= tau) return 0.0;   // includes lambda = -inf
    if (lambda == kInf) return 1.0;
    const double r = std::exp(log_std_cdf((theta - lambda) / sigma) -
                              log_std_cdf((theta - tau) / sigma));
    return 1.0 - r;
}

int participation_index(double s, int n, const char* who) {
    const double scaled = s * n;
    const int k = static_cast<int>(std::lround(scaled));
    if (!(s >= 0.0 && s <= 1.0) || std::abs(scaled - k) > 1e-9)
        throw std::domain_error(std::string(who) + ": s must be an attainable k/N");
    return k;
}

void require_lambda_table(const ThresholdPolicy& policy, int n, const char* who) {
    if (static_cast<int>(policy.lambda.size()) != n + 1)
        throw std::domain_error(std::string(who) + ": lambda table must have N+1 entries");
}

} // namespace

ThresholdPolicy ThresholdPolicy::limit_policy(double tau, double sigma, int n) {
    if (n < 2) throw std::domain_error("limit_policy: N must be >= 2");
    if (!(sigma > 0.0)) throw std::domain_error("limit_policy: sigma must be positive");
    ThresholdPolicy p;
    p.tau = tau;
    p.lambda.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double s = static_cast<double>(k) / n;
        p.lambda[k] = recovered_fundamental(s, tau, sigma) <= 1.0 ? kInf : -kInf;
    }
    return p;
}

ThresholdPolicy ThresholdPolicy::single_stage(double tau, int n) {
    if (n < 2) throw std::domain_error("single_stage: N must be >= 2");
    ThresholdPolicy p;
    p.tau = tau;
    p.lambda.assign(n + 1, -kInf);
    return p;
}

double SimulationTrace::total_welfare() const {
    double acc = 0.0;
    for (double u : payoffs) acc += u;
    return payoffs.empty() ? 0.0 : acc / static_cast<double>(payoffs.size());
}

SimulationTrace simulate_round(const ThresholdPolicy& policy,
                               const ModelParams& params, std::uint64_t seed) {
    const int n = require_finite_n(params, "simulate_round");
    require_lambda_table(policy, n, "simulate_round");

    std::mt19937_64 rng(seed);
    SimulationTrace trace;
    trace.theta = next_gaussian(rng);
    trace.signals.resize(n);
    trace.stage1_actions.resize(n);
    trace.stage2_actions.assign(n, 0);
    trace.payoffs.resize(n);

    int acted = 0;
    for (int i = 0; i < n; ++i) {
        trace.signals[i] = trace.theta + params.sigma * next_gaussian(rng);
        trace.stage1_actions[i] = trace.signals[i] <= policy.tau ? 1 : 0;
        acted += trace.stage1_actions[i];
    }
    trace.participation = static_cast<double>(acted) / n;

    const double lambda = policy.lambda[acted];
    int total = acted;
    for (int i = 0; i < n; ++i) {
        if (!trace.stage1_actions[i] && trace.signals[i] <= lambda) {
            trace.stage2_actions[i] = 1;
            ++total;
        }
    }
    const double aggregate = static_cast<double>(total) / n;
    for (int i = 0; i < n; ++i) {
        const double weight = trace.stage1_actions[i] + params.gamma * trace.stage2_actions[i];
        trace.payoffs[i] = weight * (aggregate - trace.theta);
    }
    return trace;
}

double recovered_fundamental(double s, double tau, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("recovered_fundamental: sigma must be positive");
    if (!(s >= 0.0 && s <= 1.0))
        throw std::domain_error("recovered_fundamental: s must lie in [0,1]");
    if (s == 0.0) return kInf;    // nobody acted: only a lower bound on theta
    if (s == 1.0) return -kInf;   // everybody acted
    return tau - sigma * std_cdf_inv(s);
}

double binomial_posterior_expectation(const std::function<double(double)>& g,
                                      double y_i, int successes, int trials,
                                      double tau, double sigma,
                                      const QuadratureSpec& spec) {
    spec.validate();
    if (trials < 0 || successes < 0 || successes > trials)
        throw std::domain_error("binomial_posterior_expectation: bad successes/trials");
    const Posterior post = posterior_of_signal(y_i, sigma);
    const double sd = std::sqrt(post.variance);

    auto log_kernel = [&](double theta) {
        double lw = -0.5 * (theta - post.mean) * (theta - post.mean) / post.variance;
        const double z = (tau - theta) / sigma;
        if (successes > 0) lw += successes * log_std_cdf(z);
        if (trials - successes > 0) lw += (trials - successes) * log_std_cdf(-z);
        return lw;
    };

    // The posterior mass can sit far from the signal-only window when the
    // observed count disagrees with the private signal, so bracket the mode
    // between the Gaussian mean and the (continuity-corrected) count MLE.
    double count_mle = post.mean;
    if (trials > 0) {
        const double p_hat =
            (successes + 0.5) / (trials + 1.0);   // stays inside (0,1)
        count_mle = tau - sigma * std_cdf_inv(p_hat);
    }
    double blo = std::min(post.mean, count_mle) - 3.0 * sd - 3.0 * sigma - 3.0;
    double bhi = std::max(post.mean, count_mle) + 3.0 * sd + 3.0 * sigma + 3.0;

    // Log-concave kernel: golden-section mode, Laplace width, then expand
    // each side until the kernel has decayed well past the peak.
    double lo, hi;
    {
        const double invphi = 0.6180339887498949;
        double a = blo, b = bhi;
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        double fc = log_kernel(c), fd = log_kernel(d);
        while (b - a > 1e-9 * std::max(1.0, sd)) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = log_kernel(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = log_kernel(d);
            }
        }
        const double mode = 0.5 * (a + b);
        const double peak = log_kernel(mode);
        if (!std::isfinite(peak))
            throw NumericError("binomial_posterior_expectation: log-weight underflow");
        const double h = std::max(1e-6 * sd, 1e-9);
        const double curv = (2.0 * peak - log_kernel(mode + h) - log_kernel(mode - h)) / (h * h);
        double laplace_sd = curv > 0.0 ? 1.0 / std::sqrt(curv) : sd;
        laplace_sd = std::clamp(laplace_sd, 1e-12, sd);
        lo = mode - spec.tail_halfwidth * laplace_sd;
        hi = mode + spec.tail_halfwidth * laplace_sd;
        double step = 8.0 * laplace_sd;
        for (int it = 0; it < 100 && log_kernel(lo) > peak - 35.0; ++it, step *= 1.5)
            lo -= step;
        step = 8.0 * laplace_sd;
        for (int it = 0; it < 100 && log_kernel(hi) > peak - 35.0; ++it, step *= 1.5)
            hi += step;
    }

    struct Segment {
        double a, b;
    };
    Segment segs[2];
    int nsegs = 0;
    if (spec.domain_split > lo && spec.domain_split < hi) {
        segs[nsegs++] = {lo, spec.domain_split};
        segs[nsegs++] = {spec.domain_split, hi};
    } else {
        segs[nsegs++] = {lo, hi};
    }

    // One pass collecting mapped nodes and log-weights, then a shared
    // rescale by the max before exponentiating.
    const detail::GaussLegendreRule& rule = detail::gauss_legendre(spec.node_count);
    std::vector<double> xs, raws;
    xs.reserve(nsegs * spec.node_count);
    raws.reserve(nsegs * spec.node_count);
    double mx = -kInf;
    for (int si = 0; si < nsegs; ++si) {
        const double half = 0.5 * (segs[si].b - segs[si].a);
        const double mid = 0.5 * (segs[si].a + segs[si].b);
        for (int i = 0; i < spec.node_count; ++i) {
            const double x = mid + half * rule.nodes[i];
            const double lw = log_kernel(x);
            xs.push_back(x);
            raws.push_back(lw + std::log(half * rule.weights[i]));
            mx = std::max(mx, lw);
        }
    }
    if (!std::isfinite(mx))
        throw NumericError("binomial_posterior_expectation: log-weight underflow");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = std::exp(raws[i] - mx);
        num += w * g(xs[i]);
        den += w;
    }
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num))
        throw NumericError("binomial_posterior_expectation: normalization failed");
    return num / den;
}

double finite_posterior_expectation(const std::function<double(double)>& g,
                                    double y_i, double s, double tau,
                                    const ModelParams& params,
                                    const QuadratureSpec& spec) {
    const int n = require_finite_n(params, "finite_posterior_expectation");
    const int k = participation_index(s, n, "finite_posterior_expectation");
    if (k > n - 1)
        throw std::domain_error("finite_posterior_expectation: s = 1 leaves no delayed observer");
    return binomial_posterior_expectation(g, y_i, k, n - 1, tau, params.sigma, spec);
}

double second_stage_net_utility(double y_i, double s,
                                const ThresholdPolicy& policy,
                                const ModelParams& params,
                                const QuadratureSpec& spec) {
    const int n = require_finite_n(params, "second_stage_net_utility");
    require_lambda_table(policy, n, "second_stage_net_utility");
    const int k = participation_index(s, n, "second_stage_net_utility");
    if (k > n - 1)
        throw std::domain_error("second_stage_net_utility: s = 1 leaves no delayed agent");

    const double tau = policy.tau;
    const double sigma = params.sigma;
    const double lambda = policy.lambda[k];

    const double e_theta = binomial_posterior_expectation(
        [](double t) { return t; }, y_i, k, n - 1, tau, sigma, spec);

    double p_other;   // P(Y_j <= lambda(s) | Y_j > tau, y_i, S=s)
    if (lambda <= tau) {
        p_other = 0.0;
    } else if (lambda == kInf) {
        p_other = 1.0;
    } else {
        p_other = binomial_posterior_expectation(
            [&](double theta) { return tail_action_probability(theta, tau, lambda, sigma); },
            y_i, k, n - 1, tau, sigma, spec);
    }
    const double sv = static_cast<double>(k) / n;
    return (1.0 - sv - 1.0 / n) * p_other + 1.0 / n + sv - e_theta;
}

double first_stage_net_gain(double y_i, const ThresholdPolicy& policy,
                            const ModelParams& params,
                            const QuadratureSpec& spec) {
    const int n = require_finite_n(params, "first_stage_net_gain");
    require_lambda_table(policy, n, "first_stage_net_gain");
    const double tau = policy.tau;
    const double sigma = params.sigma;
    const double gamma = params.gamma;
    const int m = n - 1;   // other agents

    // Precompute the delay-branch indicator per k: S = k/N when i waits.
    std::vector<char> waits_acts(n);
    for (int k = 0; k < n; ++k) waits_acts[k] = y_i <= policy.lambda[k] ? 1 : 0;

    const Posterior post = posterior_of_signal(y_i, sigma);
    auto integrand = [&](double theta) {
        const double lp = log_std_cdf((tau - theta) / sigma);
        const double lq = log_std_cdf((theta - tau) / sigma);
        const double p = std::exp(lp);

        // Binomial(m, p) over the other agents' stage-1 count, truncated
        // where the pmf is negligible.
        const double mu = m * p;
        const double sdk = std::sqrt(std::max(m * p * (1.0 - p), 0.0));
        int klo = static_cast<int>(std::floor(mu - 12.0 * sdk - 4.0));
        int khi = static_cast<int>(std::ceil(mu + 12.0 * sdk + 4.0));
        klo = std::clamp(klo, 0, m);
        khi = std::clamp(khi, 0, m);

        double log_pmf = std::lgamma(m + 1.0) - std::lgamma(klo + 1.0) -
                         std::lgamma(m - klo + 1.0) + klo * lp + (m - klo) * lq;
        const double log_odds = lp - lq;
        double acc = 0.0;
        for (int k = klo; k <= khi; ++k) {
            const double pmf = std::exp(log_pmf);
            // Act now: own action moves participation to (k+1)/N.
            const double qa = tail_action_probability(theta, tau, policy.lambda[k + 1], sigma);
            const double u_act = (k + (m - k) * qa + 1.0) / n - theta;
            // Delay: participation stays k/N; act late iff y_i <= lambda(k/N).
            double u_delay = 0.0;
            if (waits_acts[k]) {
                const double qd = tail_action_probability(theta, tau, policy.lambda[k], sigma);
                u_delay = (k + (m - k) * qd + 1.0) / n - theta;
            }
            acc += pmf * (u_act - gamma * u_delay);
            if (k < khi)
                log_pmf += log_odds + std::log((m - k) / (k + 1.0));
        }
        return acc;
    };
    return posterior_expectation(post, integrand, spec);
}

std::vector<double> second_stage_best_response(const ThresholdPolicy& policy,
                                               const ModelParams& params,
                                               const QuadratureSpec& spec) {
    const int n = require_finite_n(params, "second_stage_best_response");
    require_lambda_table(policy, n, "second_stage_best_response");
    const double ylo = -12.0 * params.sigma - 5.0;
    const double yhi = 12.0 * params.sigma + 5.0;

    std::vector<double> out(n + 1);
    out[n] = kInf;   // s = 1: no delayed agent; by the recovered-theta
                     // convention everybody would act.
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t idx) {
        const int k = static_cast<int>(idx);
        const double s = static_cast<double>(k) / n;
        auto net = [&](double y) {
            return second_stage_net_utility(y, s, policy, params, spec);
        };
        // Net utility decreases in y; ties act.
        if (net(yhi) >= 0.0) {
            out[k] = kInf;
        } else if (net(ylo) < 0.0) {
            out[k] = -kInf;
        } else {
            double lo = ylo, hi = yhi;
            while (hi - lo > 1e-8) {
                const double mid = 0.5 * (lo + hi);
                if (net(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            out[k] = 0.5 * (lo + hi);
        }
    });
    return out;
}

namespace {

double entry_distance(double a, double b) {
    if (a == b) return 0.0;   // covers equal infinities
    if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
    return std::abs(a - b);
}

double policy_distance(const ThresholdPolicy& a, const ThresholdPolicy& b) {
    double d = entry_distance(a.tau, b.tau);
    for (std::size_t i = 0; i < a.lambda.size(); ++i)
        d = std::max(d, entry_distance(a.lambda[i], b.lambda[i]));
    return d;
}

} // namespace

BestResponseResult best_response_iteration(const ThresholdPolicy& initial,
                                           const ModelParams& params,
                                           int max_iters,
                                           const QuadratureSpec& spec) {
    const int n = require_finite_n(params, "best_response_iteration");
    require_lambda_table(initial, n, "best_response_iteration");
    if (max_iters < 1) throw std::domain_error("best_response_iteration: max_iters must be >= 1");

    const double ylo = -12.0 * params.sigma - 5.0;
    const double yhi = 12.0 * params.sigma + 5.0;
    constexpr double kMoveTol = 1e-6;

    ThresholdPolicy current = initial;
    ThresholdPolicy prev = current, prev2 = current;

    BestResponseResult res;
    for (int it = 1; it <= max_iters; ++it) {
        ThresholdPolicy next = current;
        next.lambda = second_stage_best_response(current, params, spec);

        // tau responds to (tau_old, lambda_new).
        ThresholdPolicy mixed{current.tau, next.lambda};
        auto gain = [&](double y) { return first_stage_net_gain(y, mixed, params, spec); };
        if (gain(ylo) <= 0.0) {
            next.tau = ylo;
        } else if (gain(yhi) > 0.0) {
            next.tau = yhi;
        } else {
            double lo = ylo, hi = yhi;
            while (hi - lo > 1e-8) {
                const double mid = 0.5 * (lo + hi);
                if (gain(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            next.tau = 0.5 * (lo + hi);
        }

        const double move = policy_distance(next, current);
        const bool at_window_edge = next.tau == ylo || next.tau == yhi;

        prev2 = prev;
        prev = current;
        current = next;
        res.iterations = it;

        if (move < kMoveTol) {
            res.policy = current;
            res.converged = !at_window_edge;
            return res;
        }
        if (it >= 2 && policy_distance(current, prev2) < kMoveTol) {
            // 2-cycle: report both alternating policies.
            res.policy = current;
            res.converged = false;
            res.cycle_partner = prev;
            return res;
        }
    }
    res.policy = current;
    res.converged = false;
    return res;
}

} // namespace twostage
