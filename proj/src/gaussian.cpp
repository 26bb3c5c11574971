#include "twostage/gaussian.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace twostage {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Nodes/weights by Newton iteration on Legendre polynomials.
detail::GaussLegendreRule make_rule(int n) {
    detail::GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Integral of g(x)*N(x; mean, var) over [a, b] with an n-node rule.
double segment_integral(double a, double b, double mean, double inv2v,
                        double norm, int n,
                        const std::function<double(double)>& g) {
    const detail::GaussLegendreRule& rule = detail::gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = mid + half * rule.nodes[i];
        const double d = x - mean;
        acc += rule.weights[i] * g(x) * std::exp(-d * d * inv2v);
    }
    return acc * half * norm;
}

} // namespace

namespace detail {

const GaussLegendreRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendreRule>(make_rule(n));
    return *slot;
}

} // namespace detail

double std_pdf(double x) {
    if (!std::isfinite(x)) throw std::domain_error("std_pdf: non-finite input");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_cdf(double x) {
    if (std::isnan(x)) throw std::domain_error("std_cdf: NaN input");
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    return 0.5 * std::erfc(-x / kSqrt2);
}

double log_std_cdf(double x) {
    if (std::isnan(x)) throw std::domain_error("log_std_cdf: NaN input");
    if (x > -34.0) {
        double c = std_cdf(x);
        if (c > 0.0) return std::log(c);
    }
    // Tail expansion: Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6)
    const double x2 = x * x;
    const double series = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - std::log(-x) - 0.9189385332046727418 + std::log1p(series);
}

double std_cdf_inv(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("std_cdf_inv: p must lie in (0,1)");

    // Acklam's rational approximation (~1.1e-9 relative), then one Newton
    // step against std_cdf.
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Newton step against std_cdf lands well below the 1e-10 round-trip
    // budget everywhere the rational guess is valid.
    x -= (std_cdf(x) - p) / std_pdf(x);
    return x;
}

Posterior posterior_of_signal(double y, double sigma) {
    if (!std::isfinite(y)) throw std::domain_error("posterior_of_signal: non-finite signal");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("posterior_of_signal: sigma must be positive");
    const double alpha = 1.0 / (1.0 + sigma * sigma);
    return Posterior{alpha, alpha * y, alpha * sigma * sigma};
}

void QuadratureSpec::validate() const {
    if (node_count < 16)
        throw std::domain_error("QuadratureSpec: node_count must be >= 16");
    if (!(tail_halfwidth >= 8.0))
        throw std::domain_error("QuadratureSpec: tail_halfwidth must be >= 8");
    if (!std::isfinite(domain_split))
        throw std::domain_error("QuadratureSpec: non-finite domain_split");
}

double gaussian_expectation(double mean, double variance,
                            const std::function<double(double)>& g,
                            const QuadratureSpec& spec) {
    spec.validate();
    if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean))
        throw std::domain_error("gaussian_expectation: invalid mean/variance");

    const double sd = std::sqrt(variance);
    const double lo = mean - spec.tail_halfwidth * sd;
    const double hi = mean + spec.tail_halfwidth * sd;
    const double inv2v = 1.0 / (2.0 * variance);
    const double norm = kInvSqrt2Pi / sd;

    const bool split = spec.domain_split > lo && spec.domain_split < hi;
    auto integrate = [&](int n) {
        if (split)
            return segment_integral(lo, spec.domain_split, mean, inv2v, norm, n, g) +
                   segment_integral(spec.domain_split, hi, mean, inv2v, norm, n, g);
        return segment_integral(lo, hi, mean, inv2v, norm, n, g);
    };
    const double coarse = integrate(spec.node_count);
    const double fine = integrate(2 * spec.node_count);
    if (!std::isfinite(fine) || std::abs(fine - coarse) > 1e-6)
        throw NumericError("gaussian_expectation: quadrature did not converge");
    return fine;
}

double posterior_expectation(const Posterior& post,
                             const std::function<double(double)>& g,
                             const QuadratureSpec& spec) {
    if (!(post.variance > 0.0))
        throw std::domain_error("posterior_expectation: variance must be positive");
    return gaussian_expectation(post.mean, post.variance, g, spec);
}

} // namespace twostage
