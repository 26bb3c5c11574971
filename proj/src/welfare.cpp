#include "twostage/welfare.hpp"

#include <algorithm>
#include <cmath>

#include "twostage/parallel.hpp"

namespace twostage {

namespace {

double prior_expectation(const std::function<double(double)>& g,
                         const QuadratureSpec& spec) {
    return gaussian_expectation(0.0, 1.0, g, spec);
}

} // namespace

double w_two_stage(double tau, const ModelParams& params,
                   const QuadratureSpec& spec) {
    if (!std::isfinite(tau)) throw std::domain_error("w_two_stage: non-finite tau");
    const double sigma = params.sigma;
    const double gamma = params.gamma;
    return prior_expectation(
        [tau, sigma, gamma](double theta) {
            const double f1 = std_cdf((tau - theta) / sigma);
            if (theta <= 1.0) return (f1 + gamma * (1.0 - f1)) * (1.0 - theta);
            return f1 * (f1 - theta);
        },
        spec);
}

double w_single_stage(double tau, double sigma, const QuadratureSpec& spec) {
    if (!std::isfinite(tau)) throw std::domain_error("w_single_stage: non-finite tau");
    if (!(sigma > 0.0)) throw std::domain_error("w_single_stage: sigma must be positive");
    return prior_expectation(
        [tau, sigma](double theta) {
            const double f1 = std_cdf((tau - theta) / sigma);
            return f1 * (f1 - theta);
        },
        spec);
}

double w_two_stage_dtau(double tau, const ModelParams& params,
                        const QuadratureSpec& spec) {
    const double sigma = params.sigma;
    const double marginal_sd = std::sqrt(1.0 + sigma * sigma);
    const double f_y = std_pdf(tau / marginal_sd) / marginal_sd;
    const Posterior post = posterior_of_signal(tau, sigma);
    const double tail = posterior_expectation(
        post,
        [tau, sigma](double theta) {
            return theta > 1.0 ? std_cdf((tau - theta) / sigma) : 0.0;
        },
        spec);
    return f_y * (delta_two_stage(tau, params, spec) + tail);
}

RegionCell second_stage_value(const ModelParams& params,
                              const QuadratureSpec& spec) {
    RegionCell cell;
    cell.sigma = params.sigma;
    cell.gamma = params.gamma;
    const EquilibriumSolution two = solve_two_stage(params, spec);
    const EquilibriumSolution single = solve_single_stage(params, spec);
    cell.tau_star_two = two.tau_star;
    cell.tau_star_single = single.tau_star;
    cell.w_two = w_two_stage(two.tau_star, params, spec);
    cell.w_single = w_single_stage(single.tau_star, params.sigma, spec);
    cell.value = cell.w_two - cell.w_single;
    cell.beneficial = cell.value > 0.0;
    cell.unique = two.unique && single.unique;
    return cell;
}

ArgmaxResult welfare_argmax(const ModelParams& params,
                            std::pair<double, double> interval,
                            const QuadratureSpec& spec) {
    const double a = interval.first, b = interval.second;
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::domain_error("welfare_argmax: invalid search interval");
    auto w = [&](double t) { return w_two_stage(t, params, spec); };

    constexpr int kCoarse = 65;
    std::vector<double> ts(kCoarse), ws(kCoarse);
    for (int i = 0; i < kCoarse; ++i) {
        ts[i] = a + (b - a) * i / (kCoarse - 1.0);
        ws[i] = w(ts[i]);
    }
    const int imax = static_cast<int>(std::max_element(ws.begin(), ws.end()) - ws.begin());
    int interior_maxima = 0;
    for (int i = 1; i + 1 < kCoarse; ++i)
        if (ws[i] > ws[i - 1] && ws[i] > ws[i + 1]) ++interior_maxima;

    ArgmaxResult res{0.0, 0.0, false};
    if (imax == 0 || imax == kCoarse - 1 || interior_maxima > 1) {
        // Bracket violation: no interior three-point bracket, or several
        // local maxima. Report the grid argmax over 10^4 points.
        res.grid_fallback = true;
        res.tau_opt = a;
        res.w_opt = w(a);
        constexpr int kGrid = 10000;
        for (int i = 1; i < kGrid; ++i) {
            const double t = a + (b - a) * i / (kGrid - 1.0);
            const double v = w(t);
            if (v > res.w_opt) {
                res.w_opt = v;
                res.tau_opt = t;
            }
        }
    } else {
        double lo = ts[imax - 1], hi = ts[imax + 1];
        const double invphi = 0.6180339887498949;
        double c = hi - invphi * (hi - lo);
        double d = lo + invphi * (hi - lo);
        double fc = w(c), fd = w(d);
        while (hi - lo > 1e-6) {
            if (fc > fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - invphi * (hi - lo);
                fc = w(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + invphi * (hi - lo);
                fd = w(d);
            }
        }
        res.tau_opt = 0.5 * (lo + hi);
        res.w_opt = w(res.tau_opt);
    }

    const EquilibriumSolution eq = solve_two_stage(params, spec);
    if (res.w_opt < w(eq.tau_star) - 1e-9)
        throw NumericError("welfare_argmax: maximum below equilibrium welfare "
                           "(search interval does not bracket the maximum)");
    return res;
}

WelfareReport welfare_report(const ModelParams& params,
                             std::pair<double, double> argmax_interval,
                             const QuadratureSpec& spec) {
    WelfareReport rep;
    const EquilibriumSolution two = solve_two_stage(params, spec);
    const EquilibriumSolution single = solve_single_stage(params, spec);
    rep.tau = two.tau_star;
    rep.w_two_stage = w_two_stage(two.tau_star, params, spec);
    rep.w_single_stage = w_single_stage(single.tau_star, params.sigma, spec);
    const ArgmaxResult am = welfare_argmax(params, argmax_interval, spec);
    rep.tau_welfare_opt = am.tau_opt;
    rep.w_at_opt = am.w_opt;
    return rep;
}

std::vector<RegionCell> region_sweep(std::span<const double> sigma_grid,
                                     std::span<const double> gamma_grid,
                                     const QuadratureSpec& spec) {
    if (sigma_grid.empty() || gamma_grid.empty())
        throw std::domain_error("region_sweep: grids must be nonempty");
    if (!std::is_sorted(sigma_grid.begin(), sigma_grid.end()) ||
        !std::is_sorted(gamma_grid.begin(), gamma_grid.end()))
        throw std::domain_error("region_sweep: grids must be sorted ascending");

    const std::size_t ns = sigma_grid.size();
    const std::size_t ng = gamma_grid.size();
    std::vector<RegionCell> cells(ns * ng);

    // One column per sigma: the single-stage threshold is shared along it.
    parallel_for(ns, [&](std::size_t i) {
        const double sigma = sigma_grid[i];
        double tau_single = 0.0, w_single_val = 0.0;
        bool single_ok = false;
        std::string single_err;
        try {
            const ModelParams p(sigma, 0.5);
            const EquilibriumSolution s = solve_single_stage(p, spec);
            tau_single = s.tau_star;
            w_single_val = w_single_stage(tau_single, sigma, spec);
            single_ok = true;
        } catch (const std::exception& e) {
            single_err = e.what();
        }
        for (std::size_t j = 0; j < ng; ++j) {
            RegionCell& cell = cells[i * ng + j];
            cell.sigma = sigma;
            cell.gamma = gamma_grid[j];
            try {
                const ModelParams p(sigma, gamma_grid[j]);
                cell.unique = p.unique_guarantee();
                if (!single_ok) throw SolverError("single-stage solve failed: " + single_err);
                cell.tau_star_single = tau_single;
                cell.w_single = w_single_val;
                const EquilibriumSolution two = solve_two_stage(p, spec);
                cell.tau_star_two = two.tau_star;
                cell.w_two = w_two_stage(two.tau_star, p, spec);
                cell.value = cell.w_two - cell.w_single;
                cell.beneficial = cell.value > 0.0;
                cell.unique = two.unique;
            } catch (const std::exception& e) {
                cell.error = e.what();
                cell.value = std::nan("");
                cell.beneficial = false;
            }
        }
    });
    return cells;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw std::domain_error("linspace: count must be >= 1");
    if (count > 1 && !(lo < hi))
        throw std::domain_error("linspace: need lo < hi when count > 1");
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1.0);
    return g;
}

std::vector<double> default_sigma_grid() { return linspace(0.05, 2.5, 50); }
std::vector<double> default_gamma_grid() { return linspace(0.02, 0.98, 49); }

} // namespace twostage
