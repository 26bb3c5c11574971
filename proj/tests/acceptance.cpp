// Acceptance suite: ten numbered criteria, one PASS/FAIL line each, with
// measured margins and wall times. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "twostage/finite_game.hpp"
#include "twostage/parallel.hpp"
#include "twostage/welfare.hpp"

using namespace twostage;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void report(int id, const char* name, bool pass, double secs, const std::string& detail) {
    std::printf("[C%02d] %s  %-32s (%.1fs)  %s\n", id, pass ? "PASS" : "FAIL", name,
                secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return std::string(buf);
}

// --- C1: sigma -> 0 threshold limits ---------------------------------------
void criterion_1() {
    Timer t;
    bool pass = true;
    std::string detail;
    const double tau_single = solve_single_stage(ModelParams(0.01, 0.5)).tau_star;
    const double err_single = std::abs(tau_single - 0.5);
    pass = pass && err_single <= 0.02;
    detail += fmt("|tau_s-0.5|=%.4f", err_single);
    for (double gamma : {0.2, 0.5, 0.8}) {
        const double tau = solve_two_stage(ModelParams(0.01, gamma)).tau_star;
        const double err = std::abs(tau - 1.0);
        pass = pass && err <= 0.02;
        detail += fmt(" |tau(%.1f)-1|=%.4f", gamma, err);
    }
    report(1, "sigma->0 threshold limits", pass, t.seconds(), detail + " (tol 0.02)");
}

// --- C2: uniqueness / monotonicity / slope bound ----------------------------
void criterion_2() {
    Timer t;
    std::mt19937_64 rng(271828);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * ((static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53);
    };
    bool pass = true;
    double worst_excess = -kInf;
    std::string fail_detail;
    for (int d = 0; d < 20; ++d) {
        const double sigma = unif(0.1, 1.8);
        const double gamma = unif(0.1, 0.9);
        const ModelParams params(sigma, gamma);
        const double bound = delta_slope_bound(params);
        int sign_changes = 0;
        double prev_t = -5.0, prev_v = delta_two_stage(-5.0, params);
        for (int i = 1; i <= 100; ++i) {
            const double tau = -5.0 + 0.1 * i;
            const double v = delta_two_stage(tau, params);
            if (v >= prev_v) {
                pass = false;
                fail_detail = fmt(" not decreasing at (%.3f,%.3f)", sigma, gamma);
            }
            worst_excess = std::max(worst_excess, (v - prev_v) / 0.1 - bound);
            if (prev_v > 0.0 && v < 0.0) ++sign_changes;
            prev_t = tau;
            prev_v = v;
        }
        if (sign_changes != 1) {
            pass = false;
            fail_detail += fmt(" %d sign changes at (%.3f,%.3f)", sign_changes, sigma, gamma);
        }
    }
    if (worst_excess > 1e-6) pass = false;
    report(2, "uniqueness/monotonicity", pass, t.seconds(),
           fmt("20 draws in [0.1,1.8]x[0.1,0.9]; slope excess %.2e (tol 1e-6)%s",
               worst_excess, fail_detail.c_str()));
}

// --- C3: comparative statics -------------------------------------------------
void criterion_3() {
    Timer t;
    bool pass = true;
    double prev = kInf;
    for (int i = 1; i <= 9; ++i) {
        const double tau = solve_two_stage(ModelParams(0.5, 0.1 * i)).tau_star;
        if (!(tau < prev)) pass = false;
        prev = tau;
    }
    double worst_rel = 0.0;
    for (double gamma : {0.3, 0.5, 0.7}) {
        const double analytic = dtau_dgamma(ModelParams(0.5, gamma));
        const double h = 1e-3;
        const double fd = (solve_two_stage(ModelParams(0.5, gamma + h)).tau_star -
                           solve_two_stage(ModelParams(0.5, gamma - h)).tau_star) /
                          (2.0 * h);
        worst_rel = std::max(worst_rel, std::abs(analytic - fd) / std::abs(fd));
        if (!(analytic < 0.0)) pass = false;
    }
    if (worst_rel > 1e-3) pass = false;
    report(3, "comparative statics", pass, t.seconds(),
           fmt("tau* decreasing over gamma grid; dtau/dgamma FD rel err %.2e (tol 1e-3)",
               worst_rel));
}

// --- C4: welfare derivative identity ----------------------------------------
void criterion_4() {
    Timer t;
    double worst = 0.0;
    for (double sigma : {0.3, 0.7})
        for (double gamma : {0.2, 0.8})
            for (double tau : {-2.0, -0.5, 0.5, 2.0}) {
                const ModelParams params(sigma, gamma);
                const double analytic = w_two_stage_dtau(tau, params);
                const double h = 1e-4;
                const double fd = (w_two_stage(tau + h, params) -
                                   w_two_stage(tau - h, params)) /
                                  (2.0 * h);
                worst = std::max(worst, std::abs(analytic - fd));
            }
    report(4, "welfare derivative identity", worst <= 1e-5, t.seconds(),
           fmt("max |analytic-FD| over 16 points = %.2e (tol 1e-5)", worst));
}

// --- C5: value-of-delay sign regions on the default sweep ------------------------------
std::vector<RegionCell> run_default_sweep(double* secs) {
    Timer t;
    const std::vector<double> sigmas = default_sigma_grid();
    const std::vector<double> gammas = default_gamma_grid();
    std::vector<RegionCell> cells = region_sweep(sigmas, gammas);
    *secs = t.seconds();
    return cells;
}

void criterion_5(const std::vector<RegionCell>& cells, double sweep_secs) {
    Timer t;
    const double v_gamma = second_stage_value(ModelParams(0.5, 0.05)).value;
    const double v_sigma = second_stage_value(ModelParams(0.05, 0.9)).value;
    int negative = 0, errors = 0;
    for (const RegionCell& c : cells) {
        if (!c.error.empty()) ++errors;
        else if (c.value < 0.0) ++negative;
    }
    const bool pass = v_gamma > 0.0 && v_sigma > 0.0 && negative > 0 && errors == 0 &&
                      sweep_secs < 300.0;
    report(5, "value-of-delay sign regions", pass, t.seconds() + sweep_secs,
           fmt("V(0.5,0.05)=%.4f>0, V(0.05,0.9)=%.4f>0, %d negative cells, %d errors, "
               "sweep %.1fs (<300s)",
               v_gamma, v_sigma, negative, errors, sweep_secs));
}

// --- C6: ordering across the sweep -------------------------------------------
void criterion_6(const std::vector<RegionCell>& cells) {
    Timer t;
    int violations = 0, strict_failures = 0;
    double worst_gap = 0.0, worst_sigma = 0.0, worst_gamma = 0.0;
    for (const RegionCell& c : cells) {
        if (!c.error.empty() || !c.unique) continue;
        const double gap = c.tau_star_two - c.tau_star_single;
        if (gap < -1e-7) {
            ++violations;
            if (-gap > worst_gap) {
                worst_gap = -gap;
                worst_sigma = c.sigma;
                worst_gamma = c.gamma;
            }
        }
        if (c.gamma <= 0.2 && !(gap > 1e-7)) ++strict_failures;
    }
    const bool pass = violations == 0 && strict_failures == 0;
    report(6, "ordering tau* >= tau*_single", pass, t.seconds(),
           fmt("%d violations (worst %.4f at sigma=%.2f gamma=%.2f), %d strict "
               "failures at gamma<=0.2",
               violations, worst_gap, worst_sigma, worst_gamma, strict_failures));
}

// --- C7: LLN and posterior concentration rates -------------------------------
void criterion_7() {
    Timer t;
    const std::vector<int> sizes{100, 1000, 10000, 100000};
    const int reps = 100;
    const double tau = 0.0, sigma = 1.0;
    std::vector<double> mean_s(sizes.size(), 0.0), mean_th(sizes.size(), 0.0);
    parallel_for(sizes.size(), [&](std::size_t si) {
        const int n = sizes[si];
        const ModelParams params(sigma, 0.5, Population::finite(n));
        const ThresholdPolicy pol = ThresholdPolicy::limit_policy(tau, sigma, n);
        double se = 0.0, te = 0.0;
        for (int r = 0; r < reps; ++r) {
            const SimulationTrace tr = simulate_round(pol, params, 52000 + r);
            const double p = std_cdf((tau - tr.theta) / sigma);
            se += std::abs(tr.participation - p);
            const double s_c = std::clamp(tr.participation, 0.5 / n, 1.0 - 0.5 / n);
            te += std::abs(recovered_fundamental(s_c, tau, sigma) - tr.theta);
        }
        mean_s[si] = se / reps;
        mean_th[si] = te / reps;
    });
    auto slope = [&](const std::vector<double>& err) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const double x = std::log(static_cast<double>(sizes[i]));
            const double y = std::log(err[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = static_cast<double>(sizes.size());
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    const double s1 = slope(mean_s), s2 = slope(mean_th);
    const bool decreasing = std::is_sorted(mean_s.rbegin(), mean_s.rend()) &&
                            std::is_sorted(mean_th.rbegin(), mean_th.rend());
    const bool pass = decreasing && std::abs(s1 + 0.5) <= 0.1 && std::abs(s2 + 0.5) <= 0.1;
    report(7, "LLN + concentration rates", pass, t.seconds(),
           fmt("log-log slopes: |S-p| %.3f, |theta^-theta| %.3f (want -0.5 +- 0.1, "
               "100 reps, N up to 1e5)",
               s1, s2));
}

// --- C8: small-N oracle equivalence -------------------------------------------
struct SmallNPoint {
    double y_i;
    int k;
    double tau;
    double sigma;
    double gamma;
    std::vector<double> lambda;   // size 4 (N = 3)
};

void criterion_8() {
    Timer t;
    const std::vector<SmallNPoint> points = {
        {0.9, 1, 0.6, 0.8, 0.5, {-kInf, 0.9, 1.2, kInf}},
        {-0.3, 0, 0.2, 0.5, 0.3, {1.5, 0.8, kInf, kInf}},
        {1.4, 2, 1.0, 1.2, 0.7, {-kInf, -kInf, 1.8, kInf}},
        {0.3, 1, 0.4, 0.3, 0.9, {-kInf, 0.7, kInf, kInf}},
        {0.0, 1, 0.1, 1.0, 0.2, {-kInf, 1.1, 2.0, kInf}},
    };
    bool pass = true;
    double worst = 0.0;
    std::vector<double> dev2(points.size()), dev1(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        const SmallNPoint& pt = points[i];
        const ModelParams params(pt.sigma, pt.gamma, Population::finite(3));
        ThresholdPolicy pol;
        pol.tau = pt.tau;
        pol.lambda = pt.lambda;

        // Rejection sampling on S = k/N, 1e6 accepted draws.
        std::mt19937_64 rng(660000 + i);
        std::normal_distribution<double> gauss;
        const Posterior post = posterior_of_signal(pt.y_i, pt.sigma);
        const double sd = std::sqrt(post.variance);
        double sum = 0.0, sum2 = 0.0;
        long acc = 0;
        const double lambda = pol.lambda[pt.k];
        while (acc < 1000000) {
            const double theta = post.mean + sd * gauss(rng);
            int actors = 0, late = 0;
            for (int j = 0; j < 2; ++j) {
                const double yj = theta + pt.sigma * gauss(rng);
                if (yj <= pt.tau)
                    ++actors;
                else if (yj <= lambda)
                    ++late;
            }
            if (actors != pt.k) continue;
            const double u = (late + 1.0) / 3.0 + pt.k / 3.0 - theta;
            sum += u;
            sum2 += u * u;
            ++acc;
        }
        const double mc_mean = sum / acc;
        const double mc_se =
            std::sqrt(std::max(sum2 / acc - mc_mean * mc_mean, 0.0) / acc);
        const double quad = second_stage_net_utility(pt.y_i, pt.k / 3.0, pol, params);
        dev2[i] = std::abs(quad - mc_mean) / mc_se;

        // Plain Monte Carlo for the first-stage net gain, 1e6 draws.
        double fsum = 0.0, fsum2 = 0.0;
        const long draws = 1000000;
        for (long d = 0; d < draws; ++d) {
            const double theta = post.mean + sd * gauss(rng);
            double yj[2];
            int k = 0;
            for (int j = 0; j < 2; ++j) {
                yj[j] = theta + pt.sigma * gauss(rng);
                if (yj[j] <= pt.tau) ++k;
            }
            const double lam_act = pol.lambda[k + 1];
            int ev_act = 0;
            for (int j = 0; j < 2; ++j)
                if (yj[j] <= std::max(pt.tau, lam_act)) ++ev_act;
            const double u_act = (ev_act + 1.0) / 3.0 - theta;
            double u_del = 0.0;
            if (pt.y_i <= pol.lambda[k]) {
                int ev = 0;
                for (int j = 0; j < 2; ++j)
                    if (yj[j] <= std::max(pt.tau, pol.lambda[k])) ++ev;
                u_del = (ev + 1.0) / 3.0 - theta;
            }
            const double u = u_act - pt.gamma * u_del;
            fsum += u;
            fsum2 += u * u;
        }
        const double f_mean = fsum / draws;
        const double f_se =
            std::sqrt(std::max(fsum2 / draws - f_mean * f_mean, 0.0) / draws);
        dev1[i] = std::abs(first_stage_net_gain(pt.y_i, pol, params) - f_mean) / f_se;
    });
    std::string detail = "SE deviations:";
    for (std::size_t i = 0; i < points.size(); ++i) {
        worst = std::max({worst, dev2[i], dev1[i]});
        detail += fmt(" [%zu] %.2f/%.2f", i, dev2[i], dev1[i]);
        if (dev2[i] > 3.0 || dev1[i] > 3.0) pass = false;
    }
    report(8, "small-N oracle equivalence", pass, t.seconds(),
           detail + fmt(" worst %.2f (tol 3 SE, 1e6 draws)", worst));
}

// --- C9: cross-module welfare consistency -------------------------------------
void criterion_9() {
    Timer t;
    bool pass = true;
    std::string detail;
    const std::vector<std::pair<double, double>> pts{{0.5, 0.8}, {0.3, 0.5}, {1.0, 0.2}};
    for (auto [sigma, gamma] : pts) {
        const ModelParams inf_params(sigma, gamma);
        const double tau_star = solve_two_stage(inf_params).tau_star;
        const int n = 10000, reps = 100;
        const ModelParams fin(sigma, gamma, Population::finite(n));
        const ThresholdPolicy pol = ThresholdPolicy::limit_policy(tau_star, sigma, n);
        std::vector<double> ws(reps);
        parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
            ws[r] = simulate_round(pol, fin, 90000 + 7 * r).total_welfare();
        });
        const oracle::MeanSe ms = oracle::summarize(ws);
        const double expected = w_two_stage(tau_star, inf_params);
        const double dev = std::abs(ms.mean - expected) / ms.se;
        detail += fmt(" (%.1f,%.1f): %.2f SE", sigma, gamma, dev);
        if (dev > 3.0) pass = false;
    }
    report(9, "simulated vs quadrature welfare", pass, t.seconds(),
           detail + " (tol 3 SE, N=1e4 x 100 reps)");
}

// --- C10: equilibrium/welfare gap and the three-way sandwich -------------------
void criterion_10(const std::vector<RegionCell>& cells) {
    Timer t;
    double best_gap = -kInf;
    std::string gap_detail;
    for (auto [sigma, gamma] : std::vector<std::pair<double, double>>{
             {0.5, 0.2}, {1.0, 0.2}, {1.0, 0.5}, {0.5, 0.8}}) {
        const ModelParams params(sigma, gamma);
        const ArgmaxResult am = welfare_argmax(params);
        const double w_eq = w_two_stage(solve_two_stage(params).tau_star, params);
        const double gap = am.w_opt - w_eq;
        best_gap = std::max(best_gap, gap);
        gap_detail += fmt(" (%.1f,%.1f): %.2e", sigma, gamma, gap);
    }

    // Sandwich W_two(tau*) < W_single(tau*_single) < max_tau W_two somewhere
    // in the sweep: look among detrimental cells.
    bool sandwich = false;
    double s_sigma = 0.0, s_gamma = 0.0;
    for (const RegionCell& c : cells) {
        if (!c.error.empty() || c.value >= 0.0) continue;
        try {
            const ModelParams params(c.sigma, c.gamma);
            const ArgmaxResult am =
                welfare_argmax(params, {-5.0, c.tau_star_single + 3.0});
            if (c.w_two < c.w_single && c.w_single < am.w_opt) {
                sandwich = true;
                s_sigma = c.sigma;
                s_gamma = c.gamma;
                break;
            }
        } catch (const std::exception&) {
            continue;   // try the next detrimental cell
        }
    }
    const bool pass = best_gap > 1e-4 && sandwich;
    report(10, "equilibrium/welfare gap + sandwich", pass, t.seconds(),
           fmt("max gap %.2e (tol >1e-4) at tested points:%s; sandwich %s "
               "(sigma=%.2f gamma=%.2f)",
               best_gap, gap_detail.c_str(), sandwich ? "exhibited" : "NOT FOUND",
               s_sigma, s_gamma));
}

} // namespace

int main() {
    std::printf("acceptance suite: two-stage coordination game\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    double sweep_secs = 0.0;
    const std::vector<RegionCell> cells = run_default_sweep(&sweep_secs);
    criterion_5(cells, sweep_secs);
    criterion_6(cells);
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10(cells);
    std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
    return failures;
}
