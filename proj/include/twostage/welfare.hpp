#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twostage/equilibrium.hpp"

namespace twostage {

struct WelfareReport {
    double tau;              // equilibrium threshold of the two-stage game
    double w_two_stage;
    double w_single_stage;   // at the single-stage equilibrium threshold
    double tau_welfare_opt;
    double w_at_opt;
};

// One point of the (sigma, gamma) region map.
struct RegionCell {
    double sigma = 0.0;
    double gamma = 0.0;
    double tau_star_two = 0.0;
    double tau_star_single = 0.0;
    double w_two = 0.0;      // at tau_star_two
    double w_single = 0.0;   // at tau_star_single
    double value = 0.0;      // V(sigma, gamma) = w_two - w_single
    bool beneficial = false;
    bool unique = false;
    std::string error;       // empty on success
};

// Equilibrium welfare of the two-stage game at threshold tau, integrated
// against the standard-normal prior (not the posterior).
double w_two_stage(double tau, const ModelParams& params,
                   const QuadratureSpec& spec = {});

double w_single_stage(double tau, double sigma, const QuadratureSpec& spec = {});

// Analytic d/dtau of w_two_stage:
// f_Y(tau) * [delta_two_stage(tau) + E[Phi((tau-Theta)/sigma) 1(Theta>1) | Y=tau]],
// with f_Y the N(0, 1+sigma^2) marginal density of the signal.
double w_two_stage_dtau(double tau, const ModelParams& params,
                        const QuadratureSpec& spec = {});

// Solves both games and evaluates each welfare at its own equilibrium.
RegionCell second_stage_value(const ModelParams& params,
                              const QuadratureSpec& spec = {});

struct ArgmaxResult {
    double tau_opt;
    double w_opt;
    bool grid_fallback;   // non-unimodal profile, reported grid argmax
};

// Golden-section maximum of w_two_stage over the interval, to width 1e-6.
// Falls back to a 10^4-point grid scan if the coarse profile is not
// unimodal. Postcondition: w_opt >= w_two_stage(tau*) - 1e-9.
ArgmaxResult welfare_argmax(const ModelParams& params,
                            std::pair<double, double> interval = {-5.0, 5.0},
                            const QuadratureSpec& spec = {});

// Full report at the equilibrium threshold.
WelfareReport welfare_report(const ModelParams& params,
                             std::pair<double, double> argmax_interval = {-5.0, 5.0},
                             const QuadratureSpec& spec = {});

// One RegionCell per (sigma, gamma) grid point, sigma-major order.
// Cells are computed in parallel; per-cell failures are recorded in the
// cell's error field and never abort the sweep.
std::vector<RegionCell> region_sweep(std::span<const double> sigma_grid,
                                     std::span<const double> gamma_grid,
                                     const QuadratureSpec& spec = {});

// The default region-map grids: sigma in [0.05, 2.5] x 50,
// gamma in [0.02, 0.98] x 49.
std::vector<double> default_sigma_grid();
std::vector<double> default_gamma_grid();

// Uniform grid helper (count >= 1; count == 1 yields {lo}).
std::vector<double> linspace(double lo, double hi, int count);

} // namespace twostage
