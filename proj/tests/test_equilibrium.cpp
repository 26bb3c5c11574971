#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "twostage/equilibrium.hpp"

using namespace twostage;

namespace {
// 30-digit-arithmetic references.
constexpr double kDeltaTwoAt0 = 0.18590774898198445;   // delta_two(0; 0.5, 0.8)
constexpr double kTauTwo = 0.54960814874253844;        // tau*(0.5, 0.8)
constexpr double kTauSingle = 0.73313916455272559;     // tau*_single(0.5)
constexpr double kPhiMinus1 = 0.15865525393145705;
} // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("model params validation and uniqueness flag") {
    CHECK_THROWS_AS(ModelParams(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(ModelParams(-1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(ModelParams(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(ModelParams(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Population::finite(1), std::domain_error);

    CHECK(ModelParams(2.506, 0.5).unique_guarantee());        // 2.506^2 < 2*pi
    CHECK_FALSE(ModelParams(2.5067, 0.5).unique_guarantee()); // 2.5067^2 > 2*pi
    CHECK(ModelParams(1.0, 0.5, Population::finite(2)).population.n == 2);
}

TEST_CASE("delta_two_stage: tail signs and oracle value") {
    const ModelParams params(0.5, 0.8);
    CHECK(delta_two_stage(-30.0, params) > 0.0);
    CHECK(delta_two_stage(30.0, params) < 0.0);

    const double impl = delta_two_stage(0.0, params);
    CHECK(std::abs(impl - kDeltaTwoAt0) <= 1e-9);
    CHECK(std::abs(impl - oracle::delta_two(0.0, 0.5, 0.8)) <= 1e-8);
}

TEST_CASE("delta_single_stage: signs, closed form, small-sigma root") {
    const ModelParams params(1.0, 0.5);
    CHECK(delta_single_stage(-30.0, params) > 0.0);

    // At tau=0, sigma=1: E[Phi(-Theta)] = 1/2 and E[Theta] = 0 exactly.
    CHECK(std::abs(delta_single_stage(0.0, params) - 0.5) <= 1e-10);
    CHECK(std::abs(delta_single_stage(0.0, params) - oracle::delta_single(0.0, 1.0)) <= 1e-8);

    // tau*_single -> 1/2 as sigma -> 0, so delta at 1/2 is already tiny.
    CHECK(std::abs(delta_single_stage(0.5, ModelParams(0.001, 0.5))) <= 1e-3);
}

TEST_CASE("solve_threshold: residual, bracket, frozen roots") {
    const ModelParams params(0.5, 0.8);
    const EquilibriumSolution two = solve_two_stage(params);
    CHECK(two.residual <= 1e-9);
    CHECK(two.unique);
    CHECK(std::abs(two.tau_star - kTauTwo) <= 1e-7);
    CHECK(delta_two_stage(two.bracket.low, params) > 0.0);
    CHECK(delta_two_stage(two.bracket.high, params) < 0.0);

    const EquilibriumSolution single = solve_single_stage(ModelParams(0.5, 0.5));
    CHECK(single.residual <= 1e-9);
    CHECK(std::abs(single.tau_star - kTauSingle) <= 1e-7);
}

TEST_CASE("solve_threshold matches a dense grid scan of the oracle delta") {
    const ModelParams params(0.5, 0.8);
    const double tau = solve_two_stage(params).tau_star;
    // 1e5-point scan of the independent Simpson oracle across tau* +- 0.05.
    auto f = [&](double t) { return oracle::delta_two(t, 0.5, 0.8, 2048); };
    REQUIRE(f(tau - 0.05) > 0.0);
    REQUIRE(f(tau + 0.05) < 0.0);
    const double root = oracle::grid_root_scan(f, tau - 0.05, tau + 0.05, 100000);
    CHECK(std::abs(tau - root) <= 1e-4);
}

TEST_CASE("solve_threshold: small-sigma limits approach 1 and 1/2") {
    // The paper's limits are tau* -> 1 and tau*_single -> 1/2; the rate in
    // sigma is slow (~ sigma * sqrt(2 log(1/sigma))).
    const double t_two = solve_two_stage(ModelParams(0.01, 0.5)).tau_star;
    CHECK(std::abs(t_two - 1.0) <= 0.03);
    const double t_single = solve_single_stage(ModelParams(0.01, 0.5)).tau_star;
    CHECK(std::abs(t_single - 0.5) <= 0.02);

    const double nearer = solve_two_stage(ModelParams(0.005, 0.5)).tau_star;
    const double farther = solve_two_stage(ModelParams(0.02, 0.5)).tau_star;
    CHECK(std::abs(nearer - 1.0) < std::abs(farther - 1.0));
}

TEST_CASE("solve_threshold: sigma^2 >= 2*pi still solves, flags non-unique") {
    const EquilibriumSolution sol = solve_two_stage(ModelParams(3.0, 0.5));
    CHECK_FALSE(sol.unique);
    CHECK(sol.residual <= 1e-9);
}

TEST_CASE("solve_threshold: degenerate delta raises SolverError") {
    const ModelParams params(0.5, 0.5);
    CHECK_THROWS_AS(solve_threshold([](double) { return 1.0; }, params), SolverError);
    CHECK_THROWS_AS(solve_threshold([](double) { return -1.0; }, params), SolverError);
}

TEST_CASE("delta_slope_bound: closed-form values and domain") {
    // alpha = 1/2: max(-0.25, 0.5*(1/sqrt(2 pi) - 1)) = -0.25.
    CHECK(delta_slope_bound(ModelParams(1.0, 0.5)) == doctest::Approx(-0.25).epsilon(1e-12));
    // sigma -> 0: alpha -> 1 and the second term -> -1, so the bound is -(1-gamma).
    CHECK(delta_slope_bound(ModelParams(1e-8, 0.5)) == doctest::Approx(-0.5).epsilon(1e-6));
    // Approaches 0 from below at the uniqueness boundary.
    const double near = delta_slope_bound(ModelParams(std::sqrt(2.0 * M_PI) - 1e-6, 0.9));
    CHECK(near < 0.0);
    CHECK(near > -1e-4);
    CHECK_THROWS_AS(delta_slope_bound(ModelParams(2.6, 0.5)), std::domain_error);
}

TEST_CASE("delta_two_stage is strictly decreasing with bounded slope") {
    for (auto [sigma, gamma] : {std::pair{0.5, 0.8}, std::pair{1.5, 0.3}}) {
        const ModelParams params(sigma, gamma);
        const double bound = delta_slope_bound(params);
        double prev = delta_two_stage(-5.0, params);
        for (int i = 1; i <= 100; ++i) {
            const double t = -5.0 + 0.1 * i;
            const double v = delta_two_stage(t, params);
            CHECK(v < prev);
            CHECK((v - prev) / 0.1 <= bound + 1e-6);
            prev = v;
        }
    }
}

TEST_CASE("second_stage_policy: saturation, ties, inverse-CDF view") {
    CHECK(second_stage_policy(1.0, 5.0, 0.3));
    CHECK(second_stage_policy(1.0, -5.0, 0.3));
    const double tie = std_cdf((0.7 - 1.0) / 0.4);
    CHECK(second_stage_policy(tie, 0.7, 0.4));   // weak inequality: acts
    // Recovered fundamental at s=0.1 is -Phi^{-1}(0.1) = 1.2816 > 1: stay out.
    CHECK_FALSE(second_stage_policy(0.1, 0.0, 1.0));
    CHECK(std::abs((0.0 - 1.0 * std_cdf_inv(0.1)) - 1.2815515655446004) <= 1e-9);
    // The two formulations agree on an s-grid.
    for (int i = 1; i < 100; ++i) {
        const double s = i / 100.0;
        const bool via_phi = second_stage_policy(s, 0.7, 0.4);
        const bool via_inverse = (0.7 - 0.4 * std_cdf_inv(s)) <= 1.0;
        CHECK(via_phi == via_inverse);
    }
    CHECK_THROWS_AS(second_stage_policy(-0.1, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(second_stage_policy(1.1, 0.0, 1.0), std::domain_error);
}

TEST_CASE("aggregate_action: piecewise form and the drop at 1") {
    CHECK(aggregate_action(0.5, 2.0, 0.1) == 1.0);
    CHECK(aggregate_action(1.5, 1.5, 0.7) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(aggregate_action(2.0, 1.0, 1.0) - kPhiMinus1) <= 1e-12);
    CHECK(aggregate_action(1.0, -3.0, 0.5) == 1.0);
    CHECK(aggregate_action(1.0 + 1e-9, -3.0, 0.5) < 1e-10);
}

TEST_CASE("dtau_dgamma: sign, re-solve finite difference, small-sigma decay") {
    const double analytic = dtau_dgamma(ModelParams(0.5, 0.5));
    CHECK(analytic < 0.0);
    const double h = 1e-3;
    const double fd = (solve_two_stage(ModelParams(0.5, 0.5 + h)).tau_star -
                       solve_two_stage(ModelParams(0.5, 0.5 - h)).tau_star) /
                      (2.0 * h);
    CHECK(std::abs(analytic - fd) <= 1e-3 * std::abs(fd));

    for (auto [sigma, gamma] : {std::pair{0.3, 0.2}, std::pair{1.2, 0.7}})
        CHECK(dtau_dgamma(ModelParams(sigma, gamma)) < 0.0);

    // tau* is pinned near 1 for sigma -> 0, so the sensitivity dies out.
    CHECK(std::abs(dtau_dgamma(ModelParams(0.01, 0.5))) < 0.05);
    CHECK_THROWS_AS(dtau_dgamma(ModelParams(2.6, 0.5)), std::domain_error);
}

TEST_CASE("comparative statics: tau* strictly decreasing in gamma") {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 9; ++i) {
        const double tau = solve_two_stage(ModelParams(0.5, 0.1 * i)).tau_star;
        CHECK(tau < prev);
        prev = tau;
    }
}

TEST_CASE("ordering holds at small gamma (two-stage above single-stage)") {
    // In the population limit the delay option raises
    // the first-stage threshold for gamma below a sigma-dependent bar.
    for (double sigma : {0.25, 0.5, 1.0}) {
        const double ts = solve_single_stage(ModelParams(sigma, 0.5)).tau_star;
        const double t2 = solve_two_stage(ModelParams(sigma, 0.05)).tau_star;
        CHECK(t2 > ts);
    }
    const double ts = solve_single_stage(ModelParams(0.5, 0.5)).tau_star;
    for (double gamma : {0.1, 0.2, 0.3, 0.4, 0.5})
        CHECK(solve_two_stage(ModelParams(0.5, gamma)).tau_star > ts);

    // At vanishing discount the two-stage gain at the single-stage root stays positive.
    for (double sigma : {0.5, 1.5, 2.4}) {
        const double root = solve_single_stage(ModelParams(sigma, 0.5)).tau_star;
        CHECK(delta_two_stage(root, ModelParams(sigma, 1e-6)) > 0.0);
    }
}

} // TEST_SUITE
