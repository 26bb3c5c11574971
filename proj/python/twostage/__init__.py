"""Two-stage coordination game: equilibrium thresholds, welfare, value of
delay, and a seeded finite-N simulator.

Thin wrapper over the C++ core; see the package README for the model and
the CLI of the same name.
"""

from ._core import (  # noqa: F401
    ArgmaxResult,
    BestResponseResult,
    Bracket,
    EquilibriumSolution,
    ModelParams,
    NumericError,
    Posterior,
    PropertyResult,
    QuadratureSpec,
    RegionCell,
    SimulationTrace,
    SolverError,
    ThresholdPolicy,
    WelfareReport,
    aggregate_action,
    best_response_iteration,
    binomial_posterior_expectation,
    default_gamma_grid,
    default_sigma_grid,
    delta_single_stage,
    delta_slope_bound,
    delta_two_stage,
    dtau_dgamma,
    finite_posterior_expectation,
    first_stage_net_gain,
    posterior_expectation,
    posterior_of_signal,
    recovered_fundamental,
    region_sweep,
    run_property_suite,
    second_stage_best_response,
    second_stage_net_utility,
    second_stage_policy,
    second_stage_value,
    simulate_round,
    solve_single_stage,
    solve_threshold,
    solve_two_stage,
    std_cdf,
    std_cdf_inv,
    std_pdf,
    w_single_stage,
    w_two_stage,
    w_two_stage_dtau,
    welfare_argmax,
    welfare_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
