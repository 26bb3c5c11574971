#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twostage/finite_game.hpp"
#include "twostage/verify.hpp"
#include "twostage/welfare.hpp"

namespace py = pybind11;
using namespace twostage;

namespace {

ModelParams make_params(double sigma, double gamma, py::object population) {
    if (population.is_none()) return ModelParams(sigma, gamma);
    return ModelParams(sigma, gamma, Population::finite(population.cast<int>()));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-stage coordination game: thresholds, welfare, value of delay, "
              "finite-N simulation";

    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<Posterior>(m, "Posterior")
        .def_readonly("alpha", &Posterior::alpha)
        .def_readonly("mean", &Posterior::mean)
        .def_readonly("variance", &Posterior::variance)
        .def("__repr__", [](const Posterior& p) {
            return "Posterior(alpha=" + std::to_string(p.alpha) +
                   ", mean=" + std::to_string(p.mean) +
                   ", variance=" + std::to_string(p.variance) + ")";
        });

    py::class_<QuadratureSpec>(m, "QuadratureSpec")
        .def(py::init<>())
        .def_readwrite("node_count", &QuadratureSpec::node_count)
        .def_readwrite("domain_split", &QuadratureSpec::domain_split)
        .def_readwrite("tail_halfwidth", &QuadratureSpec::tail_halfwidth);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init(&make_params), py::arg("sigma"), py::arg("gamma"),
             py::arg("population") = py::none())
        .def_readonly("sigma", &ModelParams::sigma)
        .def_readonly("gamma", &ModelParams::gamma)
        .def_property_readonly("population",
                               [](const ModelParams& p) -> py::object {
                                   if (p.population.is_infinite) return py::none();
                                   return py::int_(p.population.n);
                               })
        .def_property_readonly("unique_guarantee", &ModelParams::unique_guarantee);

    py::class_<Bracket>(m, "Bracket")
        .def_readonly("low", &Bracket::low)
        .def_readonly("high", &Bracket::high);

    py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
        .def_readonly("tau_star", &EquilibriumSolution::tau_star)
        .def_readonly("residual", &EquilibriumSolution::residual)
        .def_readonly("bracket", &EquilibriumSolution::bracket)
        .def_readonly("iterations", &EquilibriumSolution::iterations)
        .def_readonly("unique", &EquilibriumSolution::unique);

    py::class_<RegionCell>(m, "RegionCell")
        .def_readonly("sigma", &RegionCell::sigma)
        .def_readonly("gamma", &RegionCell::gamma)
        .def_readonly("tau_star_two", &RegionCell::tau_star_two)
        .def_readonly("tau_star_single", &RegionCell::tau_star_single)
        .def_readonly("w_two", &RegionCell::w_two)
        .def_readonly("w_single", &RegionCell::w_single)
        .def_readonly("value", &RegionCell::value)
        .def_readonly("beneficial", &RegionCell::beneficial)
        .def_readonly("unique", &RegionCell::unique)
        .def_readonly("error", &RegionCell::error);

    py::class_<ArgmaxResult>(m, "ArgmaxResult")
        .def_readonly("tau_opt", &ArgmaxResult::tau_opt)
        .def_readonly("w_opt", &ArgmaxResult::w_opt)
        .def_readonly("grid_fallback", &ArgmaxResult::grid_fallback);

    py::class_<WelfareReport>(m, "WelfareReport")
        .def_readonly("tau", &WelfareReport::tau)
        .def_readonly("w_two_stage", &WelfareReport::w_two_stage)
        .def_readonly("w_single_stage", &WelfareReport::w_single_stage)
        .def_readonly("tau_welfare_opt", &WelfareReport::tau_welfare_opt)
        .def_readonly("w_at_opt", &WelfareReport::w_at_opt);

    py::class_<ThresholdPolicy>(m, "ThresholdPolicy")
        .def(py::init([](double tau, std::vector<double> lambda) {
                 ThresholdPolicy p;
                 p.tau = tau;
                 p.lambda = std::move(lambda);
                 return p;
             }),
             py::arg("tau"), py::arg("lambda_"))
        .def_static("limit_policy", &ThresholdPolicy::limit_policy, py::arg("tau"),
                    py::arg("sigma"), py::arg("n"))
        .def_static("single_stage", &ThresholdPolicy::single_stage, py::arg("tau"),
                    py::arg("n"))
        .def_readwrite("tau", &ThresholdPolicy::tau)
        .def_readwrite("lambda_", &ThresholdPolicy::lambda);

    py::class_<SimulationTrace>(m, "SimulationTrace")
        .def_readonly("theta", &SimulationTrace::theta)
        .def_readonly("signals", &SimulationTrace::signals)
        .def_readonly("stage1_actions", &SimulationTrace::stage1_actions)
        .def_readonly("stage2_actions", &SimulationTrace::stage2_actions)
        .def_readonly("participation", &SimulationTrace::participation)
        .def_readonly("payoffs", &SimulationTrace::payoffs)
        .def("total_welfare", &SimulationTrace::total_welfare);

    py::class_<BestResponseResult>(m, "BestResponseResult")
        .def_readonly("policy", &BestResponseResult::policy)
        .def_readonly("converged", &BestResponseResult::converged)
        .def_readonly("iterations", &BestResponseResult::iterations)
        .def_readonly("cycle_partner", &BestResponseResult::cycle_partner);

    py::class_<PropertyResult>(m, "PropertyResult")
        .def_readonly("name", &PropertyResult::name)
        .def_readonly("pass_", &PropertyResult::pass)
        .def_readonly("margin", &PropertyResult::margin)
        .def_readonly("detail", &PropertyResult::detail);

    m.def("std_pdf", &std_pdf, py::arg("x"));
    m.def("std_cdf", &std_cdf, py::arg("x"));
    m.def("std_cdf_inv", &std_cdf_inv, py::arg("p"));
    m.def("posterior_of_signal", &posterior_of_signal, py::arg("y"), py::arg("sigma"));
    m.def("posterior_expectation", &posterior_expectation, py::arg("post"),
          py::arg("g"), py::arg("spec") = QuadratureSpec{});

    m.def("delta_two_stage", &delta_two_stage, py::arg("tau"), py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("delta_single_stage", &delta_single_stage, py::arg("tau"), py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("solve_threshold", &solve_threshold, py::arg("delta"), py::arg("params"));
    m.def("solve_two_stage", &solve_two_stage, py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("solve_single_stage", &solve_single_stage, py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("delta_slope_bound", &delta_slope_bound, py::arg("params"));
    m.def("second_stage_policy", &second_stage_policy, py::arg("s"), py::arg("tau"),
          py::arg("sigma"));
    m.def("aggregate_action", &aggregate_action, py::arg("theta"), py::arg("tau"),
          py::arg("sigma"));
    m.def("dtau_dgamma", &dtau_dgamma, py::arg("params"),
          py::arg("spec") = QuadratureSpec{});

    m.def("w_two_stage", &w_two_stage, py::arg("tau"), py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("w_single_stage", &w_single_stage, py::arg("tau"), py::arg("sigma"),
          py::arg("spec") = QuadratureSpec{});
    m.def("w_two_stage_dtau", &w_two_stage_dtau, py::arg("tau"), py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("second_stage_value", &second_stage_value, py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def(
        "welfare_argmax",
        [](const ModelParams& params, std::pair<double, double> interval) {
            return welfare_argmax(params, interval);
        },
        py::arg("params"), py::arg("interval") = std::pair<double, double>{-5.0, 5.0});
    m.def(
        "welfare_report",
        [](const ModelParams& params, std::pair<double, double> interval) {
            return welfare_report(params, interval);
        },
        py::arg("params"), py::arg("interval") = std::pair<double, double>{-5.0, 5.0});
    m.def(
        "region_sweep",
        [](const std::vector<double>& sigmas, const std::vector<double>& gammas) {
            return region_sweep(sigmas, gammas);
        },
        py::arg("sigma_grid"), py::arg("gamma_grid"),
        py::call_guard<py::gil_scoped_release>());
    m.def("default_sigma_grid", &default_sigma_grid);
    m.def("default_gamma_grid", &default_gamma_grid);

    m.def("simulate_round", &simulate_round, py::arg("policy"), py::arg("params"),
          py::arg("seed"));
    m.def("recovered_fundamental", &recovered_fundamental, py::arg("s"), py::arg("tau"),
          py::arg("sigma"));
    m.def("finite_posterior_expectation", &finite_posterior_expectation, py::arg("g"),
          py::arg("y_i"), py::arg("s"), py::arg("tau"), py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("binomial_posterior_expectation", &binomial_posterior_expectation,
          py::arg("g"), py::arg("y_i"), py::arg("successes"), py::arg("trials"),
          py::arg("tau"), py::arg("sigma"), py::arg("spec") = QuadratureSpec{});
    m.def("second_stage_net_utility", &second_stage_net_utility, py::arg("y_i"),
          py::arg("s"), py::arg("policy"), py::arg("params"),
          py::arg("spec") = QuadratureSpec{});
    m.def("first_stage_net_gain", &first_stage_net_gain, py::arg("y_i"),
          py::arg("policy"), py::arg("params"), py::arg("spec") = QuadratureSpec{});
    m.def("second_stage_best_response", &second_stage_best_response, py::arg("policy"),
          py::arg("params"), py::arg("spec") = QuadratureSpec{});
    m.def("best_response_iteration", &best_response_iteration, py::arg("initial"),
          py::arg("params"), py::arg("max_iters"), py::arg("spec") = QuadratureSpec{},
          py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_property_suite",
        [](bool quick, std::uint64_t seed) {
            VerifyOptions opts;
            opts.quick = quick;
            opts.seed = seed;
            return run_property_suite(opts);
        },
        py::arg("quick") = true, py::arg("seed") = 8675309ULL,
        py::call_guard<py::gil_scoped_release>());
}
