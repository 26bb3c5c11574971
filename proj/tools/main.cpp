#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "twostage/export.hpp"
#include "twostage/finite_game.hpp"
#include "twostage/verify.hpp"
#include "twostage/welfare.hpp"

namespace {

using nlohmann::json;
using namespace twostage;

constexpr std::uint64_t kDefaultSeed = 8675309;   // fixed so default runs reproduce

enum ExitCode { kOk = 0, kUsage = 1, kNumeric = 2, kIo = 3 };

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int steps = 1;
};

struct RunConfig {
    std::string command;
    double sigma = 0.5;
    double gamma = 0.8;
    GridSpec tau_grid{-3.0, 3.0, 121};
    GridSpec sigma_grid{0.05, 2.5, 50};
    GridSpec gamma_grid{0.02, 0.98, 49};
    std::string population = "inf";
    std::uint64_t seed = kDefaultSeed;
    int replications = 100;
    double tau_override = std::numeric_limits<double>::quiet_NaN();
    std::string output;
    std::string trace_output;
    std::string format = "csv";
    bool quick = false;
    bool inject_sign_bug = false;
};

int parse_population(const std::string& text) {
    if (text == "inf" || text == "infinite") return 0;
    const long n = std::stol(text);
    if (n < 2) throw std::domain_error("population must be an integer >= 2 or 'inf'");
    return static_cast<int>(n);
}

json config_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["sigma"] = round_sig(cfg.sigma);
    j["gamma"] = round_sig(cfg.gamma);
    j["tau_grid"] = {{"min", cfg.tau_grid.min}, {"max", cfg.tau_grid.max}, {"steps", cfg.tau_grid.steps}};
    j["sigma_grid"] = {{"min", cfg.sigma_grid.min}, {"max", cfg.sigma_grid.max}, {"steps", cfg.sigma_grid.steps}};
    j["gamma_grid"] = {{"min", cfg.gamma_grid.min}, {"max", cfg.gamma_grid.max}, {"steps", cfg.gamma_grid.steps}};
    j["population"] = cfg.population;
    j["seed"] = cfg.seed;
    j["replications"] = cfg.replications;
    j["format"] = cfg.format;
    return j;
}

void emit(const RunConfig& cfg, const Table& table, const json& diagnostics) {
    if (cfg.format == "json") {
        json doc;
        doc["config"] = config_json(cfg);
        doc["results"] = table_to_json(table);
        doc["diagnostics"] = diagnostics;
        if (cfg.output.empty()) {
            std::cout << doc.dump(2) << "\n";
        } else {
            std::ofstream os(cfg.output);
            if (!os) throw IoError("cannot open for writing: " + cfg.output);
            os << doc.dump(2) << "\n";
            if (!os.good()) throw IoError("write failed: " + cfg.output);
        }
    } else {
        if (cfg.output.empty())
            write_csv(std::cout, table);
        else
            write_csv_file(cfg.output, table);
    }
}

int cmd_solve(const RunConfig& cfg) {
    const ModelParams params(cfg.sigma, cfg.gamma);
    const EquilibriumSolution two = solve_two_stage(params);
    const EquilibriumSolution single = solve_single_stage(params);
    const double slope = params.unique_guarantee() ? dtau_dgamma(params)
                                                   : std::numeric_limits<double>::quiet_NaN();

    if (!params.unique_guarantee())
        std::cerr << "warning: sigma^2 >= 2*pi, threshold uniqueness is not guaranteed\n";
    // When stdout carries the machine payload, the summary moves to stderr.
    std::ostream& human =
        (cfg.output.empty() && cfg.format == "json") ? std::cerr : std::cout;
    human << "two-stage:    tau* = " << format_sig(two.tau_star)
          << "  residual = " << format_sig(two.residual, 3)
          << "  unique = " << (two.unique ? "yes" : "no") << "\n";
    human << "single-stage: tau* = " << format_sig(single.tau_star)
          << "  residual = " << format_sig(single.residual, 3)
          << "  unique = " << (single.unique ? "yes" : "no") << "\n";
    if (params.unique_guarantee())
        human << "dtau*/dgamma = " << format_sig(slope) << "\n";

    if (!cfg.output.empty() || cfg.format == "json") {
        Table t;
        t.header = {"sigma", "gamma", "tau_two", "residual_two", "tau_single",
                    "residual_single", "unique", "dtau_dgamma"};
        t.rows.push_back({format_sig(cfg.sigma), format_sig(cfg.gamma),
                          format_sig(two.tau_star), format_sig(two.residual, 3),
                          format_sig(single.tau_star), format_sig(single.residual, 3),
                          two.unique ? "1" : "0", format_sig(slope)});
        json diag;
        diag["iterations_two"] = two.iterations;
        diag["iterations_single"] = single.iterations;
        diag["bracket_two"] = {two.bracket.low, two.bracket.high};
        emit(cfg, t, diag);
    }
    return kOk;
}

int cmd_welfare(const RunConfig& cfg) {
    const ModelParams params(cfg.sigma, cfg.gamma);
    const std::vector<double> taus =
        linspace(cfg.tau_grid.min, cfg.tau_grid.max, cfg.tau_grid.steps);

    const double tau_star = solve_two_stage(params).tau_star;
    const std::pair<double, double> interval =
        cfg.tau_grid.steps > 1 ? std::pair<double, double>{cfg.tau_grid.min, cfg.tau_grid.max}
                               : std::pair<double, double>{-5.0, 5.0};
    const ArgmaxResult am = welfare_argmax(params, interval);

    std::vector<WelfareCurveRow> rows;
    rows.reserve(taus.size());
    for (double t : taus)
        rows.push_back({t, w_two_stage(t, params), w_single_stage(t, params.sigma),
                        w_two_stage_dtau(t, params), false, false});
    auto nearest = [&](double target) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < taus.size(); ++i)
            if (std::abs(taus[i] - target) < std::abs(taus[best] - target)) best = i;
        return best;
    };
    rows[nearest(tau_star)].is_tau_star = true;
    rows[nearest(am.tau_opt)].is_tau_welfare_opt = true;

    json diag;
    diag["tau_star"] = round_sig(tau_star);
    diag["tau_welfare_opt"] = round_sig(am.tau_opt);
    diag["w_at_opt"] = round_sig(am.w_opt);
    diag["grid_fallback"] = am.grid_fallback;
    emit(cfg, welfare_table(rows), diag);
    return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
    const std::vector<double> sigmas =
        linspace(cfg.sigma_grid.min, cfg.sigma_grid.max, cfg.sigma_grid.steps);
    const std::vector<double> gammas =
        linspace(cfg.gamma_grid.min, cfg.gamma_grid.max, cfg.gamma_grid.steps);
    const std::vector<RegionCell> cells = region_sweep(sigmas, gammas);

    std::size_t failed = 0;
    for (const RegionCell& c : cells)
        if (!c.error.empty()) ++failed;

    json diag;
    diag["cells"] = cells.size();
    diag["failed"] = failed;
    emit(cfg, sweep_table(cells), diag);
    std::cerr << "sweep: " << cells.size() << " cells, " << failed << " failed\n";
    return failed * 10 <= cells.size() ? kOk : kNumeric;   // >=90% must succeed
}

int cmd_simulate(const RunConfig& cfg) {
    const int n = parse_population(cfg.population);
    if (n == 0) throw std::domain_error("simulate requires a finite --population");
    if (cfg.replications < 1) throw std::domain_error("--replications must be >= 1");
    const ModelParams params(cfg.sigma, cfg.gamma, Population::finite(n));

    double tau = cfg.tau_override;
    if (std::isnan(tau)) tau = solve_two_stage(ModelParams(cfg.sigma, cfg.gamma)).tau_star;
    const ThresholdPolicy policy = ThresholdPolicy::limit_policy(tau, cfg.sigma, n);

    std::vector<ReplicationSummary> summaries;
    summaries.reserve(cfg.replications);
    std::vector<TraceRecord> records;
    const bool want_trace = !cfg.trace_output.empty();
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < cfg.replications; ++r) {
        const SimulationTrace tr = simulate_round(policy, params, cfg.seed + r);
        const double w = tr.total_welfare();
        sum += w;
        sum2 += w * w;
        summaries.push_back({r, tr.theta, tr.participation, w});
        if (want_trace)
            for (int i = 0; i < n; ++i)
                records.push_back({r, i, tr.theta, tr.signals[i], tr.stage1_actions[i],
                                   tr.stage2_actions[i], tr.payoffs[i]});
    }
    const double mean = sum / cfg.replications;
    const double var = std::max(sum2 / cfg.replications - mean * mean, 0.0);
    const double se = cfg.replications > 1 ? std::sqrt(var / cfg.replications) : 0.0;
    // Status goes to stderr so stdout stays clean when it carries the CSV.
    std::cerr << "mean welfare = " << format_sig(mean) << " +- " << format_sig(se, 6)
              << " (" << cfg.replications << " replications, N=" << n
              << ", tau=" << format_sig(tau, 6) << ")\n";

    json diag;
    diag["mean_welfare"] = round_sig(mean);
    diag["std_error"] = round_sig(se);
    diag["tau"] = round_sig(tau);
    emit(cfg, summary_table(summaries), diag);
    if (want_trace) write_csv_file(cfg.trace_output, trace_table(records));
    return kOk;
}

int cmd_verify(const RunConfig& cfg) {
    VerifyOptions opts;
    opts.quick = cfg.quick;
    opts.inject_sign_bug = cfg.inject_sign_bug;
    opts.seed = cfg.seed;
    const std::vector<PropertyResult> results = run_property_suite(opts);
    bool all_pass = true;
    for (const PropertyResult& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name
                  << "  margin=" << format_sig(r.margin, 4) << "  " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "verify: all properties pass\n"
                           : "verify: FAILURES present\n");
    return all_pass ? kOk : kNumeric;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Equilibrium thresholds, welfare and value-of-delay regions for a "
                 "two-stage coordination game with Gaussian signals, plus a finite-N "
                 "Monte Carlo simulator."};
    app.require_subcommand(1);
    // Config files carry one [section] per subcommand; pass --config before
    // the subcommand name: twostage --config file.cfg welfare
    app.set_config("--config", "", "Read defaults from a config file");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output", cfg.output, "Output file path (stdout when omitted)");
        sub->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    CLI::App* solve = app.add_subcommand("solve", "Solve both equilibrium thresholds");
    solve->add_option("--sigma", cfg.sigma, "Signal noise std dev")->required();
    solve->add_option("--gamma", cfg.gamma, "Discount factor in (0,1)")->required();
    add_common(solve);

    CLI::App* welfare = app.add_subcommand("welfare", "Welfare curve over a tau grid");
    welfare->add_option("--sigma", cfg.sigma, "Signal noise std dev")->required();
    welfare->add_option("--gamma", cfg.gamma, "Discount factor in (0,1)")->required();
    welfare->add_option("--tau-min", cfg.tau_grid.min, "Grid start")->capture_default_str();
    welfare->add_option("--tau-max", cfg.tau_grid.max, "Grid end")->capture_default_str();
    welfare->add_option("--tau-steps", cfg.tau_grid.steps, "Grid points (>= 1)")
        ->capture_default_str();
    add_common(welfare);

    CLI::App* sweep = app.add_subcommand("sweep", "Value-of-delay map over (sigma, gamma)");
    sweep->add_option("--sigma-min", cfg.sigma_grid.min)->capture_default_str();
    sweep->add_option("--sigma-max", cfg.sigma_grid.max)->capture_default_str();
    sweep->add_option("--sigma-steps", cfg.sigma_grid.steps)->capture_default_str();
    sweep->add_option("--gamma-min", cfg.gamma_grid.min)->capture_default_str();
    sweep->add_option("--gamma-max", cfg.gamma_grid.max)->capture_default_str();
    sweep->add_option("--gamma-steps", cfg.gamma_grid.steps)->capture_default_str();
    add_common(sweep);

    CLI::App* simulate = app.add_subcommand("simulate", "Seeded finite-N rounds");
    simulate->add_option("--sigma", cfg.sigma, "Signal noise std dev")->required();
    simulate->add_option("--gamma", cfg.gamma, "Discount factor in (0,1)")->required();
    simulate->add_option("--population", cfg.population, "Finite N (>= 2)")->required();
    simulate->add_option("--replications", cfg.replications)->capture_default_str();
    simulate->add_option("--seed", cfg.seed, "Default 8675309; fixed for reproducibility")
        ->capture_default_str();
    simulate->add_option("--tau", cfg.tau_override,
                         "First-stage threshold (default: solved equilibrium)");
    simulate->add_option("--trace-output", cfg.trace_output, "Per-agent trace file");
    add_common(simulate);

    CLI::App* verify = app.add_subcommand("verify", "Run the cross-module property battery");
    verify->add_flag("--quick", cfg.quick, "Small-N variants, sub-minute runtime");
    verify->add_option("--seed", cfg.seed)->capture_default_str();
    verify->add_flag("--inject-sign-bug", cfg.inject_sign_bug)->group("");   // test-only canary

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (solve->parsed()) return (cfg.command = "solve", cmd_solve(cfg));
        if (welfare->parsed()) return (cfg.command = "welfare", cmd_welfare(cfg));
        if (sweep->parsed()) return (cfg.command = "sweep", cmd_sweep(cfg));
        if (simulate->parsed()) return (cfg.command = "simulate", cmd_simulate(cfg));
        if (verify->parsed()) return (cfg.command = "verify", cmd_verify(cfg));
        std::cerr << "no subcommand\n";
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
}
