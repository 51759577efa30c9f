// simwt: similarity-based weighting of external subgroup data for
// small-sample prediction modeling. Subcommands: simulate, weigh, grid,
// bootstrap.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simwt/bootstrap.hpp"
#include "simwt/csv.hpp"
#include "simwt/errors.hpp"
#include "simwt/glm.hpp"
#include "simwt/harness.hpp"
#include "simwt/scm.hpp"
#include "simwt/weights.hpp"

namespace {

// exit codes: 0 success, 2 usage, 3 data, 4 numerical
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct SimulateArgs {
    std::string scenario = "covariate";
    int externals = 3;
    std::string similarity = "similar";
    int target_n = 15;
    int external_n = 30;
    int k = 3;
    int c = 1;
    std::uint64_t seed = 1;
    std::vector<double> shifts;  // overrides the similarity-derived sequence
    bool categorical_membership = false;
    std::string out;
};

struct WeighArgs {
    std::string input;
    std::string target;
    std::optional<double> truncate_pct;
    bool no_auc_adjustment = false;
    std::string out_weights;
    std::string out_json;
};

struct GridArgs {
    std::vector<std::string> kinds{"covariate", "outcome", "covariate-outcome"};
    std::vector<std::string> similarities{"similar", "medium", "dissimilar"};
    std::vector<int> external_counts{1, 3, 5, 7};
    std::vector<int> external_sizes{10, 20, 30, 40, 50};
    std::vector<int> target_sizes{10, 15, 20};
    int k = 3;
    int c = 1;
    int replicates = 100;
    int n_test = 100;
    std::uint64_t seed = 1;
    std::optional<double> truncate_pct;
    int jobs = 0;
    std::string out_results;
    std::string out_summary;
};

struct BootstrapArgs {
    std::string input;
    std::string target;
    bool all_targets = false;
    int B = 1000;
    std::string loss = "absolute";
    std::optional<double> boxcox_lambda;
    std::optional<double> truncate_pct;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out_json;
    std::string out_obs;
    std::string out_cdf;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw simwt::DataError("cannot write '" + path + "'");
    return out;
}

int cmd_simulate(const SimulateArgs& a) {
    simwt::ScenarioSpec spec;
    spec.kind = simwt::scenario_kind_from_string(a.scenario);
    spec.shift_vector = a.shifts.empty()
                            ? simwt::make_shift_vector(
                                  a.externals, simwt::similarity_from_string(a.similarity))
                            : a.shifts;
    if (!a.shifts.empty() && static_cast<int>(a.shifts.size()) != a.externals + 1)
        throw simwt::ValueError("--shifts needs externals + 1 entries (target first)");
    spec.subgroup_sizes.assign(static_cast<std::size_t>(a.externals) + 1, a.external_n);
    spec.subgroup_sizes[0] = a.target_n;
    spec.k = a.k;
    spec.c = a.c;
    spec.seed = a.seed;
    spec.categorical_membership = a.categorical_membership;

    const simwt::SimulatedData sim = simwt::simulate(spec);
    simwt::write_dataset_csv_file(a.out, sim.data);

    std::cout << "shift vector:";
    for (double v : spec.shift_vector) std::cout << ' ' << simwt::format_double(v);
    std::cout << "\nwrote " << sim.data.n_rows() << " rows to " << a.out << "\n";
    return 0;
}

int cmd_weigh(const WeighArgs& a) {
    const simwt::Dataset data = simwt::read_dataset_csv_file(a.input);
    auto [target, externals] = simwt::split_by_target(data, a.target);
    if (externals.empty())
        throw simwt::DataError("input has no external subgroups besides '" + a.target + "'");

    simwt::WeightOptions opt;
    opt.truncation_percentile = a.truncate_pct;
    opt.auc_adjustment = !a.no_auc_adjustment;
    const simwt::WeightedSample ws = simwt::build_weighted_sample(target, externals, opt);

    if (!a.out_weights.empty()) {
        auto out = open_output(a.out_weights);
        simwt::write_weights_csv(out, ws);
    }
    const nlohmann::json diag = simwt::weigh_diagnostics_json(ws);
    if (!a.out_json.empty()) {
        auto out = open_output(a.out_json);
        out << diag.dump(2) << '\n';
    }
    std::cout << "target '" << a.target << "': n=" << ws.n_target
              << " ess=" << simwt::format_double(ws.ess)
              << " ess_ratio=" << simwt::format_double(ws.ess_ratio) << "\n";
    for (const auto& c : ws.comparisons) {
        std::cout << "  external '" << c.external_label
                  << "': auc=" << simwt::format_double(c.auc) << "\n";
    }
    for (const auto& f : ws.failures) {
        std::cout << "  external '" << f.external_label << "': FAILED (" << f.reason << ")\n";
    }
    return 0;
}

int cmd_grid(const GridArgs& a) {
    simwt::GridSpec spec;
    spec.kinds.clear();
    for (const auto& s : a.kinds) spec.kinds.push_back(simwt::scenario_kind_from_string(s));
    spec.similarities.clear();
    for (const auto& s : a.similarities)
        spec.similarities.push_back(simwt::similarity_from_string(s));
    spec.external_counts = a.external_counts;
    spec.external_sizes = a.external_sizes;
    spec.target_sizes = a.target_sizes;
    spec.k = a.k;
    spec.c = a.c;
    spec.replicates = a.replicates;
    spec.n_test = a.n_test;
    spec.master_seed = a.seed;
    spec.truncation_percentile = a.truncate_pct;
    spec.jobs = a.jobs;

    const simwt::GridResults results = simwt::run_grid(spec);
    if (!a.out_results.empty()) {
        auto out = open_output(a.out_results);
        simwt::write_results_csv(out, results.cells);
    }
    const nlohmann::json summary = simwt::grid_summary_json(results.summary);
    if (!a.out_summary.empty()) {
        auto out = open_output(a.out_summary);
        out << summary.dump(2) << '\n';
    }
    std::cout << "cells: " << results.summary.total_cells << "\n"
              << "average rmse: weighted=" << simwt::format_double(results.summary.averages.rmse_weighted)
              << " p_only=" << simwt::format_double(results.summary.averages.rmse_p_only)
              << " local=" << simwt::format_double(results.summary.averages.rmse_local)
              << " global=" << simwt::format_double(results.summary.averages.rmse_global) << "\n"
              << "average ess ratio: weighted="
              << simwt::format_double(results.summary.averages.ess_ratio_weighted)
              << " p_only=" << simwt::format_double(results.summary.averages.ess_ratio_p_only)
              << "\n";
    return 0;
}

int cmd_bootstrap(const BootstrapArgs& a) {
    const simwt::Dataset data = simwt::read_dataset_csv_file(a.input);

    simwt::BootstrapOptions opt;
    opt.B = a.B;
    opt.loss = a.loss == "squared" ? simwt::LossKind::Squared : simwt::LossKind::Absolute;
    opt.boxcox_lambda = a.boxcox_lambda;
    opt.truncation_percentile = a.truncate_pct;
    opt.seed = a.seed;
    opt.jobs = a.jobs;

    std::vector<std::string> targets;
    if (a.all_targets) {
        targets = data.subgroup_labels();
    } else {
        targets.push_back(a.target);
    }

    nlohmann::json reports = nlohmann::json::array();
    std::ofstream obs_out, cdf_out;
    if (!a.out_obs.empty()) obs_out = open_output(a.out_obs);
    if (!a.out_cdf.empty()) cdf_out = open_output(a.out_cdf);
    bool first = true;
    for (const std::string& t : targets) {
        const simwt::BootstrapReport report = simwt::run_bootstrap_report(data, t, opt);
        reports.push_back(simwt::bootstrap_report_json(report));
        if (obs_out.is_open()) {
            if (first) {
                simwt::write_observation_errors_csv(obs_out, report);
            } else {
                std::ostringstream tmp;
                simwt::write_observation_errors_csv(tmp, report);
                const std::string s = tmp.str();
                obs_out << s.substr(s.find('\n') + 1);  // skip the repeated header
            }
        }
        if (cdf_out.is_open()) {
            if (first) {
                simwt::write_cdf_csv(cdf_out, report);
            } else {
                std::ostringstream tmp;
                simwt::write_cdf_csv(tmp, report);
                const std::string s = tmp.str();
                cdf_out << s.substr(s.find('\n') + 1);
            }
        }
        first = false;
        std::cout << "target '" << t << "':\n";
        for (const auto& m : report.methods) {
            std::cout << "  " << simwt::to_string(m.method)
                      << ": estimate=" << simwt::format_double(m.estimate)
                      << " apparent=" << simwt::format_double(m.apparent_error)
                      << " oob=" << simwt::format_double(m.oob_error)
                      << " ess=" << simwt::format_double(m.training_ess) << "\n";
        }
    }
    if (!a.out_json.empty()) {
        auto out = open_output(a.out_json);
        out << (a.all_targets ? reports : reports.front()).dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Similarity-weighted external data for small-sample prediction models"};
    app.require_subcommand(1);
    const char* env_config = std::getenv("SIMWT_CONFIG");
    app.set_config("--config", env_config ? env_config : "",
                   "Config file with key=value lines mirroring the flag names; "
                   "flags win on conflict");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Draw one scenario and write it as CSV");
    sim_cmd->add_option("--scenario", sim.scenario, "covariate | outcome | covariate-outcome")
        ->capture_default_str();
    sim_cmd->add_option("--externals", sim.externals, "Number of external subgroups")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--similarity", sim.similarity, "similar | medium | dissimilar")
        ->capture_default_str();
    sim_cmd->add_option("--target-n", sim.target_n, "Target subgroup size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--external-n", sim.external_n, "Size of each external subgroup")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--k", sim.k, "Subgroup-specific covariates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--c", sim.c, "Global covariates")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
    sim_cmd
        ->add_option("--shifts", sim.shifts,
                     "Explicit shift sequence (target first), overrides --similarity")
        ->delimiter(',');
    sim_cmd->add_flag("--categorical-membership", sim.categorical_membership,
                      "Draw subgroup membership categorically instead of fixed blocks");
    sim_cmd->add_option("--out", sim.out, "Output CSV path")->required();

    WeighArgs weigh;
    auto* weigh_cmd =
        app.add_subcommand("weigh", "Compute similarity weights for a target subgroup");
    weigh_cmd->add_option("--input", weigh.input, "Input CSV (subgroup,y,covariates...)")
        ->required();
    weigh_cmd->add_option("--target", weigh.target, "Target subgroup label")->required();
    weigh_cmd
        ->add_option_function<double>(
            "--truncate-pct", [&weigh](double v) { weigh.truncate_pct = v; },
            "Zero external weights below this percentile of the target scores")
        ->check(CLI::Range(0.0, 100.0));
    weigh_cmd->add_flag("--no-auc-adjustment", weigh.no_auc_adjustment,
                        "Use raw propensity scores without the 1/AUC adjustment");
    weigh_cmd->add_option("--out-weights", weigh.out_weights, "Weights CSV path");
    weigh_cmd->add_option("--out-json", weigh.out_json, "Diagnostics JSON path");

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("grid", "Run the simulation grid");
    grid_cmd->add_option("--kinds", grid.kinds, "Scenario kinds")
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--similarities", grid.similarities)
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--external-counts", grid.external_counts)
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--external-sizes", grid.external_sizes)
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--target-sizes", grid.target_sizes)
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--k", grid.k)->check(CLI::PositiveNumber)->capture_default_str();
    grid_cmd->add_option("--c", grid.c)->check(CLI::NonNegativeNumber)->capture_default_str();
    grid_cmd->add_option("--replicates", grid.replicates)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    grid_cmd->add_option("--n-test", grid.n_test)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    grid_cmd->add_option("--seed", grid.seed, "Master seed")->capture_default_str();
    grid_cmd->add_option_function<double>(
        "--truncate-pct", [&grid](double v) { grid.truncate_pct = v; },
        "Truncation percentile for both weighted pipelines");
    grid_cmd->add_option("--jobs", grid.jobs, "Worker threads (0 = all processors)")
        ->capture_default_str();
    grid_cmd->add_option("--out-results", grid.out_results, "Per-cell results CSV path");
    grid_cmd->add_option("--out-summary", grid.out_summary, "Summary JSON path");

    BootstrapArgs boot;
    auto* boot_cmd =
        app.add_subcommand("bootstrap", ".632+ bootstrap prediction error on tabular data");
    boot_cmd->add_option("--input", boot.input, "Input CSV")->required();
    boot_cmd->add_option("--target", boot.target, "Target subgroup label");
    boot_cmd->add_flag("--all-targets", boot.all_targets, "Iterate every subgroup as the target");
    boot_cmd->add_option("-B,--bootstrap-samples", boot.B)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    boot_cmd->add_option("--loss", boot.loss, "absolute | squared")->capture_default_str();
    boot_cmd->add_option_function<double>(
        "--boxcox-lambda", [&boot](double v) { boot.boxcox_lambda = v; },
        "Power-transform the outcome before fitting (2 squares it)");
    boot_cmd->add_option_function<double>(
        "--truncate-pct", [&boot](double v) { boot.truncate_pct = v; },
        "Truncation percentile for the weighted pipeline");
    boot_cmd->add_option("--seed", boot.seed)->capture_default_str();
    boot_cmd->add_option("--jobs", boot.jobs)->capture_default_str();
    boot_cmd->add_option("--out-json", boot.out_json, "Report JSON path");
    boot_cmd->add_option("--out-obs", boot.out_obs, "Per-observation error CSV path");
    boot_cmd->add_option("--out-cdf", boot.out_cdf, "Outcome CDF CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (weigh_cmd->parsed()) return cmd_weigh(weigh);
        if (grid_cmd->parsed()) return cmd_grid(grid);
        if (boot_cmd->parsed()) {
            if (!boot.all_targets && boot.target.empty()) {
                std::cerr << "bootstrap: --target or --all-targets required\n";
                return kExitUsage;
            }
            return cmd_bootstrap(boot);
        }
    } catch (const simwt::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const simwt::ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const simwt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
