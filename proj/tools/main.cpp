// qreduce — command-line front end: run a single trajectory, a Monte-Carlo
// ensemble, or a g-sweep, and write the plot-ready CSV/JSON artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qreduce/io.hpp"
#include "qreduce/oracles.hpp"

namespace fs = std::filesystem;
using namespace qreduce;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    int workers = 0;
};

RunConfig load_config(const CommonArgs& args, bool config_optional = false) {
    std::string path = args.config_path;
    std::vector<std::string> overrides = args.overrides;
    // A subcommand with an optional config may receive an override first.
    if (config_optional && !path.empty() && path.find('=') != std::string::npos &&
        !fs::exists(path)) {
        overrides.insert(overrides.begin(), path);
        path.clear();
    }
    RunConfig config = path.empty() ? RunConfig{} : RunConfig::parse_file(path);
    for (const auto& kv : overrides) config.apply_override(kv);
    return config;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("config", args.config_path, "run configuration file");
    if (config_required) opt->required();
    cmd->add_option("overrides", args.overrides, "key=value overrides applied after the file");
    cmd->add_option("--workers", args.workers,
                    "parallel trajectory workers (0 = hardware concurrency)");
}

int run_trajectory_cmd(const CommonArgs& args, int path_index) {
    const RunConfig config = load_config(args);
    const ExperimentSpec spec = config.to_spec();
    const TrajectoryRecord record = run_trajectory(spec, path_index);
    if (!record.valid) throw CutoffExceeded(record.invalid_reason);

    const fs::path out_dir = config.resolved_out_dir();
    write_trajectory_csv(out_dir / "trajectory.csv", record);

    std::cout << "trajectory: " << record.times.size() << " samples";
    if (record.stopping_time)
        std::cout << ", reduced at t=" << format_sig(*record.stopping_time) << " (outcome "
                  << (*record.outcome > 0 ? "+1" : "-1") << ")";
    else
        std::cout << ", no reduction by t_max";
    std::cout << "\nwrote " << (out_dir / "trajectory.csv").string() << "\n";
    return 0;
}

int run_ensemble_cmd(const CommonArgs& args) {
    const RunConfig config = load_config(args);
    const ExperimentSpec spec = config.to_spec();
    const EnsembleResult result = run_ensemble(spec, args.workers);

    const fs::path out_dir = config.resolved_out_dir();
    write_paths_csv(out_dir / "paths.csv", result);
    write_summary_json(out_dir / "summary.json", result, config);

    const std::vector<double> taus = result.stopping_times();
    bool wrote_kde = false;
    if (taus.size() >= 2) {
        const auto [lo, hi] = std::minmax_element(taus.begin(), taus.end());
        if (*hi > *lo) {
            write_kde_csv(out_dir / "kde.csv", gaussian_kde(taus));
            wrote_kde = true;
        }
    }

    std::cout << "ensemble: " << result.paths.size() << " paths, +1/-1/none = "
              << result.count_plus << "/" << result.count_minus << "/"
              << result.count_unreduced;
    if (result.mean_tau) std::cout << ", mean tau = " << format_sig(*result.mean_tau);
    std::cout << "\nwrote paths.csv, summary.json" << (wrote_kde ? ", kde.csv" : "") << " in "
              << out_dir.string() << "\n";
    return 0;
}

int run_sweep_cmd(const CommonArgs& args) {
    const RunConfig config = load_config(args);
    if (config.g_list.empty())
        throw ConfigError("sweep requires g_list (comma-separated couplings)");
    const ExperimentSpec spec = config.to_spec();
    const std::vector<SweepPoint> points = sweep_g(spec, config.g_list, args.workers);

    const fs::path out_dir = config.resolved_out_dir();
    write_sweep_csv(out_dir / "sweep.csv", points);

    std::vector<std::pair<double, double>> fit_points;
    for (const auto& p : points)
        if (p.mean_tau) fit_points.emplace_back(p.g, *p.mean_tau);
    const FitResult fit = power_law_fit(fit_points);
    write_fit_json(out_dir / "fit.json", fit, points);

    std::cout << "sweep: " << points.size() << " couplings, exponent = "
              << format_sig(fit.exponent) << ", k (exponent pinned to -2/3) = "
              << format_sig(fit.k_fixed_exponent) << "\nwrote sweep.csv, fit.json in "
              << out_dir.string() << "\n";
    return 0;
}

int run_oracle_cmd(const CommonArgs& args) {
    const RunConfig config = load_config(args, /*config_optional=*/true);
    const std::vector<OracleCheck> checks = run_analytic_oracle_checks();

    nlohmann::json j;
    nlohmann::json items = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& c : checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["detail"] = c.detail;
        items.push_back(e);
        all_pass = all_pass && c.pass;
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " — " << c.detail << "\n";
    }
    j["checks"] = items;
    j["all_pass"] = all_pass;

    const fs::path out_dir = config.resolved_out_dir();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream out(out_dir / "report.json", std::ios::binary);
    if (!out) throw IoError("cannot open report.json for writing");
    out << j.dump(2) << '\n';

    return all_pass ? 0 : static_cast<int>(ExitCode::oracle);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qreduce — stochastic state-reduction simulator for a charged two-state "
                 "system coupled to a field mode"};
    app.require_subcommand(1);

    CommonArgs traj_args, ens_args, sweep_args, oracle_args;
    int path_index = 0;

    auto* traj = app.add_subcommand("trajectory", "integrate one sample path, write trajectory.csv");
    add_common(traj, traj_args, true);
    traj->add_option("--path-index", path_index, "which noise stream to follow");

    auto* ens = app.add_subcommand("ensemble",
                                   "run a Monte-Carlo ensemble, write paths.csv + summary.json");
    add_common(ens, ens_args, true);

    auto* sweep = app.add_subcommand("sweep", "sweep the coupling g, write sweep.csv + fit.json");
    add_common(sweep, sweep_args, true);

    auto* oracle = app.add_subcommand("oracle-check",
                                      "verify the closed-form solutions, write report.json");
    add_common(oracle, oracle_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
    }

    try {
        if (traj->parsed()) return run_trajectory_cmd(traj_args, path_index);
        if (ens->parsed()) return run_ensemble_cmd(ens_args);
        if (sweep->parsed()) return run_sweep_cmd(sweep_args);
        if (oracle->parsed()) return run_oracle_cmd(oracle_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
