// Acceptance suite: one binary, one pass/fail line per criterion.
// Run all criteria with no arguments, or pass criterion numbers to select.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "qreduce/io.hpp"
#include "qreduce/oracles.hpp"
#include "test_support.hpp"

using namespace qreduce;
using qreduce::testing::make_cat;
using qreduce::testing::mean_se;
namespace fs = std::filesystem;

namespace {

// ------------------------------ harness -------------------------------------

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what) {
        pass = pass && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << (ok ? "" : "FAILED: ") << what;
    }
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

double trapezoid(const DensityEstimate& est) {
    double area = 0.0;
    for (std::size_t i = 1; i < est.grid.size(); ++i)
        area += 0.5 * (est.density[i] + est.density[i - 1]) * (est.grid[i] - est.grid[i - 1]);
    return area;
}

int count_local_maxima(const std::vector<double>& values) {
    int maxima = 0;
    const int n = static_cast<int>(values.size());
    for (int i = 0; i < n; ++i) {
        const double left = (i > 0) ? values[i - 1] : -1.0;
        const double right = (i + 1 < n) ? values[i + 1] : -1.0;
        if (values[i] > left && values[i] > right) ++maxima;
    }
    return maxima;
}

// Histogram modes that stand above their surrounding valleys by more than the
// Poisson counting noise; one-count jiggles in the bins do not qualify.
int count_significant_modes(const std::vector<int>& counts) {
    const int n = static_cast<int>(counts.size());
    int modes = 0;
    for (int i = 0; i < n; ++i) {
        const int left = (i > 0) ? counts[i - 1] : -1;
        const int right = (i + 1 < n) ? counts[i + 1] : -1;
        if (!(counts[i] > left && counts[i] > right)) continue;
        // Prominence: how far we must descend before reaching a taller bin.
        int prominence = counts[i];
        for (const int dir : {-1, +1}) {
            int valley = counts[i];
            for (int j = i + dir; j >= 0 && j < n; j += dir) {
                valley = std::min(valley, counts[j]);
                if (counts[j] > counts[i]) {
                    prominence = std::min(prominence, counts[i] - valley);
                    break;
                }
            }
        }
        if (prominence > 2.0 * std::sqrt(static_cast<double>(counts[i]))) ++modes;
    }
    return modes;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<missing:" + p.string() + ">";
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ------------------------------ shared runs ---------------------------------

// The g=3 even-branch ensemble serves both the Born-rule count test and the
// stopping-time distribution test.
const EnsembleResult& born_g3_ensemble() {
    static const EnsembleResult result = [] {
        const ModelParams params{0.0, 0.0, 3.0, 0.2};
        const BranchSpec branch(Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(4.0, 0.0));
        const FockCutoff cutoff = FockCutoff::for_run(4.0, 3.0, 6.0);
        IntegratorConfig integrator; // dt = 1e-4, sample 1e-2
        const ExperimentSpec spec{params, branch, cutoff, integrator, 6.0, 0.99, 100, 42};
        return run_ensemble(spec);
    }();
    return result;
}

// ------------------------------ criteria ------------------------------------

Check criterion_1_schrodinger_limit() {
    Check check;
    const ModelParams params{0.5, 0.5, 1.0, 0.0};
    const FockCutoff cutoff(20);
    const BranchSpec branch(Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(1.0, 0.0));
    const StateVector state0 = initial_state(branch, cutoff);
    const ModelOperators ops = build_operators(params, cutoff);
    const StateVector exact = propagate_matrix_exponential(ops.hamiltonian, 1.0, state0);

    auto infidelity_at = [&](double dt) {
        IntegratorConfig config;
        config.dt = dt;
        config.sample_interval = 0.5;
        const TrajectoryRecord rec = evolve(state0, params, config, 1.0, RngStream(1, 0));
        return 1.0 - fidelity(*rec.final_state, exact);
    };

    const double inf1 = infidelity_at(1e-4);
    const double inf2 = infidelity_at(5e-5);
    check.expect(inf1 <= 1e-6, "infidelity(dt=1e-4) = " + fmt(inf1, 3) + " <= 1e-6");
    check.expect(inf1 / inf2 >= 3.5,
                 "halving dt shrinks infidelity by " + fmt(inf1 / inf2, 3) + "x (>= 3.5)");
    return check;
}

Check criterion_2_analytic_oracles() {
    Check check;
    for (const OracleCheck& oc : run_analytic_oracle_checks())
        check.expect(oc.pass, oc.name + " [" + oc.detail + "]");
    return check;
}

Check criterion_3_eigenstate_decay() {
    Check check;
    const ModelParams params{0.0, 0.0, 0.0, 0.2};
    const FockCutoff cutoff(26);
    const StateVector state0 =
        compose(current_eigenstate(+1), coherent_state(Complex(2.0, 0.0), cutoff));
    IntegratorConfig config;
    config.sample_interval = 0.1;
    const TrajectoryRecord rec = evolve(state0, params, config, 5.0, RngStream(2, 0));

    double worst = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double expected = 2.0 * std::exp(-0.04 * rec.times[i]);
        worst = std::max(worst, std::abs(std::abs(rec.series[i].a_mean) / expected - 1.0));
    }
    check.expect(worst <= 0.01,
                 "max relative error of |<a>| vs 2e^{-lambda^2 t} = " + fmt(worst, 3) + " <= 1%");
    return check;
}

Check criterion_4_variance_supermartingale() {
    Check check;
    const ModelParams params{0.0, 0.0, 0.0, 0.2};
    const FockCutoff cutoff(40);
    const StateVector state0 = make_cat(3.0, cutoff);

    // Checkpoints at multiples of the predicted field reduction time
    // tau_a = Var0/(lambda^2·2·Var0^2) ≈ 1.39.
    IntegratorConfig config;
    config.sample_interval = 0.695;
    constexpr int kPaths = 100;
    constexpr int kCheckpoints = 4;

    std::vector<std::vector<double>> var_at(kCheckpoints, std::vector<double>(kPaths));
    parallel_for_paths(kPaths, 0, [&](int i) {
        const ModelOperators ops = build_operators(params, cutoff);
        RngStream rng(1234, i);
        const TrajectoryRecord rec =
            detail::evolve_record(state0, params, ops, config, 2.085, rng, nullptr);
        for (int kk = 0; kk < kCheckpoints; ++kk) var_at[kk][i] = rec.series[kk].var_a;
    });

    for (int kk = 0; kk + 1 < kCheckpoints; ++kk) {
        std::vector<double> diff(kPaths);
        for (int i = 0; i < kPaths; ++i) diff[i] = var_at[kk + 1][i] - var_at[kk][i];
        const auto [m, se] = mean_se(diff);
        check.expect(m < 2.0 * se, "E[Var] step " + std::to_string(kk) + "->" +
                                       std::to_string(kk + 1) + ": mean diff " + fmt(m, 3) +
                                       " < 2 SE (" + fmt(2.0 * se, 3) + ")");
    }
    return check;
}

Check criterion_5_early_time_moments() {
    Check check;
    const double g = 4.0;
    const ModelParams params{0.0, 0.0, g, 0.02};
    const BranchSpec branch(Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(4.0, 0.0));
    const FockCutoff cutoff = FockCutoff::for_run(4.0, g, 0.7);
    IntegratorConfig integrator;
    integrator.sample_interval = 0.05;
    const ExperimentSpec spec{params, branch, cutoff, integrator, 0.7, 0.99, 1, 11};

    const TrajectoryRecord rec = run_trajectory(spec, 0);
    double worst_var = 0.0, worst_cov = 0.0;
    int window = 0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double t = rec.times[i];
        if (std::exp(-2.0 * g * g * t * t) >= 0.01) continue; // overlap still visible
        const PredictedMoments m = predicted_moments(g, t, 0.5, 0.5);
        worst_var = std::max(worst_var, std::abs(rec.series[i].var_a / m.var_a - 1.0));
        worst_cov = std::max(worst_cov, std::abs(rec.series[i].cov_current_field / m.cov - 1.0));
        ++window;
    }
    check.expect(window >= 5, "window has " + std::to_string(window) + " samples");
    check.expect(worst_var <= 0.10, "Var(a) vs 4g^2t^2p1p2: worst rel " + fmt(worst_var, 3));
    check.expect(worst_cov <= 0.10, "Cov vs -8gt p1p2: worst rel " + fmt(worst_cov, 3));
    return check;
}

Check criterion_6_sample_path_reproduction() {
    Check check;
    const ModelParams params{0.5, 0.5, 4.0, 0.2};
    const BranchSpec branch(Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(4.0, 0.0));
    const FockCutoff cutoff = FockCutoff::for_run(4.0, 4.0, 3.0);
    IntegratorConfig integrator;
    const ExperimentSpec spec{params, branch, cutoff, integrator, 3.0, 0.99, 50, 42};

    constexpr int kPaths = 50;
    std::vector<TrajectoryRecord> records(kPaths);
    parallel_for_paths(kPaths, 0, [&](int i) { records[i] = run_trajectory(spec, i); });

    // "Reach ... by t = 3": the path crosses the current threshold and the
    // field variance then drops below 0.05. (With nu != 0 the current keeps
    // rotating after reduction, so later variance recurrences are part of the
    // dynamics; the claim is about reaching reduction, not about stationarity.)
    int reduced_and_pinned = 0;
    bool shapes_ok = true;
    for (const TrajectoryRecord& rec : records) {
        if (!rec.valid || !rec.stopping_time) {
            shapes_ok = shapes_ok && rec.valid;
            continue;
        }
        double min_after_stop = 1e300;
        double peak = 0.0;
        double min_after_peak = 1e300;
        for (std::size_t k = 0; k < rec.times.size(); ++k) {
            const double v = rec.series[k].var_a;
            if (v > peak) {
                peak = v;
                min_after_peak = 1e300;
            }
            min_after_peak = std::min(min_after_peak, v);
            if (rec.times[k] >= *rec.stopping_time) min_after_stop = std::min(min_after_stop, v);
        }
        if (min_after_stop < 0.05) ++reduced_and_pinned;
        shapes_ok = shapes_ok && peak >= 1.0 && min_after_peak <= 0.1 * peak;
    }
    check.expect(reduced_and_pinned >= 48, std::to_string(reduced_and_pinned) +
                                               "/50 paths reach |<sx>| > 0.99 and then Var(a) < "
                                               "0.05 by t = 3 (need >= 48)");
    check.expect(shapes_ok,
                 "every reduced path grows to peak Var >= 1 and collapses by >= 90%");
    return check;
}

Check criterion_7_scaling_law() {
    Check check;
    const ModelParams params{0.0, 0.0, 3.0, 0.2};
    const BranchSpec branch(Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(4.0, 0.0));
    IntegratorConfig integrator;
    const FockCutoff placeholder(10); // sweep re-derives per point
    const ExperimentSpec spec{params, branch, placeholder, integrator, 1.0, 0.99, 60, 42};

    const std::vector<double> gs = {2.0, 3.0, 4.0, 6.0, 8.0};
    const std::vector<SweepPoint> points = sweep_g(spec, gs, 0);

    std::vector<std::pair<double, double>> fit_pts;
    bool any_unreduced = false;
    for (const auto& p : points) {
        if (p.n_reduced < p.n_paths) any_unreduced = true;
        if (p.mean_tau) fit_pts.emplace_back(p.g, *p.mean_tau);
    }
    check.expect(!any_unreduced, "all paths reduce within the auto horizon");

    const FitResult fit = power_law_fit(fit_pts);
    check.expect(std::abs(fit.exponent + 2.0 / 3.0) <= 0.15,
                 "free exponent " + fmt(fit.exponent, 4) + " within -2/3 +- 0.15");
    check.expect(fit.k_fixed_exponent >= 2.7 && fit.k_fixed_exponent <= 4.5,
                 "pinned prefactor k " + fmt(fit.k_fixed_exponent, 4) + " in [2.7, 4.5]");

    bool stds_decreasing = true;
    for (std::size_t i = 1; i < points.size(); ++i)
        stds_decreasing = stds_decreasing && *points[i].std_tau < *points[i - 1].std_tau;
    std::ostringstream stds;
    for (const auto& p : points) stds << fmt(*p.std_tau, 3) << " ";
    check.expect(stds_decreasing, "std(tau) decreases across the sweep: " + stds.str());

    // The measured mean at g = 3 sits within a factor 2 of the predicted
    // induced-reduction scale.
    for (const auto& p : points)
        if (p.g == 3.0) {
            const double predicted =
                predicted_scales(params, branch, 1.0, Complex(0.0, 0.0)).tau_sigma;
            const double ratio = *p.mean_tau / predicted;
            check.expect(ratio > 0.5 && ratio < 2.0,
                         "mean tau(g=3) = " + fmt(*p.mean_tau, 4) + " vs predicted " +
                             fmt(predicted, 4) + " (ratio " + fmt(ratio, 3) + ")");
        }
    return check;
}

Check criterion_8_born_rule() {
    Check check;

    const EnsembleResult& even = born_g3_ensemble();
    check.expect(even.count_unreduced == 0, "all 100 even-branch paths reduce");
    const int n_reduced = even.count_plus + even.count_minus;
    const double p_value = binomial_two_sided_p(even.count_plus, n_reduced, 0.5);
    check.expect(p_value > 0.01, "even branches: counts +" + std::to_string(even.count_plus) +
                                     "/-" + std::to_string(even.count_minus) +
                                     ", binomial p = " + fmt(p_value, 3) + " > 0.01");

    const ModelParams params{0.0, 0.0, 3.0, 0.2};
    const BranchSpec branch(Complex(std::sqrt(0.7), 0.0), Complex(std::sqrt(0.3), 0.0),
                            Complex(4.0, 0.0));
    const FockCutoff cutoff = FockCutoff::for_run(4.0, 3.0, 6.0);
    IntegratorConfig integrator;
    const ExperimentSpec spec{params, branch, cutoff, integrator, 6.0, 0.99, 200, 77};
    const EnsembleResult uneven = run_ensemble(spec);
    const int n2 = uneven.count_plus + uneven.count_minus;
    const double fraction = static_cast<double>(uneven.count_plus) / n2;
    const double sigma = std::sqrt(0.7 * 0.3 / n2);
    check.expect(std::abs(fraction - 0.7) <= 3.0 * sigma,
                 "0.7/0.3 branches: +1 fraction " + fmt(fraction, 4) + " within 3 sigma (" +
                     fmt(3.0 * sigma, 3) + ") of 0.7");
    return check;
}

Check criterion_9_stopping_time_distribution() {
    Check check;
    const std::vector<double> taus = born_g3_ensemble().stopping_times();
    check.expect(taus.size() >= 100, std::to_string(taus.size()) + " stopping times");

    const Summary s = summarize(taus);
    const int modes = count_significant_modes(s.histogram.counts);
    check.expect(modes == 1,
                 "histogram unimodal above counting noise (" + std::to_string(modes) + " mode)");

    const double med = median(taus);
    check.expect(std::abs(s.mean - med) < *s.std_dev,
                 "|mean - median| = " + fmt(std::abs(s.mean - med), 3) + " < std = " +
                     fmt(*s.std_dev, 3));

    const DensityEstimate kde = gaussian_kde(taus);
    const int kde_maxima = count_local_maxima(kde.density);
    check.expect(kde_maxima == 1,
                 "smoothed density unimodal (" + std::to_string(kde_maxima) + " maximum)");
    const double integral = trapezoid(kde);
    check.expect(std::abs(integral - 1.0) <= 1e-3,
                 "KDE integrates to " + fmt(integral, 6) + " (within 1e-3 of 1)");
    return check;
}

Check criterion_10_byte_determinism() {
    Check check;
    const fs::path base = fs::temp_directory_path() / "qreduce_acceptance_det";
    fs::remove_all(base);
    fs::create_directories(base);

    const std::string config = "omega = 0\nnu = 0\ng = 3\nlambda = 0.3\nalpha_re = 2\n"
                               "dt = 1e-3\nsample_interval = 1e-2\nt_max = 3.0\n"
                               "n_paths = 8\nseed = 15\n";
    {
        std::ofstream out(base / "run.conf", std::ios::binary);
        out << config;
    }

    auto run_with_workers = [&](int workers, const std::string& tag) {
        const fs::path out_dir = base / tag;
        const std::string cmd = std::string(QREDUCE_CLI_PATH) + " ensemble " +
                                (base / "run.conf").string() + " out_dir=" + out_dir.string() +
                                " --workers " + std::to_string(workers) + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    check.expect(run_with_workers(1, "w1"), "ensemble with 1 worker runs");
    check.expect(run_with_workers(4, "w4"), "ensemble with 4 workers runs");
    check.expect(run_with_workers(8, "w8"), "ensemble with 8 workers runs");
    check.expect(run_with_workers(4, "w4b"), "repeat run with 4 workers runs");

    for (const char* file : {"paths.csv", "summary.json", "kde.csv"}) {
        const std::string ref = slurp(base / "w1" / file);
        const bool same = ref == slurp(base / "w4" / file) && ref == slurp(base / "w8" / file) &&
                          ref == slurp(base / "w4b" / file);
        check.expect(same && ref.rfind("<missing", 0) != 0,
                     std::string(file) + " byte-identical across 1/4/8 workers and reruns");
    }
    return check;
}

// ------------------------------ driver --------------------------------------

struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "Schrödinger limit matches matrix-exponential propagation", criterion_1_schrodinger_limit},
        {2, "closed-form solutions match independent propagation", criterion_2_analytic_oracles},
        {3, "coherent eigenstate amplitude decays at rate lambda^2", criterion_3_eigenstate_decay},
        {4, "expected Var(a) is non-increasing for the g=0 cat state", criterion_4_variance_supermartingale},
        {5, "early-time moment growth follows the quadratic law", criterion_5_early_time_moments},
        {6, "sample paths reduce with growth-then-collapse of Var(a)", criterion_6_sample_path_reproduction},
        {7, "stopping-time scaling law k·g^{-2/3}", criterion_7_scaling_law},
        {8, "outcome frequencies follow the Born rule", criterion_8_born_rule},
        {9, "stopping-time distribution is unimodal with mild skew", criterion_9_stopping_time_distribution},
        {10, "byte-identical outputs across runs and worker counts", criterion_10_byte_determinism},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        Check result;
        try {
            result = c.run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail << "exception: " << e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all_pass = all_pass && result.pass;
        std::cout << "[" << (result.pass ? "PASS" : "FAIL") << "] criterion " << c.id << ": "
                  << c.name << " (" << fmt(seconds, 3) << "s)\n        " << result.detail.str()
                  << "\n";
        std::cout.flush();
    }
    std::cout << (all_pass ? "ACCEPTANCE: all selected criteria passed"
                           : "ACCEPTANCE: FAILURES present")
              << "\n";
    return all_pass ? 0 : 1;
}
