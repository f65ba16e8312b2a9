#include "qreduce/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace qreduce {

// ------------------------------ validation ----------------------------------

void ExperimentSpec::validate() const {
    params.validate();
    integrator.validate();
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw ConfigError("ExperimentSpec: t_max must be > 0");
    if (!(threshold >= 0.0) || !(threshold < 1.0))
        throw ConfigError("ExperimentSpec: threshold must lie in [0, 1)");
    if (n_paths < 1) throw ConfigError("ExperimentSpec: n_paths must be >= 1");
}

// ------------------------------ initial_state -------------------------------

StateVector initial_state(const BranchSpec& branch, FockCutoff cutoff) {
    const Vector field = coherent_state(branch.alpha, cutoff);
    const SpinVector spin =
        branch.c1 * current_eigenstate(+1) + branch.c2 * current_eigenstate(-1);
    return compose(spin, field);
}

// ------------------------------ parallel map --------------------------------

void parallel_for_paths(int n_paths, int n_workers, const std::function<void(int)>& body) {
    if (n_paths <= 0) return;
    if (n_workers <= 0) n_workers = static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min(n_workers, n_paths));

    if (n_workers == 1) {
        for (int i = 0; i < n_paths; ++i) body(i);
        return;
    }

    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error = nullptr;
    int first_error_index = n_paths;

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_paths) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ------------------------------ run_trajectory ------------------------------

TrajectoryRecord run_trajectory(const ExperimentSpec& spec, int path_index) {
    spec.validate();
    const StateVector state0 = initial_state(spec.branch, spec.cutoff);
    const ModelOperators ops = build_operators(spec.params, spec.cutoff);
    const StopRule stop{spec.threshold, false};
    RngStream rng(spec.seed, static_cast<std::uint64_t>(path_index));
    return detail::evolve_record(state0, spec.params, ops, spec.integrator, spec.t_max, rng,
                                 &stop);
}

// ------------------------------ run_ensemble --------------------------------

std::vector<double> EnsembleResult::stopping_times() const {
    std::vector<double> taus;
    taus.reserve(paths.size());
    for (const auto& p : paths)
        if (p.stopping_time) taus.push_back(*p.stopping_time);
    return taus;
}

namespace {

struct PathOutcome {
    PathSummary summary;
    bool valid = true;
    std::string reason;
};

} // namespace

EnsembleResult run_ensemble(const ExperimentSpec& spec, int n_workers,
                            std::uint64_t path_offset) {
    spec.validate();
    const StateVector state0 = initial_state(spec.branch, spec.cutoff);
    const ModelOperators ops = build_operators(spec.params, spec.cutoff);
    const StopRule stop{spec.threshold, true};

    std::vector<PathOutcome> outcomes(spec.n_paths);
    parallel_for_paths(spec.n_paths, n_workers, [&](int i) {
        RngStream rng(spec.seed, path_offset + static_cast<std::uint64_t>(i));
        TrajectoryRecord rec = detail::evolve_record(state0, spec.params, ops, spec.integrator,
                                                     spec.t_max, rng, &stop);
        PathOutcome& out = outcomes[i];
        out.summary = PathSummary{i, rec.stopping_time, rec.outcome};
        out.valid = rec.valid;
        out.reason = rec.invalid_reason;
    });

    EnsembleResult result;
    result.paths.reserve(spec.n_paths);
    for (const auto& out : outcomes) {
        if (!out.valid)
            throw EnsembleInvalid("path " + std::to_string(out.summary.path_index) + ": " +
                                  out.reason);
        result.paths.push_back(out.summary);
        if (!out.summary.outcome)
            ++result.count_unreduced;
        else if (*out.summary.outcome > 0)
            ++result.count_plus;
        else
            ++result.count_minus;
    }

    const std::vector<double> taus = result.stopping_times();
    if (!taus.empty()) {
        double mean = 0.0;
        for (double t : taus) mean += t;
        mean /= static_cast<double>(taus.size());
        result.mean_tau = mean;
        if (taus.size() >= 2) {
            double ss = 0.0;
            for (double t : taus) ss += (t - mean) * (t - mean);
            const double sd = std::sqrt(ss / static_cast<double>(taus.size() - 1));
            result.std_tau = sd;
            result.stderr_tau = sd / std::sqrt(static_cast<double>(taus.size()));
        }
    }
    return result;
}

// ------------------------------ sweep_g -------------------------------------

std::vector<SweepPoint> sweep_g(const ExperimentSpec& spec_template,
                                const std::vector<double>& g_values, int n_workers) {
    if (g_values.empty()) throw ConfigError("sweep_g: empty g list");
    for (double g : g_values)
        if (!(g > 0.0) || !std::isfinite(g))
            throw NonPositiveInput("sweep_g: all g values must be > 0");
    if (!(spec_template.params.lambda > 0.0))
        throw ConfigError("sweep_g: lambda must be > 0 to scale the horizon");
    const double p1p2 = spec_template.branch.p1() * spec_template.branch.p2();
    if (p1p2 <= 0.0)
        throw DegenerateBranch("sweep_g: single-branch state never reduces in sign");

    const double l2 = spec_template.params.lambda * spec_template.params.lambda;
    std::vector<SweepPoint> points;
    points.reserve(g_values.size());

    for (std::size_t gi = 0; gi < g_values.size(); ++gi) {
        const double g = g_values[gi];
        ExperimentSpec spec = spec_template;
        spec.params.g = g;
        // Horizon: 5x the induced reduction scale keeps non-reduction rare
        // while bounding the run length.
        spec.t_max = 5.0 * std::pow(l2 * g * g * p1p2, -1.0 / 3.0);
        spec.cutoff = FockCutoff::for_run(std::abs(spec.branch.alpha), g, spec.t_max);

        const std::uint64_t offset = gi * static_cast<std::uint64_t>(spec.n_paths);
        const EnsembleResult res = run_ensemble(spec, n_workers, offset);

        SweepPoint point;
        point.g = g;
        point.n_paths = spec.n_paths;
        point.n_reduced = spec.n_paths - res.count_unreduced;
        point.mean_tau = res.mean_tau;
        point.std_tau = res.std_tau;
        point.stderr_tau = res.stderr_tau;
        points.push_back(point);
    }
    return points;
}

} // namespace qreduce
