// experiment.hpp — the reduction experiment: a current superposition coupled to
// a coherent field mode, run as single trajectories, Monte-Carlo ensembles,
// and sweeps over the coupling g.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qreduce/analytic.hpp"
#include "qreduce/sde.hpp"

namespace qreduce {

// ------------------------------ Experiment spec -----------------------------

struct ExperimentSpec {
    ModelParams params;
    BranchSpec branch;
    FockCutoff cutoff;
    IntegratorConfig integrator;
    double t_max = 0.0;
    double threshold = 0.99; // reduction threshold on |⟨σx⟩|
    int n_paths = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

// ------------------------------ Ensemble results ----------------------------

struct PathSummary {
    int path_index = 0;
    std::optional<double> stopping_time;
    std::optional<int> outcome;
};

struct EnsembleResult {
    std::vector<PathSummary> paths;
    int count_plus = 0;
    int count_minus = 0;
    int count_unreduced = 0;
    // Statistics over reduced paths only.
    std::optional<double> mean_tau;
    std::optional<double> std_tau;
    std::optional<double> stderr_tau;

    std::vector<double> stopping_times() const;
};

struct SweepPoint {
    double g = 0.0;
    int n_paths = 0;
    int n_reduced = 0;
    std::optional<double> mean_tau;
    std::optional<double> std_tau;
    std::optional<double> stderr_tau;
};

// ------------------------------ Operations ----------------------------------

// c1 |+x⟩⊗|α⟩ + c2 |-x⟩⊗|α⟩, normalized.
StateVector initial_state(const BranchSpec& branch, FockCutoff cutoff);

// Full record to t_max with the path's own noise stream; the stopping time is
// evaluated online at sample cadence. A tripped truncation monitor marks the
// record invalid rather than silently continuing.
TrajectoryRecord run_trajectory(const ExperimentSpec& spec, int path_index);

// n_paths independent trajectories (path_index = 0..n_paths-1, offset by
// path_offset in the stream space). Each path stops integrating once reduced;
// aggregation is order-independent and reproducible for fixed seed regardless
// of worker count. Throws EnsembleInvalid if any path trips the truncation
// monitor.
EnsembleResult run_ensemble(const ExperimentSpec& spec, int n_workers = 0,
                            std::uint64_t path_offset = 0);

// For each coupling g: run an ensemble with t_max = 5·(λ²g²p₁p₂)^(-1/3) and a
// cutoff re-derived for that horizon. Points use disjoint stream offsets so
// they are statistically independent.
std::vector<SweepPoint> sweep_g(const ExperimentSpec& spec_template,
                                const std::vector<double>& g_values, int n_workers = 0);

// Parallel map over path indices with a fixed-size worker pool. Results must be
// written to per-index slots by the callee; exceptions are rethrown (lowest
// path index wins).
void parallel_for_paths(int n_paths, int n_workers, const std::function<void(int)>& body);

} // namespace qreduce
