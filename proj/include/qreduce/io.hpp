// io.hpp — run configuration (flat key = value text) and deterministic
// CSV/JSON artifact writers behind the command-line front end.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qreduce/experiment.hpp"
#include "qreduce/stats.hpp"

namespace qreduce {

// ------------------------------ Run configuration ---------------------------

// Flat key = value config; '#' starts a comment. Unknown keys are rejected.
// n_max may be the literal "auto", in which case the cutoff is derived from
// alpha, g and t_max.
struct RunConfig {
    double omega = 0.0;
    double nu = 0.0;
    double g = 3.0;
    double lambda = 0.2;
    double alpha_re = 4.0;
    double alpha_im = 0.0;
    double c1_re = 0.70710678118654752;
    double c1_im = 0.0;
    double c2_re = 0.70710678118654752;
    double c2_im = 0.0;
    double dt = 1e-4;
    double sample_interval = 1e-2;
    double t_max = 6.0;
    std::optional<int> n_max;        // nullopt = "auto"
    double threshold = 0.99;
    int n_paths = 100;
    std::uint64_t seed = 1;
    std::string out_dir;             // empty → $QREDUCE_OUT_DIR → "."
    std::vector<double> g_list;      // sweep only

    static RunConfig parse_text(const std::string& text);
    static RunConfig parse_file(const std::filesystem::path& path);

    void apply_override(const std::string& key_equals_value);
    std::string serialize() const;

    ExperimentSpec to_spec() const;
    std::string resolved_out_dir() const;
};

// ------------------------------ Formatting ----------------------------------

// Fixed 12-significant-digit formatting used by every CSV column.
std::string format_sig(double value);

// ------------------------------ Writers -------------------------------------

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& record);
void write_paths_csv(const std::filesystem::path& path, const EnsembleResult& result);
void write_summary_json(const std::filesystem::path& path, const EnsembleResult& result,
                        const RunConfig& config);
void write_kde_csv(const std::filesystem::path& path, const DensityEstimate& estimate);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);
void write_fit_json(const std::filesystem::path& path, const FitResult& fit,
                    const std::vector<SweepPoint>& points);

} // namespace qreduce
