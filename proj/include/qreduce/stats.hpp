// stats.hpp — summary statistics, log-log power-law regression, histograms,
// and Gaussian kernel density estimation for stopping-time distributions.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qreduce/errors.hpp"

namespace qreduce {

// ------------------------------ Power-law fit -------------------------------

// Fit tau ≈ k·g^exponent by ordinary least squares on (log g, log tau);
// k_fixed_exponent is the best prefactor with the exponent pinned to -2/3.
struct FitResult {
    double k = 0.0;
    double exponent = 0.0;
    double k_fixed_exponent = 0.0;
    double residual = 0.0; // RMS log residual of the free fit
};

FitResult power_law_fit(const std::vector<std::pair<double, double>>& points);

// ------------------------------ Kernel density ------------------------------

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

// Gaussian-kernel density on a uniform grid spanning the data ± 4 bandwidths.
// bandwidth omitted → Silverman's rule 0.9·min(std, IQR/1.34)·n^(-1/5).
DensityEstimate gaussian_kde(const std::vector<double>& samples,
                             std::optional<double> bandwidth = std::nullopt);

// ------------------------------ Summaries -----------------------------------

struct Histogram {
    std::vector<double> edges; // size counts.size() + 1
    std::vector<int> counts;
};

struct Summary {
    int n = 0;
    double mean = 0.0;
    std::optional<double> std_dev;    // unbiased; present for n >= 2
    std::optional<double> std_error;  // std_dev / sqrt(n)
    Histogram histogram;
};

// bins <= 0 selects Sturges' rule ceil(1 + log2 n).
Summary summarize(const std::vector<double>& samples, int bins = 0);

double median(std::vector<double> samples);
// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

// Exact two-sided binomial test: probability under Binomial(n, p) of an
// outcome at most as likely as the observed count k.
double binomial_two_sided_p(int k, int n, double p);

} // namespace qreduce
