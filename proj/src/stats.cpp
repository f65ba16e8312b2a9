#include "qreduce/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qreduce {

// ------------------------------ power_law_fit -------------------------------

FitResult power_law_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw InsufficientPoints("power_law_fit: need at least 3 points, got " +
                                 std::to_string(points.size()));
    for (const auto& [g, tau] : points)
        if (!(g > 0.0) || !(tau > 0.0))
            throw NonPositiveInput("power_law_fit: g and tau must be > 0");

    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [g, tau] : points) {
        sx += std::log(g);
        sy += std::log(tau);
    }
    const double mx = sx / n, my = sy / n;

    double sxx = 0.0, sxy = 0.0;
    for (const auto& [g, tau] : points) {
        const double dx = std::log(g) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(tau) - my);
    }
    if (sxx <= 0.0) throw NonPositiveInput("power_law_fit: g values must not be all equal");

    FitResult fit;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.k = std::exp(intercept);

    // Pinned fit: minimize Σ(log tau - log k + (2/3) log g)² over log k.
    double pinned = 0.0;
    double ss = 0.0;
    for (const auto& [g, tau] : points) {
        pinned += std::log(tau) + (2.0 / 3.0) * std::log(g);
        const double r = std::log(tau) - (intercept + fit.exponent * std::log(g));
        ss += r * r;
    }
    fit.k_fixed_exponent = std::exp(pinned / n);
    fit.residual = std::sqrt(ss / n);
    return fit;
}

// ------------------------------ gaussian_kde --------------------------------

namespace {

double silverman_bandwidth(const std::vector<double>& samples) {
    const double n = static_cast<double>(samples.size());
    if (samples.size() < 2)
        throw ConfigError("gaussian_kde: automatic bandwidth needs >= 2 samples; "
                          "pass one explicitly");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    const double h = 0.9 * spread * std::pow(n, -0.2);
    if (!(h > 0.0))
        throw ConfigError("gaussian_kde: sample spread is zero; pass a bandwidth explicitly");
    return h;
}

} // namespace

DensityEstimate gaussian_kde(const std::vector<double>& samples,
                             std::optional<double> bandwidth) {
    if (samples.empty()) throw EmptySample("gaussian_kde: no samples");
    double h = 0.0;
    if (bandwidth) {
        if (!(*bandwidth > 0.0)) throw ConfigError("gaussian_kde: bandwidth must be > 0");
        h = *bandwidth;
    } else {
        h = silverman_bandwidth(samples);
    }

    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it - 4.0 * h;
    const double hi = *hi_it + 4.0 * h;
    constexpr int kGridPoints = 401;

    DensityEstimate est;
    est.bandwidth = h;
    est.grid.resize(kGridPoints);
    est.density.resize(kGridPoints);
    const double step = (hi - lo) / (kGridPoints - 1);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * h *
                               std::sqrt(2.0 * std::numbers::pi));
    for (int i = 0; i < kGridPoints; ++i) {
        const double x = lo + i * step;
        double d = 0.0;
        for (double s : samples) {
            const double z = (x - s) / h;
            d += std::exp(-0.5 * z * z);
        }
        est.grid[i] = x;
        est.density[i] = d * norm;
    }
    return est;
}

// ------------------------------ summarize -----------------------------------

Summary summarize(const std::vector<double>& samples, int bins) {
    if (samples.empty()) throw EmptySample("summarize: no samples");
    Summary s;
    s.n = static_cast<int>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    s.mean = mean / s.n;

    if (s.n >= 2) {
        double ss = 0.0;
        for (double x : samples) ss += (x - s.mean) * (x - s.mean);
        const double sd = std::sqrt(ss / (s.n - 1));
        s.std_dev = sd;
        s.std_error = sd / std::sqrt(static_cast<double>(s.n));
    }

    if (bins <= 0) bins = static_cast<int>(std::ceil(1.0 + std::log2(static_cast<double>(s.n))));
    bins = std::max(1, bins);

    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
        bins = 1;
    }
    s.histogram.counts.assign(bins, 0);
    s.histogram.edges.resize(bins + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) s.histogram.edges[b] = lo + b * width;
    for (double x : samples) {
        int b = static_cast<int>((x - lo) / width);
        b = std::max(0, std::min(bins - 1, b)); // top edge inclusive
        ++s.histogram.counts[b];
    }
    return s;
}

double median(std::vector<double> samples) {
    if (samples.empty()) throw EmptySample("median: no samples");
    std::sort(samples.begin(), samples.end());
    return quantile_sorted(samples, 0.5);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw EmptySample("quantile: no samples");
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile: q must lie in [0, 1]");
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// ------------------------------ binomial test -------------------------------

double binomial_two_sided_p(int k, int n, double p) {
    if (n < 1 || k < 0 || k > n) throw ConfigError("binomial test: need 0 <= k <= n, n >= 1");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("binomial test: p must lie in (0, 1)");

    auto log_pmf = [&](int j) {
        return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
               j * std::log(p) + (n - j) * std::log(1.0 - p);
    };
    const double lk = log_pmf(k);
    double total = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double lj = log_pmf(j);
        if (lj <= lk + 1e-12) total += std::exp(lj);
    }
    return std::min(1.0, total);
}

} // namespace qreduce
