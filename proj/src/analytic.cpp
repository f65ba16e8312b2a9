#include "qreduce/analytic.hpp"

#include <cmath>
#include <string>

namespace qreduce {

// ------------------------------ BranchSpec ----------------------------------

BranchSpec::BranchSpec(Complex c1_in, Complex c2_in, Complex alpha_in)
    : c1(c1_in), c2(c2_in), alpha(alpha_in) {
    if (!std::isfinite(c1.real()) || !std::isfinite(c1.imag()) || !std::isfinite(c2.real()) ||
        !std::isfinite(c2.imag()) || !std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw ConfigError("BranchSpec: amplitudes must be finite");
    const double norm2 = std::norm(c1) + std::norm(c2);
    if (norm2 <= 0.0) throw DegenerateBranch("BranchSpec: c1 and c2 are both zero");
    const double inv = 1.0 / std::sqrt(norm2);
    c1 *= inv;
    c2 *= inv;
}

// ------------------------------ solution_g_zero -----------------------------

StateVector solution_g_zero(const BranchSpec& spec, double omega, double nu, double t,
                            FockCutoff cutoff) {
    const double half = 0.5 * t * nu;
    const Complex i_unit(0.0, 1.0);
    const Complex c1t = spec.c1 * std::cos(half) - i_unit * spec.c2 * std::sin(half);
    const Complex c2t = spec.c2 * std::cos(half) - i_unit * spec.c1 * std::sin(half);

    const Complex alpha_t = std::exp(Complex(0.0, -omega * t)) * spec.alpha;
    const Vector field = coherent_state(alpha_t, cutoff);

    SpinVector spin = c1t * current_eigenstate(+1) + c2t * current_eigenstate(-1);
    return compose(spin, field);
}

// ------------------------------ solution_g_dominated ------------------------

StateVector solution_g_dominated(const BranchSpec& spec, double g, double t, FockCutoff cutoff) {
    const double gt = g * t;
    const Complex i_unit(0.0, 1.0);
    // exp{-iθ(a+a†)} = D(-iθ) with D(β)|α⟩ = e^{i Im(β ᾱ)}|α+β⟩, θ = ±gt.
    const double phi1 = -gt * spec.alpha.real();
    const double phi2 = +gt * spec.alpha.real();

    const Vector f1 = coherent_state(spec.alpha - i_unit * gt, cutoff);
    const Vector f2 = coherent_state(spec.alpha + i_unit * gt, cutoff);

    const Complex w1 = spec.c1 * std::polar(1.0, phi1);
    const Complex w2 = spec.c2 * std::polar(1.0, phi2);
    const SpinVector plus = current_eigenstate(+1);
    const SpinVector minus = current_eigenstate(-1);

    Vector amps(cutoff.dim());
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < cutoff.field_dim(); ++n)
            amps[composite_index(s, n, cutoff.n_max)] =
                w1 * plus[s] * f1[n] + w2 * minus[s] * f2[n];
    return StateVector(std::move(amps), cutoff);
}

// ------------------------------ decay_solution ------------------------------

DecaySolution decay_solution(const std::vector<std::pair<Complex, Complex>>& components,
                             double lambda, double t, FockCutoff cutoff) {
    if (components.empty()) throw ConfigError("decay_solution: no components");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ConfigError("decay_solution: lambda must be finite and >= 0");
    // Multi-component closed form needs near-orthogonal coherent pieces.
    for (std::size_t i = 0; i < components.size(); ++i)
        for (std::size_t j = i + 1; j < components.size(); ++j)
            if (std::abs(components[i].second - components[j].second) < 4.0)
                throw ConfigError("decay_solution: coherent centers closer than 4; "
                                  "components must be well separated");

    const double shrink = std::exp(-lambda * lambda * t);
    DecaySolution sol{StateVector::basis(cutoff, kSpinUp, 0), {}, {}};
    sol.weights.reserve(components.size());
    sol.centers.reserve(components.size());

    Vector field = Vector::Zero(cutoff.field_dim());
    for (const auto& [c, alpha] : components) {
        const Complex center = alpha * shrink;
        const double weight = std::exp(0.5 * (std::norm(center) - std::norm(alpha)));
        sol.weights.push_back(weight);
        sol.centers.push_back(center);
        field += c * weight * coherent_state(center, cutoff);
    }

    SpinVector spin;
    spin << Complex(1.0, 0.0), Complex(0.0, 0.0);
    sol.state = compose(spin, field);
    return sol;
}

// ------------------------------ predictors ----------------------------------

PredictedMoments predicted_moments(double g, double t, double p1, double p2) {
    if (!(p1 >= 0.0) || !(p2 >= 0.0)) throw ConfigError("predicted_moments: p_i must be >= 0");
    if (std::abs(p1 + p2 - 1.0) > 1e-9)
        throw ConfigError("predicted_moments: p1 + p2 must equal 1");
    PredictedMoments m;
    m.var_a = 4.0 * g * g * t * t * p1 * p2;
    m.cov = -8.0 * g * t * p1 * p2;
    return m;
}

PredictedScales predicted_scales(const ModelParams& params, const BranchSpec& spec, double var0,
                                 Complex delta2_0) {
    params.validate();
    if (!(params.lambda > 0.0)) throw ConfigError("predicted_scales: lambda must be > 0");
    if (!(var0 > 0.0)) throw ConfigError("predicted_scales: var0 must be > 0");

    const double l2 = params.lambda * params.lambda;
    PredictedScales scales;
    scales.tau_a = var0 / (l2 * (std::norm(delta2_0) + var0 * var0));

    const double p1p2 = spec.p1() * spec.p2();
    if (p1p2 <= 0.0)
        throw DegenerateBranch("predicted_scales: single-branch state has no "
                               "superposition to reduce");
    if (params.g == 0.0)
        throw ConfigError("predicted_scales: induced reduction scale needs g != 0");

    const double rate = l2 * params.g * params.g * p1p2;
    scales.s = std::pow(rate, -1.0 / 3.0);
    scales.tau_sigma = scales.s;
    scales.var_growth_rate = 4.0 * params.g * params.g * p1p2;
    scales.cov_growth_rate = 8.0 * std::abs(params.g) * p1p2;
    return scales;
}

} // namespace qreduce
