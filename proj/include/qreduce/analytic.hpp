// analytic.hpp — closed-form limit solutions of the model and the predicted
// reduction scales derived from them. Used both as published predictors and
// as independent oracles for the integrator.

#pragma once

#include <utility>
#include <vector>

#include "qreduce/hilbert.hpp"

namespace qreduce {

// ------------------------------ Branch specification ------------------------

// Initial state: (c1 |+x⟩ + c2 |-x⟩) ⊗ |α⟩ with normalized current
// eigenvectors |±x⟩ = (1, ±1)ᵀ/√2, so p_i = |c_i|² are branch probabilities.
// The constructor rescales (c1, c2) to |c1|² + |c2|² = 1.
struct BranchSpec {
    Complex c1;
    Complex c2;
    Complex alpha;

    BranchSpec(Complex c1_in, Complex c2_in, Complex alpha_in);

    double p1() const { return std::norm(c1); }
    double p2() const { return std::norm(c2); }
};

// ------------------------------ Predicted scales ----------------------------

// tau_a        — field reduction time Var₀/(λ²(|⟨(Δa)²⟩₀|² + Var₀²))
// s            — transition time from coupling- to reduction-dominated growth
// tau_sigma    — induced current reduction time (λ²g²p₁p₂)^(-1/3)
// var_growth_rate, cov_growth_rate — magnitudes of the early-time laws
// Var(t) = var_growth_rate·t², |Cov(t)| = cov_growth_rate·t.
struct PredictedScales {
    double tau_a = 0.0;
    double s = 0.0;
    double tau_sigma = 0.0;
    double var_growth_rate = 0.0;
    double cov_growth_rate = 0.0;
};

// ------------------------------ Limit solutions -----------------------------

// Zero-coupling (g=0) solution: independent rotations
//   {c1(t)|+x⟩ + c2(t)|-x⟩} ⊗ |e^{-iωt}α⟩,
//   c1(t) = c1 cos(νt/2) - i c2 sin(νt/2),  c2(t) = c2 cos(νt/2) - i c1 sin(νt/2).
StateVector solution_g_zero(const BranchSpec& spec, double omega, double nu, double t,
                            FockCutoff cutoff);

// Coupling-dominated (ω=ν=0) solution: branch-correlated displaced coherent states
//   c1 e^{iφ1}|+x⟩⊗|α-igt⟩ + c2 e^{iφ2}|-x⟩⊗|α+igt⟩,
// with phases fixed by exp{-iθ(a+a†)} = D(-iθ): φ1 = -gt·Re α, φ2 = +gt·Re α.
StateVector solution_g_dominated(const BranchSpec& spec, double g, double t, FockCutoff cutoff);

// Field-energy-decay solution of dψ/dt = -λ²a†a ψ for a superposition of
// well-separated coherent components: each center shrinks as α_i e^{-λ²t}
// with weight exp{½(|α_i e^{-λ²t}|² - |α_i|²)}.
struct DecaySolution {
    StateVector state;             // normalized composite state (spin factor σz=+1)
    std::vector<double> weights;   // per-component decay weights
    std::vector<Complex> centers;  // per-component coherent centers at time t
};

DecaySolution decay_solution(const std::vector<std::pair<Complex, Complex>>& components,
                             double lambda, double t, FockCutoff cutoff);

// ------------------------------ Predictors ----------------------------------

// Early-time moments of the coupling-dominated solution under the probability
// convention p1 + p2 = 1:
//   Var(a)(t) = 4g²t²p₁p₂,   Cov(σx, -i(a-a†))(t) = -8gt·p₁p₂.
struct PredictedMoments {
    double var_a = 0.0;
    double cov = 0.0;
};

PredictedMoments predicted_moments(double g, double t, double p1, double p2);

// Order-of-magnitude reduction scales; the implicit O(1) constants are set to 1.
PredictedScales predicted_scales(const ModelParams& params, const BranchSpec& spec, double var0,
                                 Complex delta2_0);

} // namespace qreduce
