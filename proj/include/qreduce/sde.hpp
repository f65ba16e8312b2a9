// sde.hpp — Euler-Maruyama integration of the nonlinear stochastic
// Schrödinger equation
//
//   d|ψ⟩ = {(-iH - λ²a†a + λ²ā_t a - ½λ²|a_t|²) dt
//           + λ(a - ½a_t) dB_t - ½λ ā_t dB*_t} |ψ⟩,   a_t = ⟨ψ_t|a|ψ_t⟩,
//
// with a_t evaluated once per step on the pre-step state (Itô discretization)
// and optional per-step renormalization.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qreduce/hilbert.hpp"
#include "qreduce/noise.hpp"

namespace qreduce {

// ------------------------------ Configuration -------------------------------

struct IntegratorConfig {
    double dt = 1e-4;
    bool renormalize_each_step = true;
    double sample_interval = 1e-2;       // observable recording period
    double truncation_tolerance = 1e-8;  // allowed population in the top 5 Fock levels

    void validate() const;
    // sample_interval as an integer number of steps
    long stride() const;
};

// Stopping criterion evaluated at sample cadence: reduced once |⟨σx⟩| > threshold.
struct StopRule {
    double threshold = 0.99;
    bool halt_when_reduced = false;
};

// ------------------------------ Trajectory record ---------------------------

struct NormDriftStats {
    double max_abs = 0.0;
    double mean = 0.0; // signed mean of the per-step pre-renormalization drift
    long n_steps = 0;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<ObservableSet> series;
    std::vector<double> step_drift;      // pre-renormalization norm change at the sampled step
    std::vector<double> occupancy_top5;  // truncation monitor value at each sample

    std::optional<double> stopping_time; // first sample time with |⟨σx⟩| > threshold
    std::optional<int> outcome;          // sign of ⟨σx⟩ at the stopping sample

    double truncation_max = 0.0;
    NormDriftStats norm_drift;
    std::optional<StateVector> final_state;

    bool valid = true;
    std::string invalid_reason;
};

// ------------------------------ Stepping ------------------------------------

// One Euler-Maruyama step. Returns the updated state (renormalized unless
// disabled); the pre-renormalization norm is written to *pre_step_norm when given.
// Throws NonFiniteAmplitude if the update produces NaN/Inf (dt too large).
StateVector em_step(const StateVector& state, const ModelParams& params,
                    const ModelOperators& ops, double dt, const NoiseIncrement& noise,
                    bool renormalize = true, double* pre_step_norm = nullptr);

// Integrate to t_end (rounded to a whole number of steps), recording an
// ObservableSet every sample_interval. Throws CutoffExceeded if the truncation
// monitor trips.
TrajectoryRecord evolve(const StateVector& initial, const ModelParams& params,
                        const IntegratorConfig& config, double t_end, RngStream rng,
                        const std::optional<StopRule>& stop = std::nullopt);

namespace detail {

// Core update on raw amplitude vectors; returns the pre-renormalization norm.
double em_step_core(const Vector& psi, Vector& scratch, Vector& out, const ModelParams& params,
                    const ModelOperators& ops, double dt, Complex dB, bool renormalize);

// As evolve(), but a tripped truncation monitor marks the record invalid and
// stops integration instead of throwing.
TrajectoryRecord evolve_record(const StateVector& initial, const ModelParams& params,
                               const ModelOperators& ops, const IntegratorConfig& config,
                               double t_end, RngStream rng, const StopRule* stop);

} // namespace detail

} // namespace qreduce
