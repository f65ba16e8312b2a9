// hilbert.hpp — two-state ⊗ truncated-Fock composite space: model operators,
// model states, and the conditional expectations used by the dynamics.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qreduce/errors.hpp"

namespace qreduce {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using SpinVector = Eigen::Vector2cd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;

// Spin labels index the σz basis.
inline constexpr int kSpinUp = 0;   // σz = +1
inline constexpr int kSpinDown = 1; // σz = -1

// ------------------------------ Fock cutoff ---------------------------------

// Highest retained photon number; the field space is span{|0⟩..|n_max⟩} and
// the composite dimension is 2·(n_max+1).
struct FockCutoff {
    int n_max;

    explicit FockCutoff(int n);

    int field_dim() const { return n_max + 1; }
    int dim() const { return 2 * (n_max + 1); }

    // Cutoff large enough for every coherent amplitude reached during a run:
    // the centers drift by at most |g|·t_horizon, so with β = |α| + |g|·t_horizon
    // the choice n_max = ceil(β² + 6β + 10) keeps ≥6σ of Poisson tail inside
    // the basis for the largest displaced coherent state.
    static FockCutoff for_run(double alpha_mag, double g, double t_horizon);
};

// Flat index into the composite basis, spin-major and photon-number minor.
inline int composite_index(int spin, int n, int n_max) {
    return spin * (n_max + 1) + n;
}

// ------------------------------ Model parameters ----------------------------

// H = omega·a†a + (nu/2)·σz + g·σx(a + a†); lambda (units time^{-1/2}) sets
// the strength of the stochastic field-reduction terms.
struct ModelParams {
    double omega = 0.0;
    double nu = 0.0;
    double g = 0.0;
    double lambda = 0.0;

    void validate() const;
};

// ------------------------------ State vector --------------------------------

// Normalized amplitude vector over the composite basis. Immutable dimension;
// construction and renormalize() leave the norm at 1 within 1e-12.
class StateVector {
  public:
    StateVector(Vector amplitudes, FockCutoff cutoff);

    static StateVector basis(FockCutoff cutoff, int spin, int n);

    int n_max() const { return n_max_; }
    int dim() const { return static_cast<int>(amps_.size()); }
    FockCutoff cutoff() const { return FockCutoff(n_max_); }

    const Vector& amplitudes() const { return amps_; }
    Complex amp(int spin, int n) const { return amps_[composite_index(spin, n, n_max_)]; }

    double norm() const { return amps_.norm(); }
    void renormalize();

    // ⟨this|other⟩
    Complex overlap(const StateVector& other) const;

  private:
    Vector amps_;
    int n_max_;
};

// ------------------------------ Observables ---------------------------------

// Conditional expectations along one path: a_mean = ⟨a⟩, var_a = ⟨|Δa|²⟩,
// delta_a_sq = ⟨(Δa)²⟩, sx_mean = ⟨σx⟩, cov_current_field = Cov(σx, -i(a-a†)),
// energy = ⟨H⟩, norm = state norm as seen by the evaluation.
struct ObservableSet {
    Complex a_mean{0.0, 0.0};
    double var_a = 0.0;
    Complex delta_a_sq{0.0, 0.0};
    double sx_mean = 0.0;
    double cov_current_field = 0.0;
    double energy = 0.0;
    double norm = 0.0;
};

// ------------------------------ Operator set --------------------------------

// Sparse matrices over the composite basis plus the √n table the integrator
// kernels use. All members are immutable after build_operators.
struct ModelOperators {
    FockCutoff cutoff;
    ModelParams params;
    std::vector<double> sqrt_n; // sqrt_n[n] = √n, n = 0..n_max+1

    SparseMatrix a;
    SparseMatrix a_dagger;
    SparseMatrix sigma_x;
    SparseMatrix sigma_z;
    SparseMatrix hamiltonian;
};

ModelOperators build_operators(const ModelParams& params, FockCutoff cutoff);

// ------------------------------ Constructions -------------------------------

// Normalized truncated coherent expansion with amplitudes ∝ α^n/√(n!).
// Throws CutoffTooSmall if the Poisson tail beyond n_max exceeds tail_tol.
Vector coherent_state(Complex alpha, FockCutoff cutoff, double tail_tol = 1e-10);

// Normalized σx eigenvector (1, sign)/√2 in the σz basis; sign ∈ {+1, -1}.
SpinVector current_eigenstate(int sign);

// Tensor product spin ⊗ field; amplitude(s, n) = spin(s)·field(n).
StateVector compose(const SpinVector& spin, const Vector& field);

// ------------------------------ Evaluations ---------------------------------

ObservableSet observables(const StateVector& state, const ModelOperators& ops);

// Population in the top `levels` Fock levels (summed over spin); the runtime
// truncation monitor watches this.
double top_level_occupancy(const StateVector& state, int levels = 5);

// ⟨ψ|(1 ⊗ |α⟩⟨α|)|ψ⟩ — expectation of the coherent projector.
double coherent_projection_expectation(const StateVector& state, Complex alpha);

} // namespace qreduce
