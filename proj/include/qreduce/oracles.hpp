// oracles.hpp — independent verification of the closed-form solutions by
// matrix-exponential propagation and direct ODE integration. Verification
// support: nothing here is used by the dynamics it checks.

#pragma once

#include <string>
#include <vector>

#include "qreduce/analytic.hpp"

namespace qreduce {

struct OracleCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

// |⟨a|b⟩| — insensitive to the unphysical global phase.
double fidelity(const StateVector& a, const StateVector& b);

// exp(-iHt)|ψ⟩ with H taken dense; exact up to the matrix-exponential itself.
StateVector propagate_matrix_exponential(const SparseMatrix& hamiltonian, double t,
                                         const StateVector& state);

// RK4 integration of dψ/dt = -λ² a†a ψ; returns the normalized state and the
// final raw norm.
std::pair<StateVector, double> integrate_number_decay(const StateVector& initial, double lambda,
                                                      double t, double dt);

// The full battery behind the oracle-check subcommand.
std::vector<OracleCheck> run_analytic_oracle_checks();

} // namespace qreduce
