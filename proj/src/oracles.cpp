#include "qreduce/oracles.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qreduce/experiment.hpp"

namespace qreduce {

double fidelity(const StateVector& a, const StateVector& b) {
    return std::abs(a.overlap(b));
}

StateVector propagate_matrix_exponential(const SparseMatrix& hamiltonian, double t,
                                         const StateVector& state) {
    if (hamiltonian.rows() != state.dim())
        throw DimensionMismatch("propagate_matrix_exponential: dimensions differ");
    DenseMatrix generator = DenseMatrix(hamiltonian) * Complex(0.0, -t);
    DenseMatrix propagator = generator.exp();
    Vector amps = propagator * state.amplitudes();
    return StateVector(std::move(amps), state.cutoff());
}

std::pair<StateVector, double> integrate_number_decay(const StateVector& initial, double lambda,
                                                      double t, double dt) {
    const int M = initial.n_max() + 1;
    const double l2 = lambda * lambda;
    Vector psi = initial.amplitudes();

    auto rhs = [&](const Vector& v) {
        Vector d(v.size());
        for (int s = 0; s < 2; ++s)
            for (int n = 0; n < M; ++n) d[s * M + n] = -l2 * n * v[s * M + n];
        return d;
    };

    const long n_steps = std::lround(t / dt);
    for (long step = 0; step < n_steps; ++step) {
        const Vector k1 = rhs(psi);
        const Vector k2 = rhs(psi + 0.5 * dt * k1);
        const Vector k3 = rhs(psi + 0.5 * dt * k2);
        const Vector k4 = rhs(psi + dt * k3);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double raw_norm = psi.norm();
    return {StateVector(std::move(psi), initial.cutoff()), raw_norm};
}

// ------------------------------ oracle battery ------------------------------

namespace {

std::string describe(double measured, double required, const char* relation) {
    std::ostringstream os;
    os.precision(12);
    os << "measured " << measured << " (" << relation << " " << required << ")";
    return os.str();
}

OracleCheck check_g_zero() {
    OracleCheck check{"rotation solution vs matrix exponential", false, ""};
    const FockCutoff cutoff(18);
    const BranchSpec branch(Complex(std::sqrt(0.7), 0.0), Complex(0.0, std::sqrt(0.3)),
                            Complex(1.0, 0.5));
    const double omega = 0.3, nu = 0.7, t = 1.3;

    const ModelParams params{omega, nu, 0.0, 0.0};
    const ModelOperators ops = build_operators(params, cutoff);
    const StateVector exact =
        propagate_matrix_exponential(ops.hamiltonian, t, initial_state(branch, cutoff));
    const StateVector closed = solution_g_zero(branch, omega, nu, t, cutoff);

    const double fid = fidelity(exact, closed);
    check.pass = fid >= 1.0 - 1e-8;
    check.detail = describe(fid, 1.0 - 1e-8, ">=");
    return check;
}

OracleCheck check_g_dominated() {
    OracleCheck check{"displacement solution vs matrix exponential", false, ""};
    const FockCutoff cutoff(30);
    const BranchSpec branch(Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(1.0, 0.0));
    const double g = 2.0, t = 0.5; // gt = 1

    const ModelParams params{0.0, 0.0, g, 0.0};
    const ModelOperators ops = build_operators(params, cutoff);
    const StateVector exact =
        propagate_matrix_exponential(ops.hamiltonian, t, initial_state(branch, cutoff));
    const StateVector closed = solution_g_dominated(branch, g, t, cutoff);

    const double fid = fidelity(exact, closed);
    check.pass = fid >= 1.0 - 1e-8;
    check.detail = describe(fid, 1.0 - 1e-8, ">=");
    return check;
}

OracleCheck check_decay() {
    OracleCheck check{"decay solution vs direct ODE integration", false, ""};
    const FockCutoff cutoff(30);
    const Complex alpha(2.0, 0.0);
    const double lambda = 0.2, t = 5.0;

    const DecaySolution closed = decay_solution({{Complex(1.0, 0.0), alpha}}, lambda, t, cutoff);

    SpinVector spin;
    spin << Complex(1.0, 0.0), Complex(0.0, 0.0);
    const StateVector start = compose(spin, coherent_state(alpha, cutoff));
    const auto [numeric, raw_norm] = integrate_number_decay(start, lambda, t, 1e-3);

    const double fid = fidelity(closed.state, numeric);
    const double weight_err = std::abs(raw_norm - closed.weights[0]);
    const double expected_center = 2.0 * std::exp(-lambda * lambda * t);
    const double center_err = std::abs(closed.centers[0] - Complex(expected_center, 0.0));

    check.pass = fid >= 1.0 - 1e-8 && weight_err <= 1e-8 && center_err <= 1e-12;
    std::ostringstream os;
    os.precision(12);
    os << "fidelity " << fid << ", weight error " << weight_err << ", center error "
       << center_err;
    check.detail = os.str();
    return check;
}

OracleCheck check_moments() {
    OracleCheck check{"early-time moment law vs displaced-state expectations", false, ""};
    const double g = 4.0, t = 0.5;
    const BranchSpec branch(Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(4.0, 0.0));
    const FockCutoff cutoff = FockCutoff::for_run(4.0, g, t);

    const StateVector state = solution_g_dominated(branch, g, t, cutoff);
    const ModelOperators ops = build_operators(ModelParams{0.0, 0.0, g, 0.0}, cutoff);
    const ObservableSet obs = observables(state, ops);
    const PredictedMoments predicted = predicted_moments(g, t, branch.p1(), branch.p2());

    const double var_rel = std::abs(obs.var_a / predicted.var_a - 1.0);
    const double cov_rel = std::abs(obs.cov_current_field / predicted.cov - 1.0);
    check.pass = var_rel <= 0.05 && cov_rel <= 0.05;
    std::ostringstream os;
    os.precision(6);
    os << "var_a " << obs.var_a << " vs " << predicted.var_a << " (rel " << var_rel << "), cov "
       << obs.cov_current_field << " vs " << predicted.cov << " (rel " << cov_rel << ")";
    check.detail = os.str();
    return check;
}

OracleCheck check_scales() {
    OracleCheck check{"predicted reduction scales", false, ""};
    const BranchSpec branch(Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(4.0, 0.0));

    // tau_a with Var0 = |⟨(Δa)²⟩0| = V reduces to 1/(2λ²V).
    const ModelParams pa{0.0, 0.0, 3.0, 0.2};
    const double V = 2.0;
    const PredictedScales sa = predicted_scales(pa, branch, V, Complex(V, 0.0));
    const double tau_a_expected = 1.0 / (2.0 * 0.2 * 0.2 * V);
    const double tau_a_err = std::abs(sa.tau_a - tau_a_expected);

    // Induced scale at g=3, λ=0.2, equal branches: (0.2²·3²·¼)^(-1/3).
    const double tau_sigma_expected = std::pow(0.04 * 9.0 * 0.25, -1.0 / 3.0);
    const double tau_sigma_err = std::abs(sa.tau_sigma - tau_sigma_expected);

    check.pass = tau_a_err <= 1e-12 && tau_sigma_err <= 1e-12;
    std::ostringstream os;
    os.precision(12);
    os << "tau_a " << sa.tau_a << " (expected " << tau_a_expected << "), tau_sigma "
       << sa.tau_sigma << " (expected " << tau_sigma_expected << ")";
    check.detail = os.str();
    return check;
}

} // namespace

std::vector<OracleCheck> run_analytic_oracle_checks() {
    std::vector<OracleCheck> checks;
    checks.push_back(check_g_zero());
    checks.push_back(check_g_dominated());
    checks.push_back(check_decay());
    checks.push_back(check_moments());
    checks.push_back(check_scales());
    return checks;
}

} // namespace qreduce
