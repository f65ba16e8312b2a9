#include "qreduce/hilbert.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace qreduce {

namespace {

std::string fmt_complex(Complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

} // namespace

// ------------------------------ FockCutoff ----------------------------------

FockCutoff::FockCutoff(int n) : n_max(n) {
    if (n < 1) throw ConfigError("FockCutoff: n_max must be >= 1");
}

FockCutoff FockCutoff::for_run(double alpha_mag, double g, double t_horizon) {
    if (!(alpha_mag >= 0.0) || !std::isfinite(alpha_mag))
        throw ConfigError("FockCutoff::for_run: |alpha| must be finite and >= 0");
    if (!(t_horizon >= 0.0) || !std::isfinite(t_horizon))
        throw ConfigError("FockCutoff::for_run: t_horizon must be finite and >= 0");
    if (!std::isfinite(g)) throw ConfigError("FockCutoff::for_run: g must be finite");

    const double beta = alpha_mag + std::abs(g) * t_horizon;
    const double n = std::ceil(beta * beta + 6.0 * beta + 10.0);
    if (n > 200000.0)
        throw ConfigError("FockCutoff::for_run: derived n_max exceeds 200000; "
                          "reduce t_max, g or alpha");
    return FockCutoff(std::max(1, static_cast<int>(n)));
}

// ------------------------------ ModelParams ---------------------------------

void ModelParams::validate() const {
    if (!std::isfinite(omega) || !std::isfinite(nu) || !std::isfinite(g))
        throw ConfigError("ModelParams: omega, nu, g must be finite");
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw ConfigError("ModelParams: lambda must be finite and >= 0");
}

// ------------------------------ StateVector ---------------------------------

StateVector::StateVector(Vector amplitudes, FockCutoff cutoff)
    : amps_(std::move(amplitudes)), n_max_(cutoff.n_max) {
    if (amps_.size() != cutoff.dim())
        throw DimensionMismatch("StateVector: expected " + std::to_string(cutoff.dim()) +
                                " amplitudes, got " + std::to_string(amps_.size()));
    renormalize();
}

StateVector StateVector::basis(FockCutoff cutoff, int spin, int n) {
    if (spin != kSpinUp && spin != kSpinDown)
        throw DimensionMismatch("StateVector::basis: spin must be 0 or 1");
    if (n < 0 || n > cutoff.n_max)
        throw DimensionMismatch("StateVector::basis: photon number out of range");
    Vector v = Vector::Zero(cutoff.dim());
    v[composite_index(spin, n, cutoff.n_max)] = 1.0;
    return StateVector(std::move(v), cutoff);
}

void StateVector::renormalize() {
    const double n = amps_.norm();
    if (!std::isfinite(n) || n <= 0.0)
        throw NonFiniteAmplitude("StateVector: norm is zero or non-finite");
    amps_ /= n;
}

Complex StateVector::overlap(const StateVector& other) const {
    if (other.dim() != dim())
        throw DimensionMismatch("StateVector::overlap: dimensions differ");
    return amps_.dot(other.amps_);
}

// ------------------------------ build_operators -----------------------------

ModelOperators build_operators(const ModelParams& params, FockCutoff cutoff) {
    params.validate();

    const int M = cutoff.field_dim();
    const int D = cutoff.dim();

    ModelOperators ops{cutoff, params, {}, SparseMatrix(D, D), SparseMatrix(D, D),
                       SparseMatrix(D, D), SparseMatrix(D, D), SparseMatrix(D, D)};

    ops.sqrt_n.resize(M + 1);
    for (int n = 0; n <= M; ++n) ops.sqrt_n[n] = std::sqrt(static_cast<double>(n));

    using Triplet = Eigen::Triplet<Complex>;
    std::vector<Triplet> ta, tx, tz;
    ta.reserve(2 * M);
    tx.reserve(2 * M);
    tz.reserve(2 * M);

    for (int s = 0; s < 2; ++s) {
        for (int n = 0; n < M; ++n) {
            const int idx = composite_index(s, n, cutoff.n_max);
            // a: |n⟩ → √n |n-1⟩, identity on spin
            if (n >= 1) ta.emplace_back(composite_index(s, n - 1, cutoff.n_max), idx,
                                        Complex(ops.sqrt_n[n], 0.0));
            // σx swaps the spin blocks, σz is ±1 on them
            tx.emplace_back(composite_index(1 - s, n, cutoff.n_max), idx, Complex(1.0, 0.0));
            tz.emplace_back(idx, idx, Complex(s == kSpinUp ? 1.0 : -1.0, 0.0));
        }
    }

    ops.a.setFromTriplets(ta.begin(), ta.end());
    ops.sigma_x.setFromTriplets(tx.begin(), tx.end());
    ops.sigma_z.setFromTriplets(tz.begin(), tz.end());
    ops.a_dagger = SparseMatrix(ops.a.adjoint());

    SparseMatrix number_op = ops.a_dagger * ops.a;
    SparseMatrix position = ops.a + ops.a_dagger;
    ops.hamiltonian = params.omega * number_op + (0.5 * params.nu) * ops.sigma_z +
                      params.g * SparseMatrix(ops.sigma_x * position);
    ops.hamiltonian.makeCompressed();
    ops.a.makeCompressed();
    ops.a_dagger.makeCompressed();
    ops.sigma_x.makeCompressed();
    ops.sigma_z.makeCompressed();
    return ops;
}

// ------------------------------ coherent_state ------------------------------

Vector coherent_state(Complex alpha, FockCutoff cutoff, double tail_tol) {
    const int M = cutoff.field_dim();
    Vector field = Vector::Zero(M);

    const double A = std::norm(alpha); // |α|²
    if (A == 0.0) {
        field[0] = 1.0;
        return field;
    }

    // Poisson tail mass beyond n_max, evaluated in log space.
    const double logA = std::log(A);
    double mass = 0.0;
    for (int n = 0; n < M; ++n) {
        mass += std::exp(-A + n * logA - std::lgamma(n + 1.0));
    }
    const double tail = std::max(0.0, 1.0 - mass);
    if (tail > tail_tol) {
        std::ostringstream os;
        os << "coherent_state: Poisson tail mass " << tail << " beyond n_max=" << cutoff.n_max
           << " exceeds tolerance " << tail_tol << " for alpha=" << fmt_complex(alpha);
        throw CutoffTooSmall(os.str());
    }

    const double log_mag = std::log(std::abs(alpha));
    const double phase = std::arg(alpha);
    for (int n = 0; n < M; ++n) {
        const double lm = -0.5 * A + n * log_mag - 0.5 * std::lgamma(n + 1.0);
        field[n] = std::polar(std::exp(lm), n * phase);
    }
    field /= field.norm();
    return field;
}

// ------------------------------ current_eigenstate --------------------------

SpinVector current_eigenstate(int sign) {
    if (sign != 1 && sign != -1)
        throw ConfigError("current_eigenstate: sign must be +1 or -1");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    SpinVector v;
    v << Complex(inv_sqrt2, 0.0), Complex(sign * inv_sqrt2, 0.0);
    return v;
}

// ------------------------------ compose -------------------------------------

StateVector compose(const SpinVector& spin, const Vector& field) {
    if (field.size() < 2)
        throw DimensionMismatch("compose: field dimension must be >= 2");
    const FockCutoff cutoff(static_cast<int>(field.size()) - 1);
    Vector amps(cutoff.dim());
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < field.size(); ++n)
            amps[composite_index(s, n, cutoff.n_max)] = spin[s] * field[n];
    return StateVector(std::move(amps), cutoff);
}

// ------------------------------ observables ---------------------------------

ObservableSet observables(const StateVector& state, const ModelOperators& ops) {
    if (state.dim() != ops.cutoff.dim())
        throw DimensionMismatch("observables: state and operator dimensions differ");

    const int M = ops.cutoff.field_dim();
    const Complex* p = state.amplitudes().data();
    const double* sq = ops.sqrt_n.data();
    const Complex* u = p;     // spin-up block
    const Complex* v = p + M; // spin-down block

    double norm2 = 0.0;
    double n_mean = 0.0;
    Complex a_raw(0.0, 0.0);
    Complex a2_raw(0.0, 0.0);
    Complex sx_cross(0.0, 0.0);       // Σ conj(u_n) v_n
    Complex x_cross(0.0, 0.0);        // Σ conj(u_n) [(a+a†)v]_n
    Complex y_cross(0.0, 0.0);        // Σ conj(u_n) [(a-a†)v]_n
    double sz_raw = 0.0;

    for (int s = 0; s < 2; ++s) {
        const Complex* blk = p + s * M;
        for (int n = 0; n < M; ++n) {
            const double w = std::norm(blk[n]);
            norm2 += w;
            n_mean += n * w;
            sz_raw += (s == kSpinUp ? w : -w);
            if (n + 1 < M) a_raw += std::conj(blk[n]) * (sq[n + 1] * blk[n + 1]);
            if (n + 2 < M) a2_raw += std::conj(blk[n]) * (sq[n + 1] * sq[n + 2] * blk[n + 2]);
        }
    }
    for (int n = 0; n < M; ++n) {
        sx_cross += std::conj(u[n]) * v[n];
        Complex raise = (n + 1 < M) ? sq[n + 1] * v[n + 1] : Complex(0.0, 0.0);
        Complex lower = (n > 0) ? sq[n] * v[n - 1] : Complex(0.0, 0.0);
        x_cross += std::conj(u[n]) * (raise + lower);
        y_cross += std::conj(u[n]) * (raise - lower);
    }

    if (!std::isfinite(norm2) || norm2 <= 0.0)
        throw NonFiniteAmplitude("observables: state norm is zero or non-finite");

    const double inv = 1.0 / norm2;
    ObservableSet obs;
    obs.norm = std::sqrt(norm2);
    obs.a_mean = a_raw * inv;
    obs.var_a = std::max(0.0, n_mean * inv - std::norm(obs.a_mean));
    obs.delta_a_sq = a2_raw * inv - obs.a_mean * obs.a_mean;
    obs.sx_mean = 2.0 * sx_cross.real() * inv;
    // ⟨σx(a-a†)⟩ = 2i·Im(y_cross) is purely imaginary, so the covariance
    // -i⟨σx(a-a†)⟩ + i⟨σx⟩⟨a-a†⟩ is real.
    obs.cov_current_field = 2.0 * y_cross.imag() * inv - 2.0 * obs.sx_mean * obs.a_mean.imag();
    obs.energy = ops.params.omega * n_mean * inv + 0.5 * ops.params.nu * sz_raw * inv +
                 ops.params.g * 2.0 * x_cross.real() * inv;
    return obs;
}

double top_level_occupancy(const StateVector& state, int levels) {
    const int M = state.n_max() + 1;
    levels = std::min(std::max(levels, 1), M);
    const Complex* p = state.amplitudes().data();
    double occ = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = M - levels; n < M; ++n) occ += std::norm(p[s * M + n]);
    return occ;
}

double coherent_projection_expectation(const StateVector& state, Complex alpha) {
    const Vector field = coherent_state(alpha, state.cutoff());
    const int M = state.n_max() + 1;
    Complex up(0.0, 0.0), down(0.0, 0.0);
    const Complex* p = state.amplitudes().data();
    for (int n = 0; n < M; ++n) {
        up += std::conj(field[n]) * p[n];
        down += std::conj(field[n]) * p[M + n];
    }
    return std::norm(up) + std::norm(down);
}

} // namespace qreduce
