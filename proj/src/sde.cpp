#include "qreduce/sde.hpp"

#include <cmath>
#include <sstream>

namespace qreduce {

// ------------------------------ IntegratorConfig ----------------------------

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("IntegratorConfig: dt must be > 0");
    if (!(sample_interval >= dt))
        throw ConfigError("IntegratorConfig: sample_interval must be >= dt");
    const double ratio = sample_interval / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw ConfigError("IntegratorConfig: sample_interval must be an integer multiple of dt");
    if (!(truncation_tolerance > 0.0))
        throw ConfigError("IntegratorConfig: truncation_tolerance must be > 0");
}

long IntegratorConfig::stride() const {
    return std::lround(sample_interval / dt);
}

// ------------------------------ em_step_core --------------------------------

namespace detail {

double em_step_core(const Vector& psi, Vector& scratch, Vector& out, const ModelParams& params,
                    const ModelOperators& ops, double dt, Complex dB, bool renormalize) {
    const int M = ops.cutoff.field_dim();
    const double* sq = ops.sqrt_n.data();
    const Complex* in = psi.data();
    Complex* w = scratch.data();
    Complex* o = out.data();

    // scratch = (1 ⊗ a) ψ and the conditional expectation a_t = ⟨ψ|a|ψ⟩/⟨ψ|ψ⟩
    // (the denominator matters only when stepping without renormalization).
    Complex a_t(0.0, 0.0);
    double in_norm2 = 0.0;
    for (int s = 0; s < 2; ++s) {
        const Complex* blk = in + s * M;
        Complex* wb = w + s * M;
        for (int n = 0; n + 1 < M; ++n) wb[n] = sq[n + 1] * blk[n + 1];
        wb[M - 1] = Complex(0.0, 0.0);
        for (int n = 0; n < M; ++n) {
            a_t += std::conj(blk[n]) * wb[n];
            in_norm2 += std::norm(blk[n]);
        }
    }
    if (!std::isfinite(in_norm2) || in_norm2 <= 0.0)
        throw NonFiniteAmplitude("em_step: input state norm is zero or non-finite");
    a_t /= in_norm2;

    const double l2 = params.lambda * params.lambda;
    // Coefficient of (aψ): λ dB from the noise plus λ²ā_t dt from the drift.
    const Complex w_coef = params.lambda * dB + dt * l2 * std::conj(a_t);
    // Scalar multiple of ψ: -½λ²|a_t|² dt - ½λ(a_t dB + ā_t dB*).
    const Complex scalar = Complex(-0.5 * dt * l2 * std::norm(a_t), 0.0) -
                           0.5 * params.lambda * (a_t * dB + std::conj(a_t) * std::conj(dB));

    double norm2 = 0.0;
    for (int s = 0; s < 2; ++s) {
        const double half_nu = (s == kSpinUp ? 0.5 : -0.5) * params.nu;
        const Complex* blk = in + s * M;
        const Complex* other = in + (1 - s) * M;
        const Complex* wb = w + s * M;
        Complex* ob = o + s * M;
        for (int n = 0; n < M; ++n) {
            // σx(a+a†) couples to the opposite spin block.
            Complex coupled = (n + 1 < M) ? sq[n + 1] * other[n + 1] : Complex(0.0, 0.0);
            if (n > 0) coupled += sq[n] * other[n - 1];
            const Complex diag =
                scalar + Complex(-dt * l2 * n, -dt * (params.omega * n + half_nu));
            const Complex val = blk[n] + blk[n] * diag + wb[n] * w_coef -
                                Complex(0.0, dt * params.g) * coupled;
            ob[n] = val;
            norm2 += std::norm(val);
        }
    }

    if (!std::isfinite(norm2) || norm2 <= 0.0)
        throw NonFiniteAmplitude("em_step: state norm became zero or non-finite "
                                 "(dt may be too large)");
    const double nrm = std::sqrt(norm2);
    if (renormalize) {
        const double inv = 1.0 / nrm;
        for (int i = 0; i < 2 * M; ++i) o[i] *= inv;
    }
    return nrm;
}

} // namespace detail

StateVector em_step(const StateVector& state, const ModelParams& params,
                    const ModelOperators& ops, double dt, const NoiseIncrement& noise,
                    bool renormalize, double* pre_step_norm) {
    if (state.dim() != ops.cutoff.dim())
        throw DimensionMismatch("em_step: state and operator dimensions differ");
    if (!(dt > 0.0)) throw ConfigError("em_step: dt must be > 0");
    params.validate();

    Vector scratch(state.dim());
    Vector out(state.dim());
    const double pre = detail::em_step_core(state.amplitudes(), scratch, out, params, ops, dt,
                                            noise.dB, renormalize);
    if (pre_step_norm) *pre_step_norm = pre;
    // StateVector holds unit-norm amplitudes; the raw norm is *pre_step_norm.
    return StateVector(std::move(out), ops.cutoff);
}

// ------------------------------ evolve --------------------------------------

namespace detail {

namespace {

double occupancy_top5_raw(const Vector& amps, int M, double norm2) {
    const int levels = std::min(5, M);
    const Complex* p = amps.data();
    double occ = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = M - levels; n < M; ++n) occ += std::norm(p[s * M + n]);
    return occ / norm2;
}

} // namespace

TrajectoryRecord evolve_record(const StateVector& initial, const ModelParams& params,
                               const ModelOperators& ops, const IntegratorConfig& config,
                               double t_end, RngStream rng, const StopRule* stop) {
    params.validate();
    config.validate();
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw ConfigError("evolve: t_end must be finite and >= 0");
    if (initial.dim() != ops.cutoff.dim())
        throw DimensionMismatch("evolve: state and operator dimensions differ");

    const double dt = config.dt;
    const long n_steps = std::lround(t_end / dt);
    const long stride = config.stride();
    const int M = ops.cutoff.field_dim();

    TrajectoryRecord rec;
    const long n_samples = n_steps / stride + 1;
    rec.times.reserve(n_samples);
    rec.series.reserve(n_samples);
    rec.step_drift.reserve(n_samples);
    rec.occupancy_top5.reserve(n_samples);

    Vector cur = initial.amplitudes();
    Vector scratch(initial.dim());
    Vector next(initial.dim());

    double cur_norm = 1.0; // running norm when renormalization is disabled

    auto record_sample = [&](double t, double drift_here) {
        StateVector sv(cur, ops.cutoff);
        rec.times.push_back(t);
        rec.series.push_back(observables(sv, ops));
        rec.step_drift.push_back(drift_here);
        rec.occupancy_top5.push_back(top_level_occupancy(sv, 5));
        if (stop && !rec.stopping_time) {
            const double sx = rec.series.back().sx_mean;
            if (std::abs(sx) > stop->threshold) {
                rec.stopping_time = t;
                rec.outcome = (sx > 0.0) ? 1 : -1;
            }
        }
    };

    record_sample(0.0, 0.0);
    const bool halt_early = stop && stop->halt_when_reduced;
    if (halt_early && rec.stopping_time) {
        rec.final_state = StateVector(cur, ops.cutoff);
        return rec;
    }

    for (long step = 1; step <= n_steps; ++step) {
        const NoiseIncrement noise = sample_noise(rng, dt);
        const double pre = em_step_core(cur, scratch, next, params, ops, dt, noise.dB,
                                        config.renormalize_each_step);
        cur.swap(next);

        const double drift = pre / cur_norm - 1.0;
        if (!config.renormalize_each_step) cur_norm = pre;
        rec.norm_drift.n_steps += 1;
        rec.norm_drift.mean += (drift - rec.norm_drift.mean) / rec.norm_drift.n_steps;
        rec.norm_drift.max_abs = std::max(rec.norm_drift.max_abs, std::abs(drift));

        const double norm2 = config.renormalize_each_step ? 1.0 : cur.squaredNorm();
        const double occ = occupancy_top5_raw(cur, M, norm2);
        rec.truncation_max = std::max(rec.truncation_max, occ);
        if (occ > config.truncation_tolerance) {
            rec.valid = false;
            std::ostringstream reason;
            reason << "truncation monitor tripped at t=" << step * dt << " (top-5 occupancy "
                   << occ << " > " << config.truncation_tolerance << ")";
            rec.invalid_reason = reason.str();
            record_sample(step * dt, drift);
            break;
        }

        if (step % stride == 0) {
            record_sample(step * dt, drift);
            if (halt_early && rec.stopping_time) break;
        }
    }

    rec.final_state = StateVector(cur, ops.cutoff);
    return rec;
}

} // namespace detail

TrajectoryRecord evolve(const StateVector& initial, const ModelParams& params,
                        const IntegratorConfig& config, double t_end, RngStream rng,
                        const std::optional<StopRule>& stop) {
    const ModelOperators ops = build_operators(params, initial.cutoff());
    TrajectoryRecord rec = detail::evolve_record(initial, params, ops, config, t_end, rng,
                                                 stop ? &*stop : nullptr);
    if (!rec.valid) throw CutoffExceeded("evolve: " + rec.invalid_reason);
    return rec;
}

} // namespace qreduce
