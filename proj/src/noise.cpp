#include "qreduce/noise.hpp"

#include <cmath>
#include <numbers>

namespace qreduce {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

NoiseIncrement NoiseIncrement::from_normals(double xi1, double xi2, double dt) {
    if (!(dt > 0.0)) throw ConfigError("NoiseIncrement: dt must be > 0");
    const double s = std::sqrt(dt);
    return NoiseIncrement{Complex(xi1 * s, xi2 * s)};
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t path_index) {
    key_ = mix(mix(seed) ^ mix(path_index ^ 0x5851F42D4C957F2Dull));
}

std::uint64_t RngStream::next_raw() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

std::pair<double, double> RngStream::next_normal_pair() {
    // 53-bit uniforms; u1 shifted into (0,1] so log(u1) is finite.
    const double u1 = (static_cast<double>(next_raw() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

NoiseIncrement sample_noise(RngStream& rng, double dt) {
    if (!(dt > 0.0)) throw ConfigError("sample_noise: dt must be > 0");
    auto [xi1, xi2] = rng.next_normal_pair();
    return NoiseIncrement::from_normals(xi1, xi2, dt);
}

} // namespace qreduce
