// noise.hpp — reproducible complex Wiener increments for trajectory integration

#pragma once

#include <cstdint>
#include <utility>

#include "qreduce/hilbert.hpp"

namespace qreduce {

// One increment of the complex Wiener process over a step dt, built as
// dB = ξ₁√dt + i ξ₂√dt from independent standard normals, which gives
// E[dB dB*] = 2dt and E[dB dB] = 0.
struct NoiseIncrement {
    Complex dB{0.0, 0.0};

    static NoiseIncrement from_normals(double xi1, double xi2, double dt);
};

// Counter-based stream: the k-th draw is a pure function of (seed, path_index, k),
// so identical (seed, path_index) reproduce the identical increment sequence
// regardless of execution order or thread scheduling.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t path_index);

    // Two independent standard normals per call (Box-Muller).
    std::pair<double, double> next_normal_pair();

    std::uint64_t draws() const { return counter_; }

  private:
    std::uint64_t next_raw();

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

NoiseIncrement sample_noise(RngStream& rng, double dt);

} // namespace qreduce
