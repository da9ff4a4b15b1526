#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "deblur/errors.hpp"

namespace deblur {

// Deterministic random stream. One stream is owned by exactly one chain or
// execution context; parallel work uses independently seeded streams
// (seed, stream_id). All distributions are generated from the raw engine
// with fixed algorithms so that a given (seed, stream_id, call sequence)
// reproduces bit-identical values on any platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : engine_(mix(seed, stream_id)) {}

  // Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch only, so each call
  // consumes exactly two engine draws).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Gamma(shape, rate) by Marsaglia-Tsang squeeze; shape < 1 boosted.
  double gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0)
      throw DomainError("gamma draw requires shape > 0 and rate > 0");
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v / rate;
    }
  }

  // Uniform on {-1, +1}.
  double rademacher() { return (engine_() & 1u) ? 1.0 : -1.0; }

  std::uint64_t raw() { return engine_(); }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
    // splitmix64 finalizer over (seed, stream) so nearby seeds decorrelate.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace deblur
