#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace risopt {

/// xoshiro256** generator seeded through splitmix64.
///
/// The algorithm and the seeding procedure are fixed so that a given seed
/// yields the same stream on every platform: the 256-bit state is filled with
/// four consecutive splitmix64 outputs starting from the user seed. Gaussian
/// variates come from the Box-Muller transform on 53-bit uniforms, never from
/// <random> distributions (whose output is implementation-defined).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent stream for (seed, index); used for per-sample substreams.
  static Rng Substream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return NextU64(); }

  std::uint64_t NextU64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  /// Standard normal N(0, 1).
  double Normal();
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> ComplexNormal(double variance = 1.0);

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t& state);

}  // namespace risopt
