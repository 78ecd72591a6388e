#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace psd {

/// SplitMix64 step; used for seeding and stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for an independent sub-stream: splitmix64 over (seed, stream_id).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id);

/// xoshiro256** (Blackman & Vigna), state filled from a 64-bit seed by
/// SplitMix64. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer on [0, bound) without modulo bias. bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Exact Binomial(n, p) draw by inversion, walking outward from the mode.
/// The pmf is evaluated in log space so large n does not underflow.
std::uint64_t sample_binomial(Xoshiro256& rng, std::uint64_t n, double p);

/// Fisher-Yates permutation of [0, n).
void random_permutation(Xoshiro256& rng, std::span<std::uint64_t> out);

}  // namespace psd
