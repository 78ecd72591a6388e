#include "psd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psd/errors.hpp"

namespace psd {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state = a ^ (stream_id * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256::result_type Xoshiro256::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t Xoshiro256::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t sample_binomial(Xoshiro256& rng, std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError("binomial probability outside [0, 1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  const double nd = static_cast<double>(n);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_nfact = std::lgamma(nd + 1.0);
  auto log_pmf = [&](double k) {
    return log_nfact - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) +
           k * log_p + (nd - k) * log_q;
  };

  const auto mode = static_cast<std::uint64_t>(
      std::min(nd, std::floor((nd + 1.0) * p)));
  const double pmf_mode = std::exp(log_pmf(static_cast<double>(mode)));
  // Ratio recurrences: pmf(k+1)/pmf(k) = (n-k)/(k+1) * p/q.
  const double odds = p / (1.0 - p);

  double u = rng.uniform();
  u -= pmf_mode;
  if (u < 0.0) return mode;

  // Outcomes visited in the fixed order mode, mode+1, mode-1, mode+2, ...;
  // inverting any fixed ordering of the support yields exact draws.
  std::uint64_t up = mode;
  std::uint64_t down = mode;
  double pmf_up = pmf_mode;
  double pmf_down = pmf_mode;
  bool up_open = mode < n;
  bool down_open = mode > 0;
  while (up_open || down_open) {
    if (up_open) {
      pmf_up *= static_cast<double>(n - up) / static_cast<double>(up + 1) * odds;
      ++up;
      u -= pmf_up;
      if (u < 0.0) return up;
      up_open = up < n && pmf_up > 0.0;
    }
    if (down_open) {
      pmf_down *= static_cast<double>(down) /
                  (static_cast<double>(n - down + 1) * odds);
      --down;
      u -= pmf_down;
      if (u < 0.0) return down;
      down_open = down > 0 && pmf_down > 0.0;
    }
  }
  // Only reachable through accumulated rounding in the tails.
  return mode;
}

void random_permutation(Xoshiro256& rng, std::span<std::uint64_t> out) {
  std::iota(out.begin(), out.end(), std::uint64_t{0});
  for (std::size_t i = out.size(); i > 1; --i) {
    const std::uint64_t j = rng.below(i);
    std::swap(out[i - 1], out[j]);
  }
}

}  // namespace psd
