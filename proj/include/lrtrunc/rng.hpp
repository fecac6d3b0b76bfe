#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lrtrunc {

/// SplitMix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Seed for trial `index` of a campaign with master seed `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ull));
}

constexpr std::uint64_t kDefaultSeed = 20240917ull;

/// Thin wrapper over mt19937_64 with platform-independent conversions
/// (std::uniform_real_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  bool coin() { return (engine_() >> 63) != 0; }

  int sign() { return coin() ? 1 : -1; }

  /// Uniform integer in [0, n); n > 0. Lemire's nearly-divisionless method.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Number of failures before the first success of a Bernoulli(p) sequence,
  /// given log1p(-p). Requires 0 < p < 1.
  std::uint64_t geometric_skip(double log1m_p) {
    const double g = std::floor(std::log(uniform_pos()) / log1m_p);
    if (!(g < 1.8e19)) return UINT64_MAX;
    return static_cast<std::uint64_t>(g);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lrtrunc
