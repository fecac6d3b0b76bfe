#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "lrtrunc/estimate.hpp"
#include "lrtrunc/rng.hpp"

namespace lrtrunc {

struct BppConstants {
  static constexpr double bound_constant = 32.0;
  static constexpr double profile_coefficient = 100.0;
  static constexpr double profile_exponent = 0.63092975357145743710;  // log 2 / log 3
};

inline constexpr unsigned kMaxSampledLevel = 13;
inline constexpr unsigned kMaxExactLevel = 8;

/// Spins of level N of the ternary spin tree, leaves in lexicographic order.
struct TernarySpinLevel {
  unsigned level = 0;
  std::vector<std::int8_t> spins;
  std::uint64_t seed = 0;
};

/// Top-down generation: the root has spin +1, the first two children of a
/// vertex copy its spin and the third child gets a fresh fair sign.
TernarySpinLevel sample_level(unsigned level, std::uint64_t seed);

/// Exact law of Y_N, the level-N spin sum. Masses are counts over
/// 2^denominator_exponent with denominator_exponent = (3^N - 1) / 2.
struct LevelSumDistribution {
  unsigned level = 0;
  std::vector<std::int64_t> support;  ///< ascending, positive mass only
  std::vector<mpz_class> counts;
  std::uint64_t denominator_exponent = 0;

  double probability(std::size_t i) const;
  mpq_class exact_probability(std::size_t i) const;
  /// max_x P(Y_N = x) <= 32 * 2^-N, decided exactly.
  bool within_bound() const;
  double max_probability() const;
};

/// Subtree recursion D_m(s) = D_{m-1}(s) * D_{m-1}(s) * (D_{m-1}(+) + D_{m-1}(-)) / 2.
LevelSumDistribution exact_levelsum(unsigned level);

/// The infinite walk read off the leaves of the ternary spin tree, one leaf
/// per step in lexicographic order.
///
/// Leaf m sits below the ancestors given by the base-3 digits of m. Its spin
/// is the fresh sign of the nearest ancestor-or-self whose digit is 2, or +1
/// if every digit is 0 or 1. A fresh sign is drawn when its vertex is first
/// entered, so the state after m steps holds exactly the signs revealed by
/// the first m spins.
class WalkStream {
 public:
  explicit WalkStream(std::uint64_t seed);

  /// Next increment sigma_{m+1}.
  int next();
  std::int64_t position() const { return position_; }
  std::uint64_t steps() const { return steps_; }

  /// Copy of the current state with a fresh generator: an exact sample of the
  /// future given the revealed history.
  WalkStream continuation(std::uint64_t seed) const;

 private:
  Rng rng_;
  std::uint64_t steps_ = 0;
  std::int64_t position_ = 0;
  std::vector<std::int8_t> signs_;  ///< fresh sign of the current ancestor at each height
};

/// 100 * k^(-log 2 / log 3).
double predictability_bound(std::uint64_t k);

/// Lower estimate of sup_x P(S_{n+k} = x | S_0..S_n): for each sampled
/// history, `trials` continuations are drawn and the largest empirical point
/// mass is kept. The result is the maximum over `histories` histories with
/// the Wilson interval of the maximizing cell.
EstimateWithCI estimate_predictability(std::uint64_t k, std::uint64_t history_length,
                                       std::uint64_t trials, std::uint64_t seed,
                                       std::uint64_t histories = 1, unsigned workers = 1);

enum class SignSource {
  Unpredictable,  ///< increments of a WalkStream
  Independent,    ///< independent fair signs
};

/// S~_m = sum_{i<=m} sigma_i X_i with (X_i) a uniform random permutation of
/// the step multiset, independent of the signs.
class GeneralStepWalk {
 public:
  GeneralStepWalk(std::vector<double> steps, std::uint64_t seed,
                  SignSource source = SignSource::Unpredictable);

  double next();
  double position() const { return position_; }
  std::size_t steps_taken() const { return taken_; }
  std::size_t length() const { return order_.size(); }

  /// Same history, fresh randomness for the remaining permutation and signs.
  GeneralStepWalk continuation(std::uint64_t seed) const;

 private:
  std::vector<double> order_;
  std::size_t taken_ = 0;
  double position_ = 0.0;
  SignSource source_;
  WalkStream stream_;
  Rng rng_;
};

/// Estimate of sup_z P(S~_{N+k} = z | history up to N), conditioning on the
/// full history (permutation prefix and signs), which dominates the
/// conditional law given the positions alone. Values are bucketed at a
/// relative resolution of 1e-9 of the total step mass.
EstimateWithCI general_step_point_mass(const std::vector<double>& steps,
                                       std::size_t history_length, std::uint64_t trials,
                                       std::uint64_t seed,
                                       SignSource source = SignSource::Unpredictable,
                                       std::uint64_t histories = 1);

}  // namespace lrtrunc
