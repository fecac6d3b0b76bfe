#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace lrtrunc {

inline constexpr std::size_t kEnumerationMaxTerms = 24;
inline constexpr std::uint64_t kConvolutionMaxSum = 1'000'000;
/// Pattern counts are held in 64 bits.
inline constexpr std::size_t kConvolutionMaxTerms = 63;

/// Exact law of sum_k a_k Y_k with independent fair signs Y_k.
/// Masses are pattern counts over 2^terms.
struct SignedSumDistribution {
  std::vector<std::int64_t> support;  ///< ascending, only points with positive mass
  std::vector<std::uint64_t> counts;
  std::size_t terms = 0;              ///< n; the denominator is 2^n

  std::uint64_t count_at(std::int64_t x) const;
  double mass_at(std::int64_t x) const;
  mpq_class exact_mass_at(std::int64_t x) const;
};

/// Iterated convolution. Uses the dense DP when n <= 63 and sum a_k <= 10^6,
/// otherwise exhaustive enumeration for n <= 24; throws std::length_error
/// beyond both limits.
SignedSumDistribution exact_distribution(const std::vector<std::uint64_t>& a);

struct MaxPointMass {
  std::uint64_t count = 0;      ///< numerator over 2^n (zeros dropped)
  std::size_t terms = 0;        ///< n after dropping zero coefficients
  double value = 0.0;
  double bound = 0.0;           ///< 1/sqrt(n)
  bool holds = false;           ///< decided exactly: count^2 * n <= 4^n
};

/// sup_x P(sum a_k Y_k = x) after dropping zero coefficients.
MaxPointMass max_point_mass(const std::vector<std::uint64_t>& a);

struct TailBounds {
  std::uint64_t positive = 0;   ///< pattern counts over 2^n
  std::uint64_t nonzero = 0;
  std::uint64_t nonnegative = 0;
  std::size_t terms = 0;
  double p_pos = 0.0;
  double p_nonzero = 0.0;
  double p_nonneg = 0.0;
  bool pos_holds = false;       ///< p_pos >= 1/4, exact
  bool nonzero_holds = false;   ///< p_nonzero >= 1/2, exact
  bool nonneg_holds = false;    ///< p_nonneg >= 1/2, exact
  bool all_hold() const { return pos_holds && nonzero_holds && nonneg_holds; }
};

/// Throws std::invalid_argument for an all-zero vector.
TailBounds tail_bounds(const std::vector<std::uint64_t>& a);

struct CosineMoment {
  std::uint64_t n = 0;
  double value = 0.0;                 ///< by the two-term recursion
  std::optional<double> closed_form;  ///< 2^-n C(n, n/2) for even n
  bool within_sqrt_bound = true;      ///< I_n <= 1/sqrt(n), n >= 1
  bool within_even_bound = true;      ///< I_n <= 0.87/sqrt(n), even n >= 2
};

/// I_n = (1/pi) * integral_{-pi/2}^{pi/2} cos(t)^n dt.
CosineMoment cosine_moment(std::uint64_t n);

}  // namespace lrtrunc
