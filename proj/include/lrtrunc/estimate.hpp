#pragma once

#include <cstdint>
#include <string>

namespace lrtrunc {

/// Monte Carlo point estimate with a two-sided 95% confidence interval.
/// Uniform return type of every stochastic estimator in the library.
struct EstimateWithCI {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  double half_width() const { return 0.5 * (ci_high - ci_low); }
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` (95%).
EstimateWithCI wilson_estimate(std::uint64_t successes, std::uint64_t trials,
                               std::uint64_t seed);

/// Normal-approximation interval for a sample mean.
EstimateWithCI mean_estimate(double sum, double sum_sq, std::uint64_t trials,
                             std::uint64_t seed);

/// Standard error of a Bernoulli proportion, floored at 1/trials so that
/// "within k sigma" checks stay meaningful at 0 or 1.
double proportion_sigma(double p, std::uint64_t trials);

}  // namespace lrtrunc
