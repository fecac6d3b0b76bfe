#include "lrtrunc/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace lrtrunc {

EstimateWithCI wilson_estimate(std::uint64_t successes, std::uint64_t trials,
                               std::uint64_t seed) {
  EstimateWithCI e;
  e.trials = trials;
  e.seed = seed;
  if (trials == 0) {
    e.ci_high = 1.0;
    return e;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double spread = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  e.estimate = p;
  e.ci_low = std::clamp(centre - spread, 0.0, p);
  e.ci_high = std::clamp(centre + spread, p, 1.0);
  return e;
}

EstimateWithCI mean_estimate(double sum, double sum_sq, std::uint64_t trials,
                             std::uint64_t seed) {
  EstimateWithCI e;
  e.trials = trials;
  e.seed = seed;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  double var = 0.0;
  if (trials > 1) var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  const double half = kZ95 * std::sqrt(var / n);
  e.estimate = mean;
  e.ci_low = mean - half;
  e.ci_high = mean + half;
  return e;
}

double proportion_sigma(double p, std::uint64_t trials) {
  const double n = static_cast<double>(std::max<std::uint64_t>(trials, 1));
  return std::max(std::sqrt(p * (1.0 - p) / n), 1.0 / n);
}

}  // namespace lrtrunc
