#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "lrtrunc/estimate.hpp"
#include "lrtrunc/kernel.hpp"
#include "lrtrunc/pathmeasure.hpp"

namespace lrtrunc {

/// ov(gamma, phi) = prod over shared unordered edges of 1/p_e, in log space.
struct OverlapValue {
  double log_value = 0.0;
  std::size_t shared_edge_count = 0;
  bool infinite = false;  ///< a shared edge has p_e = 0

  double value() const;
};

/// Edges are matched regardless of traversal direction and counted once.
OverlapValue weighted_overlap(const std::vector<Site>& first, const std::vector<Site>& second,
                              const Kernel& kernel);
OverlapValue weighted_overlap(const PathSample& first, const PathSample& second,
                              const Kernel& kernel);

struct OverlapPoint {
  std::size_t horizon = 0;
  EstimateWithCI estimate;        ///< mean of ov over independent pairs
  double running_max = 0.0;       ///< max of the estimates up to this horizon
  double implied_lower_bound = 0.0;
};

/// E[ov(gamma_0^n, phi_0^n)] at each horizon, from one fresh pair per trial.
/// Pairs are shared across horizons (prefixes of one sample). Throws
/// std::runtime_error if any sampled overlap is infinite.
std::vector<OverlapPoint> overlap_curve(const PathMeasure& first, const PathMeasure& second,
                                        std::vector<std::size_t> horizons, std::uint64_t trials,
                                        std::uint64_t seed, unsigned workers = 1);

EstimateWithCI estimate_expected_overlap(const PathMeasure& first, const PathMeasure& second,
                                         std::size_t horizon, std::uint64_t trials,
                                         std::uint64_t seed, unsigned workers = 1);

/// 1 / E[ov]; throws std::invalid_argument when the argument is below 1.
double percolation_lower_bound(double expected_overlap);

inline constexpr std::size_t kBruteForceEdgeLimit = 24;

/// Finite edge set with exact probabilities, and a finitely supported
/// measure on paths given as sets of edge indices.
struct BruteForceInstance {
  std::vector<mpq_class> edge_probability;
  std::vector<std::vector<std::size_t>> paths;
  std::vector<mpq_class> weights;  ///< must sum to 1

  /// Exact conversion of doubles; weights are rescaled to sum to 1 exactly.
  static BruteForceInstance from_doubles(const std::vector<double>& probabilities,
                                         std::vector<std::vector<std::size_t>> paths,
                                         const std::vector<double>& weights);
};

struct PaleyZygmundReport {
  mpq_class p_reach;  ///< P(Z > 0)
  mpq_class mean_z;   ///< E[Z]
  mpq_class mean_z2;  ///< E[Z^2]
  mpq_class mean_ov;  ///< sum_{gamma, phi} mu(gamma) mu(phi) ov(gamma, phi)
  bool mean_is_one = false;
  bool second_moment_matches = false;
  bool lower_bound_holds = false;  ///< P(Z > 0) >= 1 / E[ov]
  bool chain_holds() const { return mean_is_one && second_moment_matches && lower_bound_holds; }
};

/// Exhaustive enumeration over all 2^edges configurations with
/// Z = sum_gamma mu(gamma) 1{gamma open} / P(gamma open).
PaleyZygmundReport brute_force_paley_zygmund(const BruteForceInstance& instance);

/// |E_n|: potential edges {x, y} (p_{x-y} > 0) with both endpoints in the
/// annulus 3nK < ||.||_inf <= 3(n+1)K, K the kernel's support radius.
std::uint64_t cutset_size(const Kernel& kernel, std::uint64_t n);

/// Partial sums of 1/|E_n| for n = 1..n_max.
std::vector<double> cutset_harmonic_sums(const Kernel& kernel, std::uint64_t n_max);

struct CutsetRow {
  std::uint64_t n = 0;
  std::uint64_t size = 0;          ///< |E_n|
  EstimateWithCI traversals;       ///< sum_{e in E_n} b_e (mean edges of E_n per path)
  double sum_b_squared = 0.0;      ///< unbiased estimate of sum_{e in E_n} b_e^2
  double crossing_fraction = 0.0;  ///< paths that got beyond the annulus
};

struct CutsetReport {
  std::vector<CutsetRow> rows;
  double q = 0.0;                  ///< sup_e p_e
  double shared_edges = 0.0;       ///< sum of the rows' sum_b_squared
  double jensen_bound = 1.0;       ///< q^-shared_edges
  double harmonic_sum = 0.0;       ///< sum over the rows of 1/|E_n|
};

/// Requires d = 2 and a bounded-range kernel. Paths are sampled with
/// `path_steps` steps (0 = 3(n_max + 1)K + 1).
CutsetReport cutset_chain_check(const PathMeasure& measure, const Kernel& kernel,
                                const std::vector<std::uint64_t>& cutsets, std::uint64_t trials,
                                std::uint64_t seed, std::size_t path_steps = 0);

}  // namespace lrtrunc
