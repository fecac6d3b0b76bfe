#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lrtrunc/estimate.hpp"
#include "lrtrunc/kernel.hpp"
#include "lrtrunc/lattice.hpp"
#include "lrtrunc/rng.hpp"

namespace lrtrunc {

inline constexpr std::uint64_t kDefaultVertexCap = 1'000'000;

/// Thrown when a requested computation exceeds a configured resource cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The box {-L..L}^d with free boundary. Vertices are indexed in
/// lexicographic order of their coordinates.
class BoxRegion {
 public:
  BoxRegion(std::size_t dim, std::int64_t half_side, std::int64_t shell_width = 1);

  std::size_t dimension() const { return dim_; }
  std::int64_t half_side() const { return half_side_; }
  std::int64_t shell_width() const { return shell_width_; }
  std::uint64_t vertex_count() const { return vertex_count_; }

  bool contains(const Site& x) const;
  std::uint64_t index_of(const Site& x) const;  ///< throws std::out_of_range
  Site site_of(std::uint64_t index) const;
  std::uint64_t origin_index() const { return origin_; }

  /// ||x||_inf > L - shell_width.
  bool in_shell(const Site& x) const;
  std::vector<std::uint64_t> shell_indices() const;

  /// Index offset of displacement d (valid when both endpoints are inside).
  std::int64_t offset_of(const Site& d) const;

 private:
  std::size_t dim_;
  std::int64_t half_side_;
  std::int64_t shell_width_;
  std::uint64_t side_;
  std::uint64_t vertex_count_;
  std::uint64_t origin_;
  std::vector<std::uint64_t> stride_;
};

/// Open edges of one sampled environment, as vertex-index pairs (a < b).
struct Configuration {
  BoxRegion region;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> open_edges;
  std::uint64_t seed = 0;

  /// One edge per line, "x1 ... xd y1 ... yd" with x < y, lines sorted.
  std::string dump() const;
};

/// Every unordered pair {x, y} of the region is open independently with
/// probability p_{x-y}. Pairs are generated per displacement class with
/// geometric skipping over the translates.
Configuration sample_configuration(const Kernel& kernel, const BoxRegion& region,
                                   std::uint64_t seed,
                                   std::uint64_t vertex_cap = kDefaultVertexCap);

/// Disjoint-set forest (union by size, path halving) over vertex indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::uint32_t find(std::uint32_t v);
  bool unite(std::uint32_t a, std::uint32_t b);
  std::uint32_t size_of(std::uint32_t v) { return size_[find(v)]; }
  std::size_t element_count() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

/// Cluster structure of a configuration.
class ClusterForest {
 public:
  explicit ClusterForest(const Configuration& config);

  std::uint64_t cluster_size(const Site& v);
  bool same_cluster(const Site& x, const Site& y);
  /// Indices of the cluster containing v, ascending.
  std::vector<std::uint64_t> cluster_of(const Site& v);
  bool reaches_shell(const Site& v);

 private:
  BoxRegion region_;
  DisjointSets sets_;
};

ClusterForest clusters(const Configuration& config);

using ReachEstimate = EstimateWithCI;

/// Fraction of independently seeded configurations whose origin cluster
/// touches the boundary shell, with a Wilson interval.
ReachEstimate estimate_reach(const Kernel& kernel, const BoxRegion& region,
                             std::uint64_t trials, std::uint64_t seed,
                             unsigned workers = 1,
                             std::uint64_t vertex_cap = kDefaultVertexCap);

struct TruncationCurve {
  std::vector<std::int64_t> radii;
  std::vector<ReachEstimate> estimates;
  /// Trials in which the origin cluster at radii[j] was not contained in the
  /// one at radii[j+1]; zero under a correct coupling.
  std::uint64_t containment_violations = 0;
  std::uint64_t trials = 0;
};

/// theta-hat(N) for each truncation radius, with all radii sharing one
/// uniform per edge: a trial samples the largest truncation once and the
/// smaller ones keep exactly its edges of length <= N.
TruncationCurve truncation_curve(const Kernel& kernel, const BoxRegion& region,
                                 std::vector<std::int64_t> radii, std::uint64_t trials,
                                 std::uint64_t seed, unsigned workers = 1,
                                 Norm norm = Norm::LInf,
                                 std::uint64_t vertex_cap = kDefaultVertexCap);

enum class PhiMode { Exact, MonteCarlo };

struct PhiValue {
  double value = 0.0;
  double sigma = 0.0;            ///< standard error (0 in exact mode)
  double expected_cluster = 0.0; ///< sum over x in S of P(0 <-> x inside S)
  std::uint64_t internal_edges = 0;
  std::uint64_t trials = 0;
};

inline constexpr std::size_t kPhiExactEdgeLimit = 24;

/// sum_{x in S} sum_{y not in S, ||y-x||_inf <= radius} P(0 <->_S x) p_{x-y}.
PhiValue phi_functional(const Kernel& kernel, const std::vector<Site>& region_set,
                        PhiMode mode, std::int64_t radius, std::uint64_t trials = 0,
                        std::uint64_t seed = kDefaultSeed);

}  // namespace lrtrunc
