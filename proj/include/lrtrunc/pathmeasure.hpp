#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lrtrunc/estimate.hpp"
#include "lrtrunc/kernel.hpp"
#include "lrtrunc/lattice.hpp"
#include "lrtrunc/rng.hpp"

namespace lrtrunc {

enum class BlockRule { Any, Positive, NonNegative, NonZero, AtLeast };

/// Condition on the sum of the coordinates listed in `axes`.
struct BlockConstraint {
  std::vector<std::size_t> axes;
  BlockRule rule = BlockRule::Any;
  std::int64_t threshold = 0;  ///< used by AtLeast (single-axis blocks only)

  bool accepts(const Site& x) const;
};

/// {x : 0 < ||x||_inf <= radius} intersected with block-sum conditions on
/// pairwise disjoint coordinate blocks.
struct StepSet {
  std::size_t dim = 0;
  std::int64_t radius = 1;
  std::vector<BlockConstraint> constraints;

  bool contains(const Site& x) const;
  /// Number of points of {||x||_inf <= n} (origin included) meeting the constraints.
  long double cube_count(std::int64_t n) const;
};

inline constexpr std::uint64_t kEnumeratedStepCap = 4'000'000;

/// psi(x) = p_x / sum_{y in A} p_y on a step set A.
///
/// For l_inf-radial kernels the layer ||x||_inf = n is drawn by inverse CDF
/// over p(n) * |sphere_n|, a point is drawn uniformly on that sphere, and
/// points outside A are rejected. Other kernels enumerate the set.
class StepDistribution {
 public:
  StepDistribution(const Kernel& kernel, StepSet set);

  Site sample(Rng& rng) const;
  /// Sum of p_x over the set.
  double total_mass() const { return total_mass_; }
  double probability(const Site& x) const;
  const StepSet& set() const { return set_; }
  bool layered() const { return layered_; }

 private:
  Kernel kernel_;
  StepSet set_;
  bool layered_ = false;
  double total_mass_ = 0.0;
  std::vector<double> layer_cdf_;     // layered: cumulative p(n) |sphere_n|, n = 1..radius
  std::vector<Site> points_;          // enumerated
  std::vector<double> point_cdf_;
};

enum class MeasureTag { M1, M2, M3, Directed };
std::string to_string(MeasureTag tag);

struct PathSample {
  std::vector<Site> vertices;  ///< vertices[0] is the origin
  MeasureTag tag = MeasureTag::M1;
  std::uint64_t seed = 0;

  std::size_t steps() const { return vertices.empty() ? 0 : vertices.size() - 1; }
};

bool is_self_avoiding(const PathSample& path);

struct M1Config {
  Kernel kernel;         ///< layer-normalized above Q
  Site u{};
  Site v{};
  Site u_minus{};
  Site v_minus{};
  double eta = 0.0;      ///< min(p_u, p_v)
  std::int64_t q = 0;    ///< max(||u||_inf, ||v||_inf)
  std::int64_t m = 0;
  double epsilon = 0.0;  ///< 1 / sum_{A_M} p
  double hitting_constant = 0.0;  ///< 25004 eps^0.05 / eta^2
  bool epsilon_condition = false;  ///< eps <= 1e-10
  bool hitting_condition = false;  ///< hitting_constant <= 1/4
  bool strict = false;
  std::shared_ptr<const StepDistribution> psi{};  ///< on A_M
};

/// Validates u, v, M and derives A_M, psi_M and epsilon. In strict mode the
/// two size conditions on epsilon are enforced, otherwise only reported.
M1Config build_m1(const Kernel& kernel, const Site& u, const Site& v, std::int64_t m,
                  bool strict = false);

/// Smallest-norm admissible pair (ties broken by larger probability), searched
/// within `search_radius`.
std::pair<Site, Site> choose_m1_vectors(const Kernel& kernel, std::int64_t search_radius = 3);

struct M2Config {
  Kernel kernel;
  std::size_t dim = 0;
  std::int64_t radius = 0;
  std::array<Site, 4> w{};
  std::array<std::shared_ptr<const StepDistribution>, 4> psi{};  ///< on A_1..A_4
  double full_mass = 0.0;                                       ///< sum over the radius
  std::array<double, 4> mass_ratio{};                           ///< sum_{A_k} p / full_mass
};

/// Isotropic kernel, d >= 4. `radius` bounds the steps; it defaults to the
/// kernel's support radius and is required when the support is unbounded.
M2Config build_m2(const Kernel& kernel, std::optional<std::int64_t> radius = std::nullopt);

struct M3Config {
  Kernel kernel;
  std::int64_t radius = 0;
  std::array<std::shared_ptr<const StepDistribution>, 3> psi{};  ///< on A_1..A_3
  double full_mass = 0.0;
  std::array<double, 3> mass_ratio{};
};

M3Config build_m3(const Kernel& kernel, std::optional<std::int64_t> radius = std::nullopt);

/// A sampler for one of the path measures. Cheap to copy.
class PathMeasure {
 public:
  static PathMeasure m1(M1Config config);
  /// `phase` in 0..5 selects which of the six restarted laws is used.
  static PathMeasure m2(M2Config config, unsigned phase = 0);
  static PathMeasure m3(M3Config config);
  /// i.i.d. steps from psi on {x_axis > 0, ||x||_inf <= radius}.
  static PathMeasure directed(const Kernel& kernel, std::size_t axis,
                              std::optional<std::int64_t> radius = std::nullopt);

  /// Path with the given number of steps. Longer samples with the same seed
  /// extend shorter ones.
  PathSample sample(std::size_t steps, std::uint64_t seed) const;

  MeasureTag tag() const { return tag_; }
  unsigned phase() const { return phase_; }
  std::size_t dimension() const;
  const Kernel& kernel() const;
  /// Direction whose coordinate never decreases along the path.
  Site monotone_direction() const;
  /// Step k must strictly increase the monotone coordinate.
  bool designated_strict(std::size_t k) const;
  /// Largest l_inf length of a single step.
  std::int64_t step_reach() const;

  const M1Config* m1_config() const { return m1_.get(); }
  const M2Config* m2_config() const { return m2_.get(); }
  const M3Config* m3_config() const { return m3_.get(); }

 private:
  MeasureTag tag_ = MeasureTag::M1;
  unsigned phase_ = 0;
  std::shared_ptr<const M1Config> m1_;
  std::shared_ptr<const M2Config> m2_;
  std::shared_ptr<const M3Config> m3_;
  std::shared_ptr<const StepDistribution> directed_;
  std::optional<Kernel> directed_kernel_;
  std::size_t directed_axis_ = 0;
};

PathSample sample_m1(const M1Config& config, std::size_t triples, std::uint64_t seed);
PathSample sample_m2(const M2Config& config, std::size_t steps, std::uint64_t seed,
                     unsigned phase = 0);
PathSample sample_m3(const M3Config& config, std::size_t steps, std::uint64_t seed);

struct BoundedEstimate {
  EstimateWithCI estimate;
  double bound = 1.0;    ///< the applicable inequality's right-hand side
  bool vacuous = true;   ///< bound >= 1
};

/// P(x + gamma_k = phi_n for some k <= K, n <= N), gamma ~ first, phi ~ second,
/// independent; the pair (0, 0) is ignored when x = 0. The bound is
/// 25004 eps^0.05 for M1 and 1/4 for M2 / M3.
BoundedEstimate estimate_intersection(const PathMeasure& first, const PathMeasure& second,
                                      const Site& offset, std::size_t horizon_first,
                                      std::size_t horizon_second, std::uint64_t trials,
                                      std::uint64_t seed, unsigned workers = 1);

/// Largest empirical P(gamma_k = v | <gamma_k, e> = layer) over layers with at
/// least `min_layer_count` samples, with the Wilson interval of that layer.
/// Bounds: 3 N^{-3/2} for M2 with N = floor(k/6) (k >= 6) and
/// 100 n^{-1.13} for M3 with n = floor(k/4) (k >= 4); vacuous otherwise.
struct LayerMass {
  BoundedEstimate result;
  std::int64_t layer = 0;
  std::uint64_t layer_count = 0;
};

LayerMass conditional_layer_mass(const PathMeasure& measure, std::size_t k,
                                 std::uint64_t trials, std::uint64_t seed,
                                 std::uint64_t min_layer_count = 100, unsigned workers = 1);

/// Paths as CSV rows "step,x1,...,xd".
std::string path_csv(const PathSample& path);

}  // namespace lrtrunc
