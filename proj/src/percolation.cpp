#include "lrtrunc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lrtrunc/parallel.hpp"

namespace lrtrunc {

BoxRegion::BoxRegion(std::size_t dim, std::int64_t half_side, std::int64_t shell_width)
    : dim_(dim), half_side_(half_side), shell_width_(shell_width) {
  if (dim == 0) throw std::invalid_argument("region dimension must be positive");
  if (half_side < 1) throw std::invalid_argument("region half-side must be >= 1");
  if (shell_width < 1 || shell_width > half_side)
    throw std::invalid_argument("boundary shell width must lie in [1, L]");
  side_ = static_cast<std::uint64_t>(2 * half_side + 1);
  stride_.assign(dim, 1);
  vertex_count_ = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (vertex_count_ > (UINT64_MAX / side_)) throw ResourceLimitError("region too large");
    vertex_count_ *= side_;
  }
  for (std::size_t i = dim; i-- > 1;) stride_[i - 1] = stride_[i] * side_;
  origin_ = index_of(Site(dim, 0));
}

bool BoxRegion::contains(const Site& x) const {
  if (x.size() != dim_) return false;
  return std::all_of(x.begin(), x.end(),
                     [&](auto c) { return c >= -half_side_ && c <= half_side_; });
}

std::uint64_t BoxRegion::index_of(const Site& x) const {
  if (!contains(x)) throw std::out_of_range("vertex " + format_site(x) + " outside region");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i)
    idx += static_cast<std::uint64_t>(x[i] + half_side_) * stride_[i];
  return idx;
}

Site BoxRegion::site_of(std::uint64_t index) const {
  if (index >= vertex_count_) throw std::out_of_range("vertex index outside region");
  Site x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    x[i] = static_cast<std::int64_t>(index / stride_[i]) - half_side_;
    index %= stride_[i];
  }
  return x;
}

bool BoxRegion::in_shell(const Site& x) const {
  return linf_norm(x) > half_side_ - shell_width_;
}

std::vector<std::uint64_t> BoxRegion::shell_indices() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < vertex_count_; ++i) {
    if (in_shell(site_of(i))) out.push_back(i);
  }
  return out;
}

std::int64_t BoxRegion::offset_of(const Site& d) const {
  std::int64_t off = 0;
  for (std::size_t i = 0; i < dim_; ++i) off += d[i] * static_cast<std::int64_t>(stride_[i]);
  return off;
}

namespace {

struct DisplacementClass {
  Site delta;
  double p;
  double log1m_p;
  std::int64_t offset;
  std::uint64_t translates;
  std::vector<std::uint64_t> extent;  // per axis: 2L + 1 - |delta_i|
  std::uint64_t base_index;           // index of the lexicographically first translate
  std::int64_t linf;
};

/// Every displacement class with p > 0 in the positive half-space, in a fixed order.
std::vector<DisplacementClass> edge_plan(const Kernel& kernel, const BoxRegion& region) {
  if (kernel.dimension() != region.dimension())
    throw std::invalid_argument("kernel dimension does not match region dimension");
  const auto d = region.dimension();
  const auto L = region.half_side();
  std::int64_t reach = 2 * L;
  if (auto r = kernel.support_radius()) reach = std::min(reach, *r);
  std::vector<DisplacementClass> plan;
  for_each_in_cube(d, reach, [&](const Site& delta) {
    if (!in_positive_half_space(delta)) return;
    const double p = kernel.prob_at(delta);
    if (p <= 0.0) return;
    DisplacementClass c;
    c.delta = delta;
    c.p = p;
    c.log1m_p = std::log1p(-p);
    c.offset = region.offset_of(delta);
    c.translates = 1;
    Site first(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto e = static_cast<std::uint64_t>(2 * L + 1 - std::abs(delta[i]));
      c.extent.push_back(e);
      c.translates *= e;
      first[i] = -L + std::max<std::int64_t>(0, -delta[i]);
    }
    if (c.translates == 0) return;
    c.base_index = region.index_of(first);
    c.linf = linf_norm(delta);
    plan.push_back(std::move(c));
  });
  return plan;
}

/// Streams open edges as (a, b, class index) for one configuration.
template <class Emit>
void stream_edges(const std::vector<DisplacementClass>& plan, const BoxRegion& region,
                  Rng& rng, Emit&& emit) {
  const auto d = region.dimension();
  const auto side = static_cast<std::uint64_t>(2 * region.half_side() + 1);
  std::vector<std::uint64_t> stride(d, 1);
  for (std::size_t i = d; i-- > 1;) stride[i - 1] = stride[i] * side;
  for (std::size_t ci = 0; ci < plan.size(); ++ci) {
    const auto& c = plan[ci];
    const bool certain = c.log1m_p == -INFINITY;
    std::uint64_t t = 0;
    bool first = true;
    while (true) {
      const std::uint64_t skip = certain ? 0 : rng.geometric_skip(c.log1m_p);
      if (first) {
        t = skip;
        first = false;
      } else {
        if (skip >= c.translates) break;
        t += skip + 1;
      }
      if (t >= c.translates) break;
      std::uint64_t rem = t;
      std::uint64_t idx = c.base_index;
      for (std::size_t i = d; i-- > 0;) {
        idx += (rem % c.extent[i]) * stride[i];
        rem /= c.extent[i];
      }
      const auto a = static_cast<std::uint32_t>(idx);
      const auto b = static_cast<std::uint32_t>(static_cast<std::int64_t>(idx) + c.offset);
      emit(a, b, ci);
    }
  }
}

void check_cap(const BoxRegion& region, std::uint64_t cap) {
  if (region.vertex_count() > cap)
    throw ResourceLimitError("region has " + std::to_string(region.vertex_count()) +
                             " vertices, above the cap of " + std::to_string(cap));
  if (region.vertex_count() > UINT32_MAX) throw ResourceLimitError("region too large");
}

}  // namespace

std::string Configuration::dump() const {
  std::vector<std::pair<Site, Site>> rows;
  rows.reserve(open_edges.size());
  for (auto [a, b] : open_edges) {
    Site x = region.site_of(a);
    Site y = region.site_of(b);
    if (y < x) std::swap(x, y);
    rows.emplace_back(std::move(x), std::move(y));
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream os;
  for (const auto& [x, y] : rows) os << format_site(x) << ' ' << format_site(y) << '\n';
  return os.str();
}

Configuration sample_configuration(const Kernel& kernel, const BoxRegion& region,
                                   std::uint64_t seed, std::uint64_t vertex_cap) {
  check_cap(region, vertex_cap);
  const auto plan = edge_plan(kernel, region);
  Configuration config{region, {}, seed};
  Rng rng(seed);
  stream_edges(plan, region, rng, [&](std::uint32_t a, std::uint32_t b, std::size_t) {
    config.open_edges.emplace_back(a, b);
  });
  return config;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), 0u);
}

std::uint32_t DisjointSets::find(std::uint32_t v) {
  while (parent_[v] != v) {
    parent_[v] = parent_[parent_[v]];
    v = parent_[v];
  }
  return v;
}

bool DisjointSets::unite(std::uint32_t a, std::uint32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

ClusterForest::ClusterForest(const Configuration& config)
    : region_(config.region), sets_(config.region.vertex_count()) {
  for (auto [a, b] : config.open_edges) sets_.unite(a, b);
}

std::uint64_t ClusterForest::cluster_size(const Site& v) {
  return sets_.size_of(static_cast<std::uint32_t>(region_.index_of(v)));
}

bool ClusterForest::same_cluster(const Site& x, const Site& y) {
  const auto a = static_cast<std::uint32_t>(region_.index_of(x));
  const auto b = static_cast<std::uint32_t>(region_.index_of(y));
  return sets_.find(a) == sets_.find(b);
}

std::vector<std::uint64_t> ClusterForest::cluster_of(const Site& v) {
  const auto root = sets_.find(static_cast<std::uint32_t>(region_.index_of(v)));
  std::vector<std::uint64_t> out;
  for (std::uint32_t i = 0; i < sets_.element_count(); ++i) {
    if (sets_.find(i) == root) out.push_back(i);
  }
  return out;
}

bool ClusterForest::reaches_shell(const Site& v) {
  const auto root = sets_.find(static_cast<std::uint32_t>(region_.index_of(v)));
  for (auto i : region_.shell_indices()) {
    if (sets_.find(static_cast<std::uint32_t>(i)) == root) return true;
  }
  return false;
}

ClusterForest clusters(const Configuration& config) { return ClusterForest(config); }

ReachEstimate estimate_reach(const Kernel& kernel, const BoxRegion& region,
                             std::uint64_t trials, std::uint64_t seed, unsigned workers,
                             std::uint64_t vertex_cap) {
  if (trials < 1) throw std::invalid_argument("estimate_reach needs at least one trial");
  check_cap(region, vertex_cap);
  const auto plan = edge_plan(kernel, region);
  const auto shell = region.shell_indices();
  const auto origin = static_cast<std::uint32_t>(region.origin_index());
  std::vector<char> hit(trials, 0);
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    DisjointSets sets(region.vertex_count());
    stream_edges(plan, region, rng,
                 [&](std::uint32_t a, std::uint32_t b, std::size_t) { sets.unite(a, b); });
    const auto root = sets.find(origin);
    for (auto v : shell) {
      if (sets.find(static_cast<std::uint32_t>(v)) == root) {
        hit[t] = 1;
        break;
      }
    }
  });
  const auto successes = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
  return wilson_estimate(successes, trials, seed);
}

TruncationCurve truncation_curve(const Kernel& kernel, const BoxRegion& region,
                                 std::vector<std::int64_t> radii, std::uint64_t trials,
                                 std::uint64_t seed, unsigned workers, Norm norm,
                                 std::uint64_t vertex_cap) {
  if (radii.empty()) throw std::invalid_argument("truncation curve needs at least one radius");
  if (trials < 1) throw std::invalid_argument("truncation curve needs at least one trial");
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  check_cap(region, vertex_cap);
  const Kernel widest = kernel.truncated(radii.back(), norm);
  const auto plan = edge_plan(widest, region);
  // For every class, the first radius at which it is admitted.
  std::vector<std::size_t> first_radius(plan.size());
  for (std::size_t ci = 0; ci < plan.size(); ++ci) {
    std::size_t j = 0;
    while (!within_radius(plan[ci].delta, radii[j], norm)) ++j;
    first_radius[ci] = j;
  }
  const auto shell = region.shell_indices();
  const auto origin = static_cast<std::uint32_t>(region.origin_index());
  const std::size_t R = radii.size();
  std::vector<std::vector<char>> hit(R, std::vector<char>(trials, 0));
  std::vector<char> violated(trials, 0);
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<DisjointSets> sets(R, DisjointSets(region.vertex_count()));
    stream_edges(plan, region, rng, [&](std::uint32_t a, std::uint32_t b, std::size_t ci) {
      for (std::size_t j = first_radius[ci]; j < R; ++j) sets[j].unite(a, b);
    });
    for (std::size_t j = 0; j < R; ++j) {
      const auto root = sets[j].find(origin);
      for (auto v : shell) {
        if (sets[j].find(static_cast<std::uint32_t>(v)) == root) {
          hit[j][t] = 1;
          break;
        }
      }
    }
    for (std::size_t j = 0; j + 1 < R; ++j) {
      const auto root = sets[j].find(origin);
      const auto wider = sets[j + 1].find(origin);
      for (std::uint32_t v = 0; v < region.vertex_count(); ++v) {
        if (sets[j].find(v) == root && sets[j + 1].find(v) != wider) {
          violated[t] = 1;
          break;
        }
      }
    }
  });
  TruncationCurve curve;
  curve.radii = radii;
  curve.trials = trials;
  for (std::size_t j = 0; j < R; ++j) {
    const auto s = static_cast<std::uint64_t>(std::count(hit[j].begin(), hit[j].end(), 1));
    curve.estimates.push_back(wilson_estimate(s, trials, seed));
  }
  curve.containment_violations =
      static_cast<std::uint64_t>(std::count(violated.begin(), violated.end(), 1));
  return curve;
}

namespace {

struct InternalEdge {
  std::uint32_t a;
  std::uint32_t b;
  double p;
};

}  // namespace

PhiValue phi_functional(const Kernel& kernel, const std::vector<Site>& region_set,
                        PhiMode mode, std::int64_t radius, std::uint64_t trials,
                        std::uint64_t seed) {
  const auto d = kernel.dimension();
  if (radius < 1) throw std::invalid_argument("phi radius must be >= 1");
  std::unordered_map<Site, std::uint32_t, SiteHash> index;
  index.reserve(region_set.size() * 2);
  for (const auto& x : region_set) {
    if (x.size() != d) throw std::invalid_argument("set element has wrong dimension");
    index.emplace(x, static_cast<std::uint32_t>(index.size()));
  }
  std::vector<Site> points(index.size());
  for (const auto& [x, i] : index) points[i] = x;
  const auto origin_it = index.find(Site(d, 0));
  if (origin_it == index.end()) throw std::invalid_argument("phi set must contain the origin");
  const std::uint32_t origin = origin_it->second;

  // Displacements with p > 0 within the outer radius.
  std::int64_t reach = radius;
  if (auto r = kernel.support_radius()) reach = std::min(reach, *r);
  std::vector<std::pair<Site, double>> steps;
  for_each_in_cube(d, reach, [&](const Site& delta) {
    if (is_zero(delta)) return;
    const double p = kernel.prob_at(delta);
    if (p > 0.0) steps.emplace_back(delta, p);
  });

  // Outgoing weight w_x = sum_{y not in S} p_{x-y}, and the internal edges.
  std::vector<double> weight(points.size(), 0.0);
  std::vector<InternalEdge> edges;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    for (const auto& [delta, p] : steps) {
      const Site y = add(points[i], delta);
      auto it = index.find(y);
      if (it == index.end()) {
        weight[i] += p;
      } else if (in_positive_half_space(delta)) {
        edges.push_back({i, it->second, p});
      }
    }
  }

  PhiValue out;
  out.internal_edges = edges.size();
  const auto n = static_cast<std::uint32_t>(points.size());

  if (mode == PhiMode::Exact) {
    if (edges.size() > kPhiExactEdgeLimit)
      throw ResourceLimitError("exact phi needs <= " + std::to_string(kPhiExactEdgeLimit) +
                               " internal edges, got " + std::to_string(edges.size()));
    std::vector<double> connect(n, 0.0);
    const std::uint64_t configs = 1ull << edges.size();
    for (std::uint64_t mask = 0; mask < configs; ++mask) {
      double w = 1.0;
      DisjointSets sets(n);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (mask >> e & 1u) {
          w *= edges[e].p;
          sets.unite(edges[e].a, edges[e].b);
        } else {
          w *= 1.0 - edges[e].p;
        }
      }
      if (w == 0.0) continue;
      const auto root = sets.find(origin);
      for (std::uint32_t v = 0; v < n; ++v) {
        if (sets.find(v) == root) connect[v] += w;
      }
    }
    for (std::uint32_t v = 0; v < n; ++v) {
      out.value += connect[v] * weight[v];
      out.expected_cluster += connect[v];
    }
    out.trials = configs;
    return out;
  }

  if (trials < 2) throw std::invalid_argument("Monte Carlo phi needs at least two trials");
  double sum = 0.0, sum_sq = 0.0, cluster_sum = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    DisjointSets sets(n);
    for (const auto& e : edges) {
      if (rng.uniform() < e.p) sets.unite(e.a, e.b);
    }
    const auto root = sets.find(origin);
    double f = 0.0;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (sets.find(v) == root) f += weight[v];
    }
    sum += f;
    sum_sq += f * f;
    cluster_sum += sets.size_of(origin);
  }
  const auto est = mean_estimate(sum, sum_sq, trials, seed);
  out.value = est.estimate;
  out.sigma = est.half_width() / kZ95;
  out.expected_cluster = cluster_sum / static_cast<double>(trials);
  out.trials = trials;
  return out;
}

}  // namespace lrtrunc
