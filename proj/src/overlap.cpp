#include "lrtrunc/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "lrtrunc/parallel.hpp"

namespace lrtrunc {

double OverlapValue::value() const {
  return infinite ? std::numeric_limits<double>::infinity() : std::exp(log_value);
}

namespace {

// Shared unordered edges of the two paths with, for each, the first horizon
// at which both prefixes contain it.
struct SharedEdge {
  std::size_t horizon;
  double p;
};

std::vector<SharedEdge> shared_edges(const std::vector<Site>& a, const std::vector<Site>& b,
                                     const Kernel& kernel) {
  std::unordered_map<Edge, std::size_t, EdgeHash> first;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    if (a[k] == a[k + 1]) continue;
    first.emplace(Edge(a[k], a[k + 1]), k + 1);
  }
  std::vector<SharedEdge> out;
  std::unordered_set<Edge, EdgeHash> counted;
  for (std::size_t n = 0; n + 1 < b.size(); ++n) {
    if (b[n] == b[n + 1]) continue;
    Edge e(b[n], b[n + 1]);
    auto it = first.find(e);
    if (it == first.end() || !counted.insert(e).second) continue;
    out.push_back({std::max(it->second, n + 1), kernel.prob_at(subtract(e.b, e.a))});
  }
  return out;
}

}  // namespace

OverlapValue weighted_overlap(const std::vector<Site>& first, const std::vector<Site>& second,
                              const Kernel& kernel) {
  OverlapValue ov;
  for (const auto& e : shared_edges(first, second, kernel)) {
    ++ov.shared_edge_count;
    if (e.p <= 0.0) {
      ov.infinite = true;
    } else {
      ov.log_value -= std::log(e.p);
    }
  }
  return ov;
}

OverlapValue weighted_overlap(const PathSample& first, const PathSample& second,
                              const Kernel& kernel) {
  return weighted_overlap(first.vertices, second.vertices, kernel);
}

std::vector<OverlapPoint> overlap_curve(const PathMeasure& first, const PathMeasure& second,
                                        std::vector<std::size_t> horizons, std::uint64_t trials,
                                        std::uint64_t seed, unsigned workers) {
  if (trials < 2) throw std::invalid_argument("overlap estimation needs trials >= 2");
  if (horizons.empty()) throw std::invalid_argument("overlap estimation needs a horizon");
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
  const std::size_t top = horizons.back();
  const std::size_t H = horizons.size();
  const Kernel& kernel = first.kernel();
  std::vector<double> values(trials * H, 0.0);
  std::vector<char> infinite(trials, 0);
  parallel_for(trials, workers, [&](std::size_t t) {
    const auto gamma = first.sample(top, derive_seed(seed, 2 * t));
    const auto phi = second.sample(top, derive_seed(seed, 2 * t + 1));
    auto shared = shared_edges(gamma.vertices, phi.vertices, kernel);
    std::sort(shared.begin(), shared.end(),
              [](const auto& x, const auto& y) { return x.horizon < y.horizon; });
    double log_ov = 0.0;
    std::size_t next = 0;
    for (std::size_t h = 0; h < H; ++h) {
      while (next < shared.size() && shared[next].horizon <= horizons[h]) {
        if (shared[next].p <= 0.0) infinite[t] = 1;
        else log_ov -= std::log(shared[next].p);
        ++next;
      }
      values[t * H + h] = std::exp(log_ov);
    }
  });
  if (auto it = std::find(infinite.begin(), infinite.end(), 1); it != infinite.end())
    throw std::runtime_error("infinite overlap in trial " +
                             std::to_string(it - infinite.begin()) +
                             ": a shared edge has probability 0");
  std::vector<OverlapPoint> out;
  double running = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const double v = values[t * H + h];
      sum += v;
      sum_sq += v * v;
    }
    OverlapPoint p;
    p.horizon = horizons[h];
    p.estimate = mean_estimate(sum, sum_sq, trials, seed);
    running = std::max(running, p.estimate.estimate);
    p.running_max = running;
    p.implied_lower_bound = 1.0 / running;
    out.push_back(p);
  }
  return out;
}

EstimateWithCI estimate_expected_overlap(const PathMeasure& first, const PathMeasure& second,
                                         std::size_t horizon, std::uint64_t trials,
                                         std::uint64_t seed, unsigned workers) {
  return overlap_curve(first, second, {horizon}, trials, seed, workers).front().estimate;
}

double percolation_lower_bound(double expected_overlap) {
  if (!(expected_overlap >= 1.0))
    throw std::invalid_argument("expected overlap must be >= 1");
  return 1.0 / expected_overlap;
}

BruteForceInstance BruteForceInstance::from_doubles(
    const std::vector<double>& probabilities, std::vector<std::vector<std::size_t>> paths,
    const std::vector<double>& weights) {
  BruteForceInstance inst;
  for (double p : probabilities) inst.edge_probability.emplace_back(p);
  inst.paths = std::move(paths);
  mpq_class total = 0;
  for (double w : weights) {
    inst.weights.emplace_back(w);
    total += inst.weights.back();
  }
  if (total <= 0) throw std::invalid_argument("path weights must have a positive sum");
  for (auto& w : inst.weights) {
    w /= total;
    w.canonicalize();
  }
  return inst;
}

PaleyZygmundReport brute_force_paley_zygmund(const BruteForceInstance& inst) {
  const std::size_t m = inst.edge_probability.size();
  if (m > kBruteForceEdgeLimit)
    throw std::length_error("brute force is limited to " + std::to_string(kBruteForceEdgeLimit) +
                            " edges");
  if (inst.paths.size() != inst.weights.size() || inst.paths.empty())
    throw std::invalid_argument("need one weight per path and at least one path");
  mpq_class weight_sum = 0;
  for (const auto& w : inst.weights) {
    if (w < 0) throw std::invalid_argument("path weights must be nonnegative");
    weight_sum += w;
  }
  if (weight_sum != 1) throw std::invalid_argument("path weights must sum to 1");
  for (const auto& p : inst.edge_probability) {
    if (p <= 0 || p > 1) throw std::invalid_argument("edge probabilities must lie in (0, 1]");
  }
  std::vector<std::uint32_t> masks;
  std::vector<mpq_class> inverse_open;  // 1 / P(path open)
  for (const auto& path : inst.paths) {
    std::uint32_t mask = 0;
    mpq_class prob = 1;
    for (auto e : path) {
      if (e >= m) throw std::invalid_argument("path refers to an unknown edge");
      if (mask >> e & 1u) throw std::invalid_argument("path repeats an edge");
      mask |= 1u << e;
      prob *= inst.edge_probability[e];
    }
    masks.push_back(mask);
    inverse_open.push_back(1 / prob);
  }

  PaleyZygmundReport r;
  r.p_reach = 0;
  r.mean_z = 0;
  r.mean_z2 = 0;
  const std::uint64_t configs = 1ull << m;
  for (std::uint64_t omega = 0; omega < configs; ++omega) {
    mpq_class prob = 1;
    for (std::size_t e = 0; e < m; ++e)
      prob *= (omega >> e & 1u) ? inst.edge_probability[e] : 1 - inst.edge_probability[e];
    if (prob == 0) continue;
    mpq_class z = 0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if ((omega & masks[i]) == masks[i]) z += inst.weights[i] * inverse_open[i];
    }
    r.mean_z += prob * z;
    r.mean_z2 += prob * z * z;
    if (z > 0) r.p_reach += prob;
  }
  r.mean_ov = 0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    for (std::size_t j = 0; j < masks.size(); ++j) {
      mpq_class ov = 1;
      const auto shared = masks[i] & masks[j];
      for (std::size_t e = 0; e < m; ++e) {
        if (shared >> e & 1u) ov /= inst.edge_probability[e];
      }
      r.mean_ov += inst.weights[i] * inst.weights[j] * ov;
    }
  }
  r.mean_is_one = r.mean_z == 1;
  r.second_moment_matches = r.mean_z2 == r.mean_ov;
  r.lower_bound_holds = r.p_reach * r.mean_ov >= 1;
  return r;
}

namespace {

std::int64_t interval_overlap(std::int64_t r1, std::int64_t r2, std::int64_t shift) {
  // |[-r1, r1] intersect [-r2 - shift, r2 - shift]|
  const auto lo = std::max(-r1, -r2 - shift);
  const auto hi = std::min(r1, r2 - shift);
  return std::max<std::int64_t>(0, hi - lo + 1);
}

std::int64_t box_pairs(std::size_t d, std::int64_t r1, std::int64_t r2, const Site& delta) {
  std::int64_t count = 1;
  for (std::size_t i = 0; i < d; ++i) count *= interval_overlap(r1, r2, delta[i]);
  return count;
}

std::int64_t kernel_range(const Kernel& kernel) {
  auto r = kernel.support_radius();
  if (!r) throw std::invalid_argument("cutsets need a bounded-range kernel");
  return *r;
}

std::vector<Site> potential_displacements(const Kernel& kernel, std::int64_t range) {
  std::vector<Site> out;
  for_each_in_cube(kernel.dimension(), range, [&](const Site& x) {
    if (in_positive_half_space(x) && kernel.prob_at(x) > 0.0) out.push_back(x);
  });
  return out;
}

std::uint64_t annulus_edges(std::size_t d, const std::vector<Site>& deltas, std::int64_t inner,
                            std::int64_t outer) {
  std::int64_t total = 0;
  for (const auto& delta : deltas) {
    total += box_pairs(d, outer, outer, delta) - box_pairs(d, outer, inner, delta) -
             box_pairs(d, inner, outer, delta) + box_pairs(d, inner, inner, delta);
  }
  return static_cast<std::uint64_t>(total);
}

}  // namespace

std::uint64_t cutset_size(const Kernel& kernel, std::uint64_t n) {
  const auto K = kernel_range(kernel);
  const auto deltas = potential_displacements(kernel, K);
  const auto inner = static_cast<std::int64_t>(3 * n) * K;
  return annulus_edges(kernel.dimension(), deltas, inner, inner + 3 * K);
}

std::vector<double> cutset_harmonic_sums(const Kernel& kernel, std::uint64_t n_max) {
  const auto K = kernel_range(kernel);
  const auto deltas = potential_displacements(kernel, K);
  std::vector<double> sums;
  double acc = 0.0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const auto inner = static_cast<std::int64_t>(3 * n) * K;
    const auto size = annulus_edges(kernel.dimension(), deltas, inner, inner + 3 * K);
    if (size > 0) acc += 1.0 / static_cast<double>(size);
    sums.push_back(acc);
  }
  return sums;
}

CutsetReport cutset_chain_check(const PathMeasure& measure, const Kernel& kernel,
                                const std::vector<std::uint64_t>& cutsets, std::uint64_t trials,
                                std::uint64_t seed, std::size_t path_steps) {
  if (kernel.dimension() != 2 || measure.dimension() != 2)
    throw std::invalid_argument("cutset checks need d = 2");
  if (cutsets.empty()) throw std::invalid_argument("cutset check needs at least one n");
  if (trials < 2) throw std::invalid_argument("cutset check needs trials >= 2");
  const auto K = kernel_range(kernel);
  const auto deltas = potential_displacements(kernel, K);
  const auto n_max = *std::max_element(cutsets.begin(), cutsets.end());
  if (path_steps == 0) path_steps = static_cast<std::size_t>(3 * (n_max + 1) * K + 1);

  CutsetReport report;
  for (const auto& delta : deltas) report.q = std::max(report.q, kernel.prob_at(delta));

  std::unordered_map<std::uint64_t, std::size_t> row_of;
  for (auto n : cutsets) {
    if (n == 0) throw std::invalid_argument("cutsets are indexed from n = 1");
    if (row_of.count(n)) continue;
    row_of[n] = report.rows.size();
    CutsetRow row;
    row.n = n;
    row.size = cutset_size(kernel, n);
    report.rows.push_back(row);
  }
  const std::size_t R = report.rows.size();
  std::vector<std::unordered_map<Edge, std::uint64_t, EdgeHash>> use(R);
  std::vector<double> sum(R, 0.0), sum_sq(R, 0.0), crossed(R, 0.0);
  auto annulus_of = [&](const Site& x) -> std::int64_t {
    const auto r = linf_norm(x);
    if (r == 0) return -1;
    return (r - 1) / (3 * K);  // 3nK < r <= 3(n+1)K
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto path = measure.sample(path_steps, derive_seed(seed, t));
    std::vector<double> per_path(R, 0.0);
    for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
      const auto na = annulus_of(path.vertices[k]);
      if (na < 1 || na != annulus_of(path.vertices[k + 1])) continue;
      auto it = row_of.find(static_cast<std::uint64_t>(na));
      if (it == row_of.end()) continue;
      ++use[it->second][Edge(path.vertices[k], path.vertices[k + 1])];
      per_path[it->second] += 1.0;
    }
    const auto far = linf_norm(path.vertices.back());
    for (std::size_t i = 0; i < R; ++i) {
      sum[i] += per_path[i];
      sum_sq[i] += per_path[i] * per_path[i];
      if (far > static_cast<std::int64_t>(3 * (report.rows[i].n + 1)) * K) crossed[i] += 1.0;
    }
  }
  const double T = static_cast<double>(trials);
  for (std::size_t i = 0; i < R; ++i) {
    auto& row = report.rows[i];
    row.traversals = mean_estimate(sum[i], sum_sq[i], trials, seed);
    double pairs = 0.0;
    for (const auto& [e, c] : use[i]) pairs += static_cast<double>(c) * static_cast<double>(c - 1);
    row.sum_b_squared = pairs / (T * (T - 1.0));
    row.crossing_fraction = crossed[i] / T;
    report.shared_edges += row.sum_b_squared;
    if (row.size > 0) report.harmonic_sum += 1.0 / static_cast<double>(row.size);
  }
  report.jensen_bound = std::pow(report.q, -report.shared_edges);
  return report;
}

}  // namespace lrtrunc
