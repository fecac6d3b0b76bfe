#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "lrtrunc/overlap.hpp"

using namespace lrtrunc;

namespace {

Kernel axes_kernel(double p) {
  std::map<Site, double> e{{{1, 0}, p}, {{-1, 0}, p}, {{0, 1}, p}, {{0, -1}, p}};
  return Kernel::table(2, e, SymmetryClass::SignedPermutation);
}

// Independent oracle: E[ov] straight from the definition and P(some path
// open) by inclusion-exclusion over path subsets.
std::pair<mpq_class, mpq_class> oracle(const BruteForceInstance& inst) {
  const auto P = inst.paths.size();
  mpq_class ov = 0;
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t b = 0; b < P; ++b) {
      std::set<std::size_t> sa(inst.paths[a].begin(), inst.paths[a].end());
      mpq_class f = inst.weights[a] * inst.weights[b];
      std::set<std::size_t> shared;
      for (auto e : inst.paths[b])
        if (sa.count(e)) shared.insert(e);
      for (auto e : shared) f /= inst.edge_probability[e];
      ov += f;
    }
  mpq_class reach = 0;
  for (std::uint64_t mask = 1; mask < (1ull << P); ++mask) {
    std::set<std::size_t> edges;
    int bits = 0;
    for (std::size_t i = 0; i < P; ++i)
      if (mask >> i & 1) {
        ++bits;
        edges.insert(inst.paths[i].begin(), inst.paths[i].end());
      }
    mpq_class pr = 1;
    for (auto e : edges) pr *= inst.edge_probability[e];
    reach += (bits % 2 ? 1 : -1) * pr;
  }
  return {ov, reach};
}

}  // namespace

TEST_CASE("weighted overlap examples") {
  const Kernel k = axes_kernel(0.5);
  const std::vector<Site> path{{0, 0}, {1, 0}, {1, 1}, {2, 1}};
  const auto full = weighted_overlap(path, path, k);
  CHECK(full.shared_edge_count == 3);
  CHECK(full.log_value == doctest::Approx(3 * std::log(2.0)));
  CHECK(full.value() == doctest::Approx(8.0));

  // Crossing at (1,0) without sharing an edge.
  const std::vector<Site> a{{0, 0}, {1, 0}, {2, 0}};
  const std::vector<Site> b{{1, -1}, {1, 0}, {1, 1}};
  CHECK(weighted_overlap(a, b, k).log_value == 0.0);
  CHECK(weighted_overlap(a, b, k).shared_edge_count == 0);

  // Same edge in opposite directions, counted once.
  const std::vector<Site> fwd{{0, 0}, {1, 0}, {1, 1}};
  const std::vector<Site> back{{2, 0}, {1, 0}, {0, 0}, {0, -1}};
  const auto o = weighted_overlap(fwd, back, k);
  CHECK(o.shared_edge_count == 1);
  CHECK(o.log_value == doctest::Approx(std::log(2.0)));

  // A shared edge of probability zero.
  const std::vector<Site> diag{{0, 0}, {1, 1}};
  const auto inf = weighted_overlap(diag, diag, k);
  CHECK(inf.infinite);
  CHECK(std::isinf(inf.value()));
}

TEST_CASE("overlap symmetry and prefix monotonicity") {
  const auto m = PathMeasure::m2(build_m2(Kernel::flat_box(4, 0.1, 1)));
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto g = m.sample(30, 2 * s), f = m.sample(30, 2 * s + 1);
    CHECK(weighted_overlap(g, f, m.kernel()).log_value ==
          weighted_overlap(f, g, m.kernel()).log_value);
    double prev = 0.0;
    for (std::size_t n = 1; n <= 30; ++n) {
      std::vector<Site> gp(g.vertices.begin(), g.vertices.begin() + n + 1);
      std::vector<Site> fp(f.vertices.begin(), f.vertices.begin() + n + 1);
      const double v = weighted_overlap(gp, fp, m.kernel()).log_value;
      CHECK(v >= prev);
      CHECK(v >= 0.0);
      prev = v;
    }
  }
}

TEST_CASE("expected overlap of deterministic measures") {
  const double p = 0.3;
  const Kernel k = axes_kernel(p);
  const auto east = PathMeasure::directed(k, 0);
  const auto north = PathMeasure::directed(k, 1);
  const auto apart = estimate_expected_overlap(east, north, 10, 20, 1);
  CHECK(apart.estimate == 1.0);
  const auto same = estimate_expected_overlap(east, east, 6, 20, 1);
  CHECK(same.estimate == doctest::Approx(std::pow(p, -6)).epsilon(1e-12));
  const auto curve = overlap_curve(east, east, {1, 2, 4}, 10, 1);
  REQUIRE(curve.size() == 3);
  CHECK(curve[2].estimate.estimate == doctest::Approx(std::pow(p, -4)));
  CHECK(curve[2].running_max == doctest::Approx(std::pow(p, -4)));
  CHECK(curve[2].implied_lower_bound == doctest::Approx(std::pow(p, 4)));
}

TEST_CASE("expected overlap is worker-independent") {
  const auto m = PathMeasure::m2(build_m2(Kernel::flat_box(4, 0.05, 2)));
  const auto a = overlap_curve(m, m, {12, 24}, 500, 3, 1);
  const auto b = overlap_curve(m, m, {12, 24}, 500, 3, 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].estimate.estimate == b[i].estimate.estimate);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].running_max >= a[i - 1].running_max);
}

TEST_CASE("percolation lower bound") {
  CHECK(percolation_lower_bound(1.0) == 1.0);
  CHECK(percolation_lower_bound(1.5) == doctest::Approx(2.0 / 3));
  CHECK(percolation_lower_bound(1.5) > 1 - std::exp(-1.0));
  CHECK(percolation_lower_bound(2.0) == 0.5);
  CHECK_THROWS_AS(percolation_lower_bound(0.9), std::invalid_argument);
}

TEST_CASE("brute-force Paley-Zygmund examples") {
  BruteForceInstance two;
  two.edge_probability = {mpq_class(1, 2), mpq_class(1, 2)};
  two.paths = {{0}, {1}};
  two.weights = {mpq_class(1, 2), mpq_class(1, 2)};
  const auto r = brute_force_paley_zygmund(two);
  CHECK(r.mean_z == 1);
  CHECK(r.mean_ov == mpq_class(3, 2));
  CHECK(r.p_reach == mpq_class(3, 4));
  CHECK(r.chain_holds());

  BruteForceInstance one;
  one.edge_probability = {mpq_class(2, 7)};
  one.paths = {{0}};
  one.weights = {1};
  const auto e = brute_force_paley_zygmund(one);
  CHECK(e.p_reach == mpq_class(2, 7));
  CHECK(e.p_reach * e.mean_ov == 1);
  CHECK(e.lower_bound_holds);
}

TEST_CASE("brute-force chain on random instances") {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const std::size_t E = 1 + rng.below(12), P = 1 + rng.below(4);
    std::vector<double> probs(E), weights(P);
    for (auto& p : probs) p = 0.1 + 0.8 * rng.uniform();
    std::vector<std::vector<std::size_t>> paths(P);
    for (auto& path : paths) {
      for (std::size_t e = 0; e < E; ++e)
        if (rng.coin()) path.push_back(e);
      if (path.empty()) path.push_back(rng.below(E));
    }
    for (auto& w : weights) w = 0.05 + rng.uniform();
    const auto inst = BruteForceInstance::from_doubles(probs, paths, weights);
    mpq_class total = 0;
    for (const auto& w : inst.weights) total += w;
    CHECK(total == 1);
    const auto r = brute_force_paley_zygmund(inst);
    const auto [ov, reach] = oracle(inst);
    CHECK(r.mean_z == 1);
    CHECK(r.mean_ov == ov);
    CHECK(r.mean_z2 == ov);
    CHECK(r.p_reach == reach);
    CHECK(r.p_reach * ov >= 1);
    CHECK(r.chain_holds());
  }
}

TEST_CASE("cutset sizes") {
  for (std::int64_t K : {1, 2}) {
    const Kernel k = Kernel::flat_box(2, 0.1, K);
    for (std::uint64_t n = 1; n <= 3; ++n) {
      const std::int64_t lo = 3 * std::int64_t(n) * K, hi = lo + 3 * K;
      auto inside = [&](const Site& x) { return linf_norm(x) > lo && linf_norm(x) <= hi; };
      std::uint64_t count = 0;
      for_each_in_cube(2, hi, [&](const Site& x) {
        if (!inside(x)) return;
        for_each_in_cube(2, K, [&](const Site& d) {
          if (is_zero(d) || !in_positive_half_space(d)) return;
          if (inside(add(x, d))) ++count;
        });
      });
      CHECK(cutset_size(k, n) == count);
    }
  }
  const auto sums = cutset_harmonic_sums(Kernel::flat_box(2, 0.1, 1), 10000);
  CHECK(sums.size() == 10000);
  // |E_n| grows linearly, so the partial sums gain a constant per decade.
  const double d1 = sums[999] - sums[99], d2 = sums[9999] - sums[999];
  CHECK(d1 > 0.0);
  CHECK(d2 == doctest::Approx(d1).epsilon(0.01));
}

TEST_CASE("cutset chain check") {
  std::map<Site, double> e{{{1, 0}, 0.4}, {{-1, 0}, 0.4}};
  const Kernel line = Kernel::table(2, e, SymmetryClass::Mirror);
  const auto det = PathMeasure::directed(line, 0);
  const auto rep = cutset_chain_check(det, line, {1, 2, 3}, 10, 1);
  for (const auto& row : rep.rows) {
    CHECK(row.traversals.estimate >= 1.0);
    CHECK(row.crossing_fraction == 1.0);
  }
  CHECK(rep.q == doctest::Approx(0.4));

  const Kernel box = Kernel::flat_box(2, 0.1, 2);
  const auto walk = PathMeasure::directed(box, 0);
  const auto r = cutset_chain_check(walk, box, {1, 2, 4}, 2000, 5);
  for (const auto& row : r.rows) {
    CHECK(row.traversals.estimate >= 1.0 - 5 * row.traversals.half_width() / 1.96);
    CHECK(row.sum_b_squared >= 1.0 / row.size - 1e-3);
  }
  CHECK(r.jensen_bound >= 1.0);
  CHECK_THROWS_AS(cutset_chain_check(PathMeasure::m3(build_m3(Kernel::flat_box(3, 0.1, 1))),
                                     Kernel::flat_box(3, 0.1, 1), {1}, 10, 1),
                  std::invalid_argument);
}
