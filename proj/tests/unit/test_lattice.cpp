#include <doctest.h>

#include <set>

#include "lrtrunc/estimate.hpp"
#include "lrtrunc/lattice.hpp"
#include "lrtrunc/parallel.hpp"
#include "lrtrunc/rng.hpp"

using namespace lrtrunc;

TEST_CASE("norms and radius tests") {
  const Site x{3, -4, 0};
  CHECK(linf_norm(x) == 4);
  CHECK(l1_norm(x) == 7);
  CHECK(l2_norm(x) == doctest::Approx(5.0));
  CHECK(within_radius(x, 5, Norm::L2));
  CHECK_FALSE(within_radius(x, 4, Norm::L2));
  CHECK(within_radius(x, 4, Norm::LInf));
  CHECK_FALSE(within_radius(x, 6, Norm::L1));
  CHECK(parse_norm("linf") == Norm::LInf);
  CHECK_THROWS_AS(parse_norm("l7"), std::invalid_argument);
}

TEST_CASE("cube enumeration visits every point once in lexicographic order") {
  std::vector<Site> seen;
  for_each_in_cube(3, 2, [&](const Site& s) { seen.push_back(s); });
  CHECK(seen.size() == 125);
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(std::set<Site>(seen.begin(), seen.end()).size() == 125);
}

TEST_CASE("half space and edges") {
  CHECK(in_positive_half_space({0, 1, -5}));
  CHECK_FALSE(in_positive_half_space({0, -1, 5}));
  CHECK_FALSE(in_positive_half_space({0, 0}));
  Edge e({1, 0}, {0, 0});
  CHECK(e.a == Site{0, 0});
  CHECK(e == Edge({0, 0}, {1, 0}));
  CHECK(EdgeHash{}(e) == EdgeHash{}(Edge({0, 0}, {1, 0})));
}

TEST_CASE("derived seeds are distinct and deterministic") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(derive_seed(1, i));
  CHECK(seeds.size() == 10000);
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("bounded integers are uniform") {
  Rng rng(11);
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(6)];
  for (int c : counts) CHECK(std::abs(c - n / 6) < 5 * std::sqrt(n / 6.0));
}

TEST_CASE("Wilson interval contains the estimate and stays in [0,1]") {
  for (std::uint64_t s : {0u, 1u, 50u, 99u, 100u}) {
    const auto e = wilson_estimate(s, 100, 0);
    CHECK(e.ci_low <= e.estimate);
    CHECK(e.estimate <= e.ci_high);
    CHECK(e.ci_low >= 0.0);
    CHECK(e.ci_high <= 1.0);
  }
  // Textbook value: 50/100 -> [0.4038, 0.5962].
  const auto h = wilson_estimate(50, 100, 0);
  CHECK(h.ci_low == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(h.ci_high == doctest::Approx(0.59617).epsilon(1e-4));
}

TEST_CASE("parallel_for covers every index and rethrows") {
  for (unsigned w : {1u, 2u, 4u}) {
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), w, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
