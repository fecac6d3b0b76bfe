#include <doctest.h>

#include <functional>
#include <map>

#include "lrtrunc/treepaths.hpp"

using namespace lrtrunc;

namespace {

std::uint64_t pow3(unsigned n) {
  std::uint64_t p = 1;
  while (n--) p *= 3;
  return p;
}

// Level-N spins for an explicit assignment of the third-child bits, built
// top-down breadth first.
std::vector<int> spins_from_bits(unsigned level, std::uint64_t bits) {
  std::vector<int> cur{1};
  unsigned used = 0;
  for (unsigned l = 0; l < level; ++l) {
    std::vector<int> next;
    for (int s : cur) {
      next.push_back(s);
      next.push_back(s);
      next.push_back((bits >> used++ & 1) ? 1 : -1);
    }
    cur = std::move(next);
  }
  return cur;
}

// Law of Y_N by enumerating all (3^N - 1)/2 fresh bits.
std::map<std::int64_t, mpq_class> brute_levelsum(unsigned level) {
  const unsigned bits = static_cast<unsigned>((pow3(level) - 1) / 2);
  std::map<std::int64_t, mpq_class> law;
  const mpq_class w(1, mpz_class(1) << bits);
  for (std::uint64_t m = 0; m < (1ull << bits); ++m) {
    std::int64_t s = 0;
    for (int x : spins_from_bits(level, m)) s += x;
    law[s] += w;
  }
  return law;
}

// spins[3^{h+1} j] == spins[3^{h+1} j + 3^h] for every height h.
template <class Seq>
bool copy_structure(const Seq& spins) {
  for (std::uint64_t step = 1; step * 3 <= spins.size(); step *= 3)
    for (std::uint64_t j = 0; j < spins.size(); j += 3 * step)
      if (spins[j] != spins[j + step]) return false;
  return spins.empty() || spins[0] == 1;
}

}  // namespace

TEST_CASE("sampled levels") {
  CHECK(sample_level(0, 1).spins == std::vector<std::int8_t>{1});
  bool saw_minus = false, saw_plus = false;
  for (std::uint64_t s = 0; s < 64; ++s) {
    const auto l1 = sample_level(1, s);
    CHECK(l1.spins[0] == 1);
    CHECK(l1.spins[1] == 1);
    (l1.spins[2] == 1 ? saw_plus : saw_minus) = true;
    const auto l = sample_level(6, s);
    CHECK(l.spins.size() == 729);
    CHECK(copy_structure(l.spins));
    // Sibling triples: the first two children copy the parent.
    const auto parent = sample_level(5, s);
    (void)parent;
    for (std::size_t j = 0; j < l.spins.size(); j += 3) CHECK(l.spins[j] == l.spins[j + 1]);
  }
  CHECK(saw_plus);
  CHECK(saw_minus);
  CHECK(sample_level(7, 5).spins == sample_level(7, 5).spins);
  CHECK_THROWS_AS(sample_level(14, 1), std::length_error);
}

TEST_CASE("exact level sums: examples") {
  const auto d0 = exact_levelsum(0);
  CHECK(d0.support == std::vector<std::int64_t>{1});
  CHECK(d0.exact_probability(0) == 1);
  const auto d1 = exact_levelsum(1);
  CHECK(d1.support == std::vector<std::int64_t>{1, 3});
  CHECK(d1.exact_probability(0) == mpq_class(1, 2));
  CHECK(d1.exact_probability(1) == mpq_class(1, 2));
  const auto d2 = exact_levelsum(2);
  const std::map<std::int64_t, mpq_class> want{{9, mpq_class(1, 16)}, {7, mpq_class(3, 16)},
                                               {5, mpq_class(1, 4)},  {3, mpq_class(1, 4)},
                                               {1, mpq_class(3, 16)}, {-1, mpq_class(1, 16)}};
  REQUIRE(d2.support.size() == want.size());
  for (std::size_t i = 0; i < d2.support.size(); ++i)
    CHECK(d2.exact_probability(i) == want.at(d2.support[i]));
  CHECK(d2.max_probability() == 0.25);
}

TEST_CASE("exact level sums match brute-force bit enumeration") {
  for (unsigned n = 0; n <= 3; ++n) {
    const auto want = brute_levelsum(n);
    const auto got = exact_levelsum(n);
    REQUIRE(got.support.size() == want.size());
    for (std::size_t i = 0; i < got.support.size(); ++i)
      CHECK(got.exact_probability(i) == want.at(got.support[i]));
  }
}

TEST_CASE("exact level sums: invariants up to N = 8") {
  for (unsigned n = 0; n <= kMaxExactLevel; ++n) {
    const auto d = exact_levelsum(n);
    CHECK(d.denominator_exponent == (pow3(n) - 1) / 2);
    mpq_class total = 0;
    for (std::size_t i = 0; i < d.support.size(); ++i) {
      total += d.exact_probability(i);
      CHECK(std::abs(d.support[i]) <= std::int64_t(pow3(n)));
      CHECK(((d.support[i] - std::int64_t(pow3(n))) % 2) == 0);
    }
    CHECK(total == 1);
    CHECK(d.within_bound());
    CHECK(d.max_probability() <= 32.0 * std::ldexp(1.0, -int(n)));
  }
  CHECK_THROWS_AS(exact_levelsum(9), std::length_error);
}

TEST_CASE("walk stream copies the tree structure") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    WalkStream w(s);
    std::vector<int> inc;
    for (int i = 0; i < 729; ++i) {
      const auto before = w.position();
      inc.push_back(w.next());
      CHECK(std::abs(w.position() - before) == 1);
    }
    CHECK(copy_structure(inc));
    CHECK(w.steps() == 729);
  }
}

TEST_CASE("walk marginals match exact level sums") {
  const unsigned trials = 20000;
  for (unsigned n = 1; n <= 4; ++n) {
    const auto exact = exact_levelsum(n);
    std::map<std::int64_t, unsigned> hist;
    for (unsigned t = 0; t < trials; ++t) {
      WalkStream w(derive_seed(n, t));
      for (std::uint64_t i = 0; i < pow3(n); ++i) w.next();
      ++hist[w.position()];
    }
    for (std::size_t i = 0; i < exact.support.size(); ++i) {
      const double p = exact.probability(i);
      const double got = hist[exact.support[i]] / double(trials);
      CHECK(std::abs(got - p) <= 5 * std::sqrt(p * (1 - p) / trials) + 1e-12);
    }
  }
}

TEST_CASE("continuations preserve the law") {
  // Reveal 4 steps, continue with a fresh generator to step 9, compare with Y_2.
  const auto exact = exact_levelsum(2);
  const unsigned trials = 40000;
  std::map<std::int64_t, unsigned> hist;
  for (unsigned t = 0; t < trials; ++t) {
    WalkStream w(derive_seed(1, t));
    for (int i = 0; i < 4; ++i) w.next();
    WalkStream c = w.continuation(derive_seed(2, t));
    CHECK(c.position() == w.position());
    for (int i = 4; i < 9; ++i) c.next();
    ++hist[c.position()];
  }
  for (std::size_t i = 0; i < exact.support.size(); ++i) {
    const double p = exact.probability(i);
    CHECK(std::abs(hist[exact.support[i]] / double(trials) - p) <=
          5 * std::sqrt(p * (1 - p) / trials));
  }
  WalkStream w(3);
  for (int i = 0; i < 10; ++i) w.next();
  WalkStream a = w.continuation(17), b = w.continuation(17);
  for (int i = 0; i < 50; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("predictability") {
  CHECK(predictability_bound(1) == doctest::Approx(100.0));
  CHECK(predictability_bound(2187) == doctest::Approx(100.0 / 128).epsilon(1e-9));
  const auto k1 = estimate_predictability(1, 5, 2000, 3, 4);
  CHECK(k1.estimate <= 1.0);
  CHECK(k1.estimate >= 0.5);
  // Unconditioned: sup_x P(S_{3^N} = x) from the exact table.
  const auto e = estimate_predictability(81, 0, 20000, 9);
  const double exact = exact_levelsum(4).max_probability();
  CHECK(std::abs(e.estimate - exact) <= 5 * std::sqrt(exact * (1 - exact) / 20000) + 0.005);
  const auto k7 = estimate_predictability(2187, 0, 4000, 9, 1, 2);
  CHECK(k7.estimate - k7.half_width() <= 0.25);
  CHECK(k7.estimate <= predictability_bound(2187));
  CHECK(estimate_predictability(27, 10, 500, 4, 2, 1).estimate ==
        estimate_predictability(27, 10, 500, 4, 2, 3).estimate);
}

TEST_CASE("general step walk") {
  // Unit steps reproduce the underlying stream path by path.
  for (std::uint64_t s = 0; s < 20; ++s) {
    GeneralStepWalk g(std::vector<double>(100, 1.0), s);
    WalkStream w(s);
    for (int i = 0; i < 100; ++i) {
      g.next();
      w.next();
      CHECK(g.position() == double(w.position()));
    }
  }
  CHECK_THROWS_AS(GeneralStepWalk({1.0, 0.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(GeneralStepWalk({1.0, -2.0}, 1), std::invalid_argument);

  // Steps [1, 2] with independent signs: S~_2 uniform on {-3, -1, 1, 3}.
  std::map<long, int> hist;
  const int trials = 40000;
  for (int t = 0; t < trials; ++t) {
    GeneralStepWalk g({1.0, 2.0}, derive_seed(4, t), SignSource::Independent);
    g.next();
    g.next();
    ++hist[std::lround(g.position())];
  }
  CHECK(hist.size() == 4);
  for (long v : {-3L, -1L, 1L, 3L})
    CHECK(std::abs(hist[v] / double(trials) - 0.25) <= 5 * std::sqrt(0.1875 / trials));
  const auto pm = general_step_point_mass({1.0, 2.0}, 0, 20000, 5, SignSource::Independent);
  CHECK(std::abs(pm.estimate - 0.25) <= 5 * std::sqrt(0.1875 / 20000));
  // The tree stream starts with two forced +1 spins.
  const auto forced = general_step_point_mass({1.0, 2.0}, 0, 2000, 5);
  CHECK(forced.estimate == 1.0);

  // Distinct steps, k = 1 after a long history: a single fair sign.
  std::vector<double> steps;
  for (int i = 1; i <= 11; ++i) steps.push_back(0.5 + i);
  const auto last = general_step_point_mass(steps, 10, 20000, 6, SignSource::Independent, 3);
  CHECK(std::abs(last.estimate - 0.5) < 0.03);

  // Unit steps with N = 0 and k = 3^m reduce to the level-sum supremum.
  const auto unit = general_step_point_mass(std::vector<double>(27, 1.0), 0, 20000, 7);
  const double exact = exact_levelsum(3).max_probability();
  CHECK(std::abs(unit.estimate - exact) <= 5 * std::sqrt(exact * (1 - exact) / 20000) + 0.005);
}
