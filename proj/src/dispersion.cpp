#include "lrtrunc/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace lrtrunc {

namespace {

mpz_class pow2(std::size_t e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

mpz_class to_mpz(std::uint64_t v) {
  mpz_class r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

SignedSumDistribution by_convolution(const std::vector<std::uint64_t>& a, std::uint64_t total) {
  const auto width = static_cast<std::size_t>(2 * total + 1);
  std::vector<std::uint64_t> cur(width, 0), next(width, 0);
  const auto zero = static_cast<std::size_t>(total);
  cur[zero] = 1;
  std::uint64_t reach = 0;
  for (auto ak : a) {
    const auto lo = zero - reach, hi = zero + reach;
    std::fill(next.begin() + static_cast<std::ptrdiff_t>(lo - ak),
              next.begin() + static_cast<std::ptrdiff_t>(hi + ak + 1), 0);
    for (auto i = lo; i <= hi; ++i) {
      if (cur[i] == 0) continue;
      next[i - ak] += cur[i];
      next[i + ak] += cur[i];
    }
    reach += ak;
    std::swap(cur, next);
  }
  SignedSumDistribution out;
  out.terms = a.size();
  for (std::size_t i = 0; i < width; ++i) {
    if (cur[i] == 0) continue;
    out.support.push_back(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(total));
    out.counts.push_back(cur[i]);
  }
  return out;
}

SignedSumDistribution by_enumeration(const std::vector<std::uint64_t>& a) {
  std::map<std::int64_t, std::uint64_t> table;
  const std::uint64_t patterns = 1ull << a.size();
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto v = static_cast<std::int64_t>(a[k]);
      s += (mask >> k & 1u) ? v : -v;
    }
    ++table[s];
  }
  SignedSumDistribution out;
  out.terms = a.size();
  for (const auto& [x, c] : table) {
    out.support.push_back(x);
    out.counts.push_back(c);
  }
  return out;
}

}  // namespace

std::uint64_t SignedSumDistribution::count_at(std::int64_t x) const {
  auto it = std::lower_bound(support.begin(), support.end(), x);
  if (it == support.end() || *it != x) return 0;
  return counts[static_cast<std::size_t>(it - support.begin())];
}

double SignedSumDistribution::mass_at(std::int64_t x) const {
  return std::ldexp(static_cast<double>(count_at(x)), -static_cast<int>(terms));
}

mpq_class SignedSumDistribution::exact_mass_at(std::int64_t x) const {
  mpq_class q(to_mpz(count_at(x)), pow2(terms));
  q.canonicalize();
  return q;
}

SignedSumDistribution exact_distribution(const std::vector<std::uint64_t>& a) {
  std::uint64_t total = 0;
  bool overflow = false;
  for (auto ak : a) {
    if (ak > kConvolutionMaxSum || total > kConvolutionMaxSum) overflow = true;
    total += ak;
  }
  if (!overflow && total <= kConvolutionMaxSum && a.size() <= kConvolutionMaxTerms)
    return by_convolution(a, total);
  if (a.size() <= kEnumerationMaxTerms) {
    for (auto ak : a) {
      if (ak > (1ull << 38)) throw std::length_error("coefficient too large for enumeration");
    }
    return by_enumeration(a);
  }
  throw std::length_error("signed-sum distribution exceeds enumeration and convolution limits");
}

MaxPointMass max_point_mass(const std::vector<std::uint64_t>& a) {
  std::vector<std::uint64_t> positive;
  std::copy_if(a.begin(), a.end(), std::back_inserter(positive),
               [](auto v) { return v > 0; });
  if (positive.empty()) throw std::invalid_argument("max_point_mass needs a positive coefficient");
  const auto dist = exact_distribution(positive);
  MaxPointMass out;
  out.terms = positive.size();
  out.count = *std::max_element(dist.counts.begin(), dist.counts.end());
  out.value = std::ldexp(static_cast<double>(out.count), -static_cast<int>(out.terms));
  out.bound = 1.0 / std::sqrt(static_cast<double>(out.terms));
  const mpz_class c = to_mpz(out.count);
  out.holds = c * c * static_cast<unsigned long>(out.terms) <= pow2(2 * out.terms);
  return out;
}

TailBounds tail_bounds(const std::vector<std::uint64_t>& a) {
  if (std::all_of(a.begin(), a.end(), [](auto v) { return v == 0; }))
    throw std::invalid_argument("tail_bounds needs a nonzero coefficient");
  const auto dist = exact_distribution(a);
  TailBounds out;
  out.terms = a.size();
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    const auto x = dist.support[i];
    const auto c = dist.counts[i];
    if (x > 0) out.positive += c;
    if (x != 0) out.nonzero += c;
    if (x >= 0) out.nonnegative += c;
  }
  const int e = -static_cast<int>(out.terms);
  out.p_pos = std::ldexp(static_cast<double>(out.positive), e);
  out.p_nonzero = std::ldexp(static_cast<double>(out.nonzero), e);
  out.p_nonneg = std::ldexp(static_cast<double>(out.nonnegative), e);
  const mpz_class all = pow2(out.terms);
  out.pos_holds = 4 * to_mpz(out.positive) >= all;
  out.nonzero_holds = 2 * to_mpz(out.nonzero) >= all;
  out.nonneg_holds = 2 * to_mpz(out.nonnegative) >= all;
  return out;
}

CosineMoment cosine_moment(std::uint64_t n) {
  CosineMoment out;
  out.n = n;
  double even = 1.0, odd = 2.0 / std::numbers::pi;
  for (std::uint64_t m = 2; m <= n; ++m) {
    double& slot = (m % 2 == 0) ? even : odd;
    slot *= static_cast<double>(m - 1) / static_cast<double>(m);
  }
  out.value = (n % 2 == 0) ? even : odd;
  if (n % 2 == 0) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), n, n / 2);
    mpq_class q(c, pow2(n));
    q.canonicalize();
    out.closed_form = q.get_d();
  }
  if (n >= 1) {
    const double root = std::sqrt(static_cast<double>(n));
    out.within_sqrt_bound = out.value <= 1.0 / root;
    if (n % 2 == 0) out.within_even_bound = out.value <= 0.87 / root;
  }
  return out;
}

}  // namespace lrtrunc
