#include "lrtrunc/treepaths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "lrtrunc/parallel.hpp"

namespace lrtrunc {

namespace {

std::uint64_t pow3(unsigned e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= 3;
  return r;
}

void fisher_yates(std::vector<double>& v, std::size_t from, Rng& rng) {
  for (std::size_t i = v.size(); i > from + 1; --i) {
    const auto j = from + static_cast<std::size_t>(rng.below(i - from));
    std::swap(v[i - 1], v[j]);
  }
}

using Poly = std::vector<mpz_class>;

// Kronecker substitution: coefficients are nonnegative and each fits in
// `slot` limbs, so packing at 2^(64 * slot) is lossless.
mpz_class pack(const Poly& p, std::size_t slot) {
  mpz_class z;
  mp_limb_t* limbs = mpz_limbs_write(z.get_mpz_t(), static_cast<mp_size_t>(p.size() * slot));
  std::fill(limbs, limbs + p.size() * slot, mp_limb_t{0});
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto n = mpz_size(p[i].get_mpz_t());
    if (n > slot) throw std::logic_error("coefficient overflows Kronecker slot");
    const mp_limb_t* src = mpz_limbs_read(p[i].get_mpz_t());
    std::copy(src, src + n, limbs + i * slot);
  }
  mpz_limbs_finish(z.get_mpz_t(), static_cast<mp_size_t>(p.size() * slot));
  return z;
}

Poly unpack(const mpz_class& z, std::size_t length, std::size_t slot) {
  Poly out(length);
  const auto avail = mpz_size(z.get_mpz_t());
  const mp_limb_t* src = mpz_limbs_read(z.get_mpz_t());
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t begin = i * slot;
    if (begin >= avail) break;
    const std::size_t n = std::min(slot, avail - begin);
    mp_limb_t* dst = mpz_limbs_write(out[i].get_mpz_t(), static_cast<mp_size_t>(n));
    std::copy(src + begin, src + begin + n, dst);
    mpz_limbs_finish(out[i].get_mpz_t(), static_cast<mp_size_t>(n));
  }
  return out;
}

Poly multiply(const Poly& a, const Poly& b, std::size_t slot) {
  const mpz_class product = pack(a, slot) * pack(b, slot);
  return unpack(product, a.size() + b.size() - 1, slot);
}

}  // namespace

TernarySpinLevel sample_level(unsigned level, std::uint64_t seed) {
  if (level > kMaxSampledLevel)
    throw std::length_error("tree level above " + std::to_string(kMaxSampledLevel));
  Rng rng(seed);
  std::vector<std::int8_t> spins{1};
  for (unsigned m = 0; m < level; ++m) {
    std::vector<std::int8_t> next;
    next.reserve(spins.size() * 3);
    for (auto s : spins) {
      next.push_back(s);
      next.push_back(s);
      next.push_back(static_cast<std::int8_t>(rng.sign()));
    }
    spins = std::move(next);
  }
  return {level, std::move(spins), seed};
}

double LevelSumDistribution::probability(std::size_t i) const {
  return exact_probability(i).get_d();
}

mpq_class LevelSumDistribution::exact_probability(std::size_t i) const {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, denominator_exponent);
  mpq_class q(counts.at(i), den);
  q.canonicalize();
  return q;
}

bool LevelSumDistribution::within_bound() const {
  const mpz_class top = *std::max_element(counts.begin(), counts.end());
  // top / 2^E <= 32 / 2^N  <=>  top * 2^N <= 2^(E + 5)
  mpz_class lhs = top, rhs;
  mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), level);
  mpz_ui_pow_ui(rhs.get_mpz_t(), 2, denominator_exponent + 5);
  return lhs <= rhs;
}

double LevelSumDistribution::max_probability() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return probability(best);
}

LevelSumDistribution exact_levelsum(unsigned level) {
  if (level > kMaxExactLevel)
    throw std::length_error("exact level sums are limited to N <= " +
                            std::to_string(kMaxExactLevel));
  // Index i of a depth-m polynomial stands for the value 2i - 3^m.
  Poly plus{0, 1};
  std::uint64_t bits = 0;
  for (unsigned m = 1; m <= level; ++m) {
    Poly either(plus.size());
    for (std::size_t i = 0; i < plus.size(); ++i) either[i] = plus[i] + plus[plus.size() - 1 - i];
    bits = 3 * bits + 1;
    const std::size_t slot = static_cast<std::size_t>((bits + 1 + 63) / 64);
    plus = multiply(multiply(plus, plus, slot), either, slot);
  }
  LevelSumDistribution out;
  out.level = level;
  out.denominator_exponent = bits;
  const auto span = static_cast<std::int64_t>(pow3(level));
  for (std::size_t i = 0; i < plus.size(); ++i) {
    if (plus[i] == 0) continue;
    out.support.push_back(2 * static_cast<std::int64_t>(i) - span);
    out.counts.push_back(plus[i]);
  }
  return out;
}

WalkStream::WalkStream(std::uint64_t seed) : rng_(seed) {}

int WalkStream::next() {
  std::uint64_t m = steps_;
  if (m != 0) {
    unsigned height = 0;
    std::uint64_t r = m;
    while (r % 3 == 0) {
      r /= 3;
      ++height;
    }
    if (r % 3 == 2) {
      if (signs_.size() <= height) signs_.resize(height + 1, 1);
      signs_[height] = static_cast<std::int8_t>(rng_.sign());
    }
  }
  int spin = 1;
  for (unsigned height = 0; m != 0; ++height, m /= 3) {
    if (m % 3 == 2) {
      spin = signs_[height];
      break;
    }
  }
  ++steps_;
  position_ += spin;
  return spin;
}

WalkStream WalkStream::continuation(std::uint64_t seed) const {
  WalkStream copy = *this;
  copy.rng_ = Rng(seed);
  return copy;
}

double predictability_bound(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("predictability bound needs k >= 1");
  return BppConstants::profile_coefficient *
         std::pow(static_cast<double>(k), -BppConstants::profile_exponent);
}

namespace {

template <class Key>
EstimateWithCI max_cell(const std::vector<Key>& values, std::uint64_t seed) {
  std::unordered_map<Key, std::uint64_t> hist;
  std::uint64_t best = 0;
  for (const auto& v : values) best = std::max(best, ++hist[v]);
  return wilson_estimate(best, values.size(), seed);
}

}  // namespace

EstimateWithCI estimate_predictability(std::uint64_t k, std::uint64_t history_length,
                                       std::uint64_t trials, std::uint64_t seed,
                                       std::uint64_t histories, unsigned workers) {
  if (k == 0) throw std::invalid_argument("predictability needs k >= 1");
  if (trials == 0 || histories == 0)
    throw std::invalid_argument("predictability needs trials and histories >= 1");
  if (history_length + k > pow3(kMaxSampledLevel))
    throw std::length_error("n + k exceeds 3^13");
  EstimateWithCI best;
  for (std::uint64_t h = 0; h < histories; ++h) {
    const std::uint64_t history_seed = derive_seed(seed, h);
    WalkStream base(history_seed);
    for (std::uint64_t i = 0; i < history_length; ++i) base.next();
    std::vector<std::int64_t> endpoints(trials);
    parallel_for(trials, workers, [&](std::size_t t) {
      WalkStream w = base.continuation(derive_seed(history_seed ^ 0x5bd1e995ull, t));
      for (std::uint64_t i = 0; i < k; ++i) w.next();
      endpoints[t] = w.position();
    });
    auto est = max_cell(endpoints, seed);
    if (h == 0 || est.estimate > best.estimate) best = est;
  }
  return best;
}

GeneralStepWalk::GeneralStepWalk(std::vector<double> steps, std::uint64_t seed,
                                 SignSource source)
    : order_(std::move(steps)), source_(source), stream_(seed), rng_(derive_seed(seed, 1)) {
  for (auto s : order_) {
    if (!(s > 0.0)) throw std::invalid_argument("steps must be positive");
  }
  fisher_yates(order_, 0, rng_);
}

double GeneralStepWalk::next() {
  if (taken_ >= order_.size()) throw std::out_of_range("general-step walk exhausted");
  const int sign = source_ == SignSource::Unpredictable ? stream_.next() : rng_.sign();
  position_ += sign * order_[taken_++];
  return position_;
}

GeneralStepWalk GeneralStepWalk::continuation(std::uint64_t seed) const {
  GeneralStepWalk copy = *this;
  copy.rng_ = Rng(derive_seed(seed, 1));
  copy.stream_ = stream_.continuation(derive_seed(seed, 2));
  fisher_yates(copy.order_, taken_, copy.rng_);
  return copy;
}

EstimateWithCI general_step_point_mass(const std::vector<double>& steps,
                                       std::size_t history_length, std::uint64_t trials,
                                       std::uint64_t seed, SignSource source,
                                       std::uint64_t histories) {
  if (history_length >= steps.size())
    throw std::invalid_argument("need k = |steps| - N >= 1");
  if (trials == 0 || histories == 0)
    throw std::invalid_argument("general_step_point_mass needs trials and histories >= 1");
  const double total = std::accumulate(steps.begin(), steps.end(), 0.0);
  const double resolution = 1e-9 * std::max(1.0, total);
  const std::size_t k = steps.size() - history_length;
  EstimateWithCI best;
  for (std::uint64_t h = 0; h < histories; ++h) {
    const std::uint64_t history_seed = derive_seed(seed, h);
    GeneralStepWalk base(steps, history_seed, source);
    for (std::size_t i = 0; i < history_length; ++i) base.next();
    std::vector<std::int64_t> buckets(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
      GeneralStepWalk w = base.continuation(derive_seed(history_seed ^ 0x27d4eb2full, t));
      for (std::size_t i = 0; i < k; ++i) w.next();
      buckets[t] = std::llround(w.position() / resolution);
    }
    auto est = max_cell(buckets, seed);
    if (h == 0 || est.estimate > best.estimate) best = est;
  }
  return best;
}

}  // namespace lrtrunc
