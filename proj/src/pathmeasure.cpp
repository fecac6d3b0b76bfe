#include "lrtrunc/pathmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "lrtrunc/parallel.hpp"
#include "lrtrunc/treepaths.hpp"

namespace lrtrunc {

namespace {

std::int64_t block_sum(const Site& x, const std::vector<std::size_t>& axes) {
  std::int64_t s = 0;
  for (auto a : axes) s += x[a];
  return s;
}

long double binomial(long double n, unsigned k) {
  if (n < k) return 0.0L;
  long double r = 1.0L;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of b-tuples in [-n, n]^b summing to zero (inclusion-exclusion).
long double zero_sum_count(std::int64_t n, std::size_t b) {
  if (b == 1) return 1.0L;
  if (b == 2) return static_cast<long double>(2 * n + 1);
  const long double s = static_cast<long double>(b) * n;
  const long double width = 2.0L * n + 1.0L;
  long double total = 0.0L;
  for (std::size_t j = 0; j <= b; ++j) {
    const long double top = s - j * width;
    if (top < 0) break;
    const long double term = binomial(static_cast<long double>(b), static_cast<unsigned>(j)) *
                             binomial(top + b - 1, static_cast<unsigned>(b - 1));
    total += (j % 2 == 0) ? term : -term;
  }
  return std::round(total);
}

long double block_count(std::int64_t n, const BlockConstraint& c) {
  const auto b = c.axes.size();
  const long double all = std::pow(2.0L * n + 1.0L, static_cast<long double>(b));
  switch (c.rule) {
    case BlockRule::Any:
      return all;
    case BlockRule::Positive:
      return (all - zero_sum_count(n, b)) / 2;
    case BlockRule::NonNegative:
      return (all + zero_sum_count(n, b)) / 2;
    case BlockRule::NonZero:
      return all - zero_sum_count(n, b);
    case BlockRule::AtLeast: {
      if (b != 1) throw std::invalid_argument("AtLeast applies to single-axis blocks");
      const std::int64_t lo = std::max(c.threshold, -n);
      return static_cast<long double>(std::max<std::int64_t>(0, n - lo + 1));
    }
  }
  return 0.0L;
}

double sphere_size(std::size_t d, std::int64_t n) {
  const double dd = static_cast<double>(d);
  return std::pow(2.0 * n + 1.0, dd) - std::pow(2.0 * n - 1.0, dd);
}

Site uniform_on_sphere(std::size_t d, std::int64_t n, Rng& rng) {
  // Split by the first coordinate reaching |x_i| = n.
  std::vector<double> weight(d);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    weight[i] = std::pow(2.0 * n - 1.0, static_cast<double>(i)) * 2.0 *
                std::pow(2.0 * n + 1.0, static_cast<double>(d - 1 - i));
    total += weight[i];
  }
  double u = rng.uniform() * total;
  std::size_t axis = 0;
  while (axis + 1 < d && u >= weight[axis]) u -= weight[axis++];
  Site x(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (j < axis) {
      x[j] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * n - 1))) - (n - 1);
    } else if (j == axis) {
      x[j] = rng.coin() ? n : -n;
    } else {
      x[j] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * n + 1))) - n;
    }
  }
  return x;
}

std::int64_t resolve_radius(const Kernel& kernel, std::optional<std::int64_t> radius) {
  auto support = kernel.support_radius();
  if (radius) {
    if (*radius < 1) throw std::invalid_argument("step radius must be >= 1");
    return support ? std::min(*radius, *support) : *radius;
  }
  if (!support) throw std::invalid_argument("unbounded kernel support: a step radius is required");
  return *support;
}

std::vector<std::size_t> axis_range(std::size_t from, std::size_t to) {
  std::vector<std::size_t> out;
  for (auto i = from; i < to; ++i) out.push_back(i);
  return out;
}

Site indicator(std::size_t d, const std::vector<std::size_t>& axes) {
  Site w(d, 0);
  for (auto a : axes) w[a] = 1;
  return w;
}

}  // namespace

bool BlockConstraint::accepts(const Site& x) const {
  const auto s = block_sum(x, axes);
  switch (rule) {
    case BlockRule::Any: return true;
    case BlockRule::Positive: return s > 0;
    case BlockRule::NonNegative: return s >= 0;
    case BlockRule::NonZero: return s != 0;
    case BlockRule::AtLeast: return s >= threshold;
  }
  return false;
}

bool StepSet::contains(const Site& x) const {
  if (x.size() != dim || is_zero(x) || linf_norm(x) > radius) return false;
  return std::all_of(constraints.begin(), constraints.end(),
                     [&](const auto& c) { return c.accepts(x); });
}

long double StepSet::cube_count(std::int64_t n) const {
  if (n == 0) {
    const Site origin(dim, 0);
    return std::all_of(constraints.begin(), constraints.end(),
                       [&](const auto& c) { return c.accepts(origin); })
               ? 1.0L
               : 0.0L;
  }
  std::vector<char> used(dim, 0);
  long double count = 1.0L;
  for (const auto& c : constraints) {
    for (auto a : c.axes) {
      if (a >= dim || used[a]) throw std::invalid_argument("step-set blocks must be disjoint");
      used[a] = 1;
    }
    count *= block_count(n, c);
  }
  const auto free_axes = static_cast<long double>(std::count(used.begin(), used.end(), 0));
  return count * std::pow(2.0L * n + 1.0L, free_axes);
}

StepDistribution::StepDistribution(const Kernel& kernel, StepSet set)
    : kernel_(kernel), set_(std::move(set)) {
  if (set_.dim != kernel.dimension())
    throw std::invalid_argument("step set dimension does not match the kernel");
  set_.radius = resolve_radius(kernel, set_.radius);
  const auto d = set_.dim;
  const auto R = set_.radius;
  if (kernel.linf_radial()) {
    layered_ = true;
    double acc = 0.0;
    long double mass = 0.0L;
    long double inner = set_.cube_count(0);
    for (std::int64_t n = 1; n <= R; ++n) {
      const double p = kernel.radial_value(n);
      acc += p * sphere_size(d, n);
      layer_cdf_.push_back(acc);
      const long double outer = set_.cube_count(n);
      mass += static_cast<long double>(p) * (outer - inner);
      inner = outer;
    }
    total_mass_ = static_cast<double>(mass);
  } else {
    if (std::pow(2.0 * R + 1.0, static_cast<double>(d)) > static_cast<double>(kEnumeratedStepCap))
      throw std::length_error("step set too large to enumerate for a non-radial kernel");
    double acc = 0.0;
    for_each_in_cube(d, R, [&](const Site& x) {
      if (!set_.contains(x)) return;
      const double p = kernel.prob_at(x);
      if (p <= 0.0) return;
      acc += p;
      points_.push_back(x);
      point_cdf_.push_back(acc);
    });
    total_mass_ = acc;
  }
  if (!(total_mass_ > 0.0)) throw std::invalid_argument("step set carries no kernel mass");
}

Site StepDistribution::sample(Rng& rng) const {
  if (!layered_) {
    const double u = rng.uniform() * point_cdf_.back();
    auto it = std::upper_bound(point_cdf_.begin(), point_cdf_.end(), u);
    if (it == point_cdf_.end()) --it;
    return points_[static_cast<std::size_t>(it - point_cdf_.begin())];
  }
  for (std::uint64_t attempt = 0; attempt < 100'000'000ull; ++attempt) {
    const double u = rng.uniform() * layer_cdf_.back();
    auto it = std::upper_bound(layer_cdf_.begin(), layer_cdf_.end(), u);
    if (it == layer_cdf_.end()) --it;
    const auto n = static_cast<std::int64_t>(it - layer_cdf_.begin()) + 1;
    Site x = uniform_on_sphere(set_.dim, n, rng);
    if (set_.contains(x)) return x;
  }
  throw std::runtime_error("step sampler rejection limit reached");
}

double StepDistribution::probability(const Site& x) const {
  if (!set_.contains(x)) return 0.0;
  return kernel_.prob_at(x) / total_mass_;
}

std::string to_string(MeasureTag tag) {
  switch (tag) {
    case MeasureTag::M1: return "M1";
    case MeasureTag::M2: return "M2";
    case MeasureTag::M3: return "M3";
    case MeasureTag::Directed: return "directed";
  }
  return "?";
}

bool is_self_avoiding(const PathSample& path) {
  std::unordered_set<Site, SiteHash> seen;
  seen.reserve(path.vertices.size() * 2);
  for (const auto& v : path.vertices) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

M1Config build_m1(const Kernel& kernel, const Site& u, const Site& v, std::int64_t m,
                  bool strict) {
  const auto d = kernel.dimension();
  if (u.size() != d || v.size() != d) throw std::invalid_argument("u, v must have the kernel's dimension");
  if (!satisfies(kernel.symmetry(), SymmetryClass::Mirror))
    throw std::invalid_argument("M1 needs a mirror-symmetric kernel");
  if (u == v) throw std::invalid_argument("u and v must be distinct");
  if (u[0] < 0 || v[0] < 0) throw std::invalid_argument("u_1 and v_1 must be nonnegative");
  bool independent = false;
  for (std::size_t i = 1; i < d && !independent; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (u[i] * v[j] - u[j] * v[i] != 0) {
        independent = true;
        break;
      }
    }
  }
  if (!independent) throw std::invalid_argument("tails of u and v are linearly dependent");

  const std::int64_t q = std::max(linf_norm(u), linf_norm(v));
  if (m <= 3 * q) throw std::invalid_argument("M must exceed 3Q = " + std::to_string(3 * q));
  M1Config c{.kernel = layer_normalize(kernel, q)};
  c.u = u;
  c.v = v;
  c.u_minus = u;
  c.v_minus = v;
  for (std::size_t i = 1; i < d; ++i) {
    c.u_minus[i] = -u[i];
    c.v_minus[i] = -v[i];
  }
  c.q = q;
  c.m = m;
  c.eta = std::min(c.kernel.prob_at(u), c.kernel.prob_at(v));
  if (!(c.eta > 0.0)) throw std::invalid_argument("eta = min(p_u, p_v) must be positive");
  StepSet set{d, m, {BlockConstraint{{0}, BlockRule::AtLeast, 3 * c.q}}};
  c.psi = std::make_shared<const StepDistribution>(c.kernel, std::move(set));
  c.epsilon = 1.0 / c.psi->total_mass();
  c.hitting_constant = 25004.0 * std::pow(c.epsilon, 0.05) / (c.eta * c.eta);
  c.epsilon_condition = c.epsilon <= 1e-10;
  c.hitting_condition = c.hitting_constant <= 0.25;
  c.strict = strict;
  if (strict && !(c.epsilon_condition && c.hitting_condition)) {
    std::ostringstream os;
    os << "strict M1 conditions fail: 1/eps = " << c.psi->total_mass()
       << " (need >= 1e10), 25004 eps^0.05 / eta^2 = " << c.hitting_constant << " (need <= 1/4)";
    throw std::invalid_argument(os.str());
  }
  return c;
}

std::pair<Site, Site> choose_m1_vectors(const Kernel& kernel, std::int64_t search_radius) {
  const auto d = kernel.dimension();
  struct Candidate {
    Site x;
    double p;
    std::int64_t norm;
  };
  std::vector<Candidate> cands;
  for_each_in_cube(d, search_radius, [&](const Site& x) {
    if (is_zero(x) || x[0] < 0) return;
    if (std::all_of(x.begin() + 1, x.end(), [](auto c) { return c == 0; })) return;
    const double p = kernel.prob_at(x);
    if (p > 0.0) cands.push_back({x, p, linf_norm(x)});
  });
  std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.p > b.p;
  });
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      const auto& u = cands[i].x;
      const auto& v = cands[j].x;
      for (std::size_t a = 1; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
          if (u[a] * v[b] - u[b] * v[a] != 0) return {u, v};
        }
      }
    }
  }
  throw std::invalid_argument("no admissible (u, v) within the search radius");
}

M2Config build_m2(const Kernel& kernel, std::optional<std::int64_t> radius) {
  const auto d = kernel.dimension();
  if (d < 4) throw std::invalid_argument("M2 needs d >= 4");
  if (!satisfies(kernel.symmetry(), SymmetryClass::SignedPermutation))
    throw std::invalid_argument("M2 needs an isotropic kernel");
  M2Config c{.kernel = kernel, .dim = d, .radius = resolve_radius(kernel, radius)};
  const std::size_t b = d / 4;
  const std::array<std::vector<std::size_t>, 4> blocks{
      axis_range(0, b), axis_range(b, 2 * b), axis_range(2 * b, 3 * b), axis_range(3 * b, d)};
  for (std::size_t k = 0; k < 4; ++k) c.w[k] = indicator(d, blocks[k]);
  c.full_mass = expected_degree(kernel, c.radius);
  for (std::size_t k = 0; k < 4; ++k) {
    StepSet set{d, c.radius, {}};
    if (k < 3) {
      set.constraints.push_back({blocks[k], BlockRule::NonZero});
      set.constraints.push_back({blocks[3], BlockRule::NonNegative});
    } else {
      set.constraints.push_back({blocks[3], BlockRule::Positive});
    }
    c.psi[k] = std::make_shared<const StepDistribution>(kernel, std::move(set));
    c.mass_ratio[k] = c.psi[k]->total_mass() / c.full_mass;
  }
  return c;
}

M3Config build_m3(const Kernel& kernel, std::optional<std::int64_t> radius) {
  if (kernel.dimension() != 3) throw std::invalid_argument("M3 needs d = 3");
  if (!satisfies(kernel.symmetry(), SymmetryClass::SignedPermutation))
    throw std::invalid_argument("M3 needs an isotropic kernel");
  M3Config c{.kernel = kernel, .radius = resolve_radius(kernel, radius)};
  c.full_mass = expected_degree(kernel, c.radius);
  const std::array<std::vector<BlockConstraint>, 3> sets{
      std::vector<BlockConstraint>{{{0}, BlockRule::Positive}, {{2}, BlockRule::NonNegative}},
      std::vector<BlockConstraint>{{{1}, BlockRule::NonZero}, {{2}, BlockRule::NonNegative}},
      std::vector<BlockConstraint>{{{2}, BlockRule::Positive}}};
  for (std::size_t k = 0; k < 3; ++k) {
    c.psi[k] = std::make_shared<const StepDistribution>(kernel, StepSet{3, c.radius, sets[k]});
    c.mass_ratio[k] = c.psi[k]->total_mass() / c.full_mass;
  }
  return c;
}

namespace {

PathSample start_path(MeasureTag tag, std::size_t dim, std::size_t steps, std::uint64_t seed) {
  PathSample path;
  path.tag = tag;
  path.seed = seed;
  path.vertices.reserve(steps + 1);
  path.vertices.emplace_back(dim, 0);
  return path;
}

void append_step(PathSample& path, const Site& step) {
  path.vertices.push_back(add(path.vertices.back(), step));
}

PathSample m1_steps(const M1Config& c, std::size_t steps, std::uint64_t seed) {
  auto path = start_path(MeasureTag::M1, c.u.size(), steps, seed);
  Rng rng(seed);
  WalkStream walk(derive_seed(seed, 1));
  WalkStream other(derive_seed(seed, 2));
  for (std::size_t k = 0; k < steps; ++k) {
    switch (k % 3) {
      case 0: append_step(path, c.psi->sample(rng)); break;
      case 1: append_step(path, walk.next() > 0 ? c.u : c.u_minus); break;
      default: append_step(path, other.next() > 0 ? c.v : c.v_minus); break;
    }
  }
  return path;
}

PathSample m2_steps(const M2Config& c, std::size_t steps, std::uint64_t seed, unsigned phase) {
  auto path = start_path(MeasureTag::M2, c.dim, steps, seed);
  Rng rng(seed);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto r = (k + phase) % 6;
    const std::size_t which = (r % 2 == 0) ? 3 : (r - 1) / 2;
    append_step(path, c.psi[which]->sample(rng));
  }
  return path;
}

PathSample m3_steps(const M3Config& c, std::size_t steps, std::uint64_t seed) {
  auto path = start_path(MeasureTag::M3, 3, steps, seed);
  Rng rng(seed);
  WalkStream signs(derive_seed(seed, 1));
  for (std::size_t k = 0; k < steps; ++k) {
    if (k % 2 == 0) {
      append_step(path, c.psi[2]->sample(rng));
    } else if (k % 4 == 1) {
      Site x = c.psi[0]->sample(rng);
      x[0] *= signs.next();
      append_step(path, x);
    } else {
      append_step(path, c.psi[1]->sample(rng));
    }
  }
  return path;
}

}  // namespace

PathSample sample_m1(const M1Config& config, std::size_t triples, std::uint64_t seed) {
  return m1_steps(config, 3 * triples, seed);
}

PathSample sample_m2(const M2Config& config, std::size_t steps, std::uint64_t seed,
                     unsigned phase) {
  if (phase > 5) throw std::invalid_argument("M2 phase must be in 0..5");
  return m2_steps(config, steps, seed, phase);
}

PathSample sample_m3(const M3Config& config, std::size_t steps, std::uint64_t seed) {
  return m3_steps(config, steps, seed);
}

PathMeasure PathMeasure::m1(M1Config config) {
  PathMeasure m;
  m.tag_ = MeasureTag::M1;
  m.m1_ = std::make_shared<const M1Config>(std::move(config));
  return m;
}

PathMeasure PathMeasure::m2(M2Config config, unsigned phase) {
  if (phase > 5) throw std::invalid_argument("M2 phase must be in 0..5");
  PathMeasure m;
  m.tag_ = MeasureTag::M2;
  m.phase_ = phase;
  m.m2_ = std::make_shared<const M2Config>(std::move(config));
  return m;
}

PathMeasure PathMeasure::m3(M3Config config) {
  PathMeasure m;
  m.tag_ = MeasureTag::M3;
  m.m3_ = std::make_shared<const M3Config>(std::move(config));
  return m;
}

PathMeasure PathMeasure::directed(const Kernel& kernel, std::size_t axis,
                                  std::optional<std::int64_t> radius) {
  if (axis >= kernel.dimension()) throw std::invalid_argument("axis outside the dimension");
  PathMeasure m;
  m.tag_ = MeasureTag::Directed;
  m.directed_axis_ = axis;
  m.directed_kernel_ = kernel;
  StepSet set{kernel.dimension(), resolve_radius(kernel, radius),
              {BlockConstraint{{axis}, BlockRule::Positive}}};
  m.directed_ = std::make_shared<const StepDistribution>(kernel, std::move(set));
  return m;
}

PathSample PathMeasure::sample(std::size_t steps, std::uint64_t seed) const {
  switch (tag_) {
    case MeasureTag::M1: return m1_steps(*m1_, steps, seed);
    case MeasureTag::M2: return m2_steps(*m2_, steps, seed, phase_);
    case MeasureTag::M3: return m3_steps(*m3_, steps, seed);
    case MeasureTag::Directed: {
      auto path = start_path(tag_, dimension(), steps, seed);
      Rng rng(seed);
      for (std::size_t k = 0; k < steps; ++k) append_step(path, directed_->sample(rng));
      return path;
    }
  }
  throw std::logic_error("unknown measure");
}

std::size_t PathMeasure::dimension() const { return kernel().dimension(); }

const Kernel& PathMeasure::kernel() const {
  switch (tag_) {
    case MeasureTag::M1: return m1_->kernel;
    case MeasureTag::M2: return m2_->kernel;
    case MeasureTag::M3: return m3_->kernel;
    case MeasureTag::Directed: break;
  }
  return *directed_kernel_;
}

Site PathMeasure::monotone_direction() const {
  switch (tag_) {
    case MeasureTag::M1: return unit_vector(dimension(), 0);
    case MeasureTag::M2: return m2_->w[3];
    case MeasureTag::M3: return unit_vector(3, 2);
    case MeasureTag::Directed: return unit_vector(dimension(), directed_axis_);
  }
  return {};
}

bool PathMeasure::designated_strict(std::size_t k) const {
  switch (tag_) {
    case MeasureTag::M1: return k % 3 == 0;
    case MeasureTag::M2: return (k + phase_) % 2 == 0;
    case MeasureTag::M3: return k % 2 == 0;
    case MeasureTag::Directed: return true;
  }
  return false;
}

std::int64_t PathMeasure::step_reach() const {
  switch (tag_) {
    case MeasureTag::M1: return std::max(m1_->m, m1_->q);
    case MeasureTag::M2: return m2_->radius;
    case MeasureTag::M3: return m3_->radius;
    case MeasureTag::Directed: return directed_->set().radius;
  }
  return 0;
}

BoundedEstimate estimate_intersection(const PathMeasure& first, const PathMeasure& second,
                                      const Site& offset, std::size_t horizon_first,
                                      std::size_t horizon_second, std::uint64_t trials,
                                      std::uint64_t seed, unsigned workers) {
  if (trials == 0) throw std::invalid_argument("estimate_intersection needs trials >= 1");
  if (offset.size() != first.dimension() || first.dimension() != second.dimension())
    throw std::invalid_argument("measures and offset must share a dimension");
  const bool at_origin = is_zero(offset);
  std::vector<char> hit(trials, 0);
  parallel_for(trials, workers, [&](std::size_t t) {
    const auto gamma = first.sample(horizon_first, derive_seed(seed, 2 * t));
    const auto phi = second.sample(horizon_second, derive_seed(seed, 2 * t + 1));
    std::unordered_map<Site, std::size_t, SiteHash> shifted;
    shifted.reserve(gamma.vertices.size() * 2);
    for (std::size_t k = 0; k < gamma.vertices.size(); ++k)
      shifted.emplace(add(offset, gamma.vertices[k]), k);
    for (std::size_t n = 0; n < phi.vertices.size(); ++n) {
      auto it = shifted.find(phi.vertices[n]);
      if (it == shifted.end()) continue;
      if (at_origin && it->second == 0 && n == 0) continue;
      hit[t] = 1;
      break;
    }
  });
  BoundedEstimate out;
  out.estimate = wilson_estimate(
      static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1)), trials, seed);
  switch (first.tag()) {
    case MeasureTag::M1: out.bound = 25004.0 * std::pow(first.m1_config()->epsilon, 0.05); break;
    case MeasureTag::M2:
    case MeasureTag::M3: out.bound = 0.25; break;
    case MeasureTag::Directed: out.bound = 1.0; break;
  }
  out.vacuous = out.bound >= 1.0;
  return out;
}

LayerMass conditional_layer_mass(const PathMeasure& measure, std::size_t k,
                                 std::uint64_t trials, std::uint64_t seed,
                                 std::uint64_t min_layer_count, unsigned workers) {
  if (trials == 0) throw std::invalid_argument("conditional_layer_mass needs trials >= 1");
  double bound = 1.0;
  switch (measure.tag()) {
    case MeasureTag::M2:
      if (k < 6) throw std::invalid_argument("M2 layer mass needs k >= 6");
      bound = 3.0 * std::pow(static_cast<double>(k / 6), -1.5);
      break;
    case MeasureTag::M3:
      if (k < 4) throw std::invalid_argument("M3 layer mass needs k >= 4");
      bound = 100.0 * std::pow(static_cast<double>(k / 4), -1.13);
      break;
    case MeasureTag::M1:
    case MeasureTag::Directed:
      if (k < 1) throw std::invalid_argument("layer mass needs k >= 1");
      break;
  }
  const Site dir = measure.monotone_direction();
  std::vector<Site> ends(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    ends[t] = measure.sample(k, derive_seed(seed, t)).vertices.back();
  });
  std::unordered_map<std::int64_t, std::unordered_map<Site, std::uint64_t, SiteHash>> layers;
  for (const auto& v : ends) ++layers[dot(v, dir)][v];

  struct Cell {
    std::int64_t layer;
    std::uint64_t top;
    std::uint64_t count;
  };
  std::vector<Cell> cells;
  for (const auto& [layer, hist] : layers) {
    std::uint64_t top = 0, count = 0;
    for (const auto& [v, c] : hist) {
      top = std::max(top, c);
      count += c;
    }
    cells.push_back({layer, top, count});
  }
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.layer < b.layer; });
  const Cell* best = nullptr;
  for (const auto& c : cells) {
    if (c.count < min_layer_count) continue;
    if (!best || c.top * best->count > best->top * c.count) best = &c;
  }
  if (!best) {
    for (const auto& c : cells) {
      if (!best || c.count > best->count) best = &c;
    }
  }
  LayerMass out;
  out.layer = best->layer;
  out.layer_count = best->count;
  out.result.estimate = wilson_estimate(best->top, best->count, seed);
  out.result.bound = bound;
  out.result.vacuous = bound >= 1.0;
  return out;
}

std::string path_csv(const PathSample& path) {
  std::ostringstream os;
  const auto d = path.vertices.empty() ? 0 : path.vertices.front().size();
  os << "step";
  for (std::size_t i = 1; i <= d; ++i) os << ",x" << i;
  os << '\n';
  for (std::size_t k = 0; k < path.vertices.size(); ++k) {
    os << k;
    for (auto c : path.vertices[k]) os << ',' << c;
    os << '\n';
  }
  return os.str();
}

}  // namespace lrtrunc
