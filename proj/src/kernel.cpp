#include "lrtrunc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace lrtrunc {

SymmetryClass parse_symmetry(const std::string& name) {
  if (name == "mirror" || name == "mirror-symmetric") return SymmetryClass::Mirror;
  if (name == "isotropic" || name == "signed-permutation" ||
      name == "signed-permutation-invariant")
    return SymmetryClass::SignedPermutation;
  if (name == "none") return SymmetryClass::None;
  throw std::invalid_argument("unknown symmetry class '" + name + "'");
}

std::string to_string(SymmetryClass s) {
  switch (s) {
    case SymmetryClass::Mirror: return "mirror";
    case SymmetryClass::SignedPermutation: return "isotropic";
    case SymmetryClass::None: return "none";
  }
  return "?";
}

bool satisfies(SymmetryClass have, SymmetryClass need) {
  switch (need) {
    case SymmetryClass::None: return true;
    case SymmetryClass::Mirror: return have != SymmetryClass::None;
    case SymmetryClass::SignedPermutation: return have == SymmetryClass::SignedPermutation;
  }
  return false;
}

namespace detail {

class KernelNode {
 public:
  KernelNode(std::size_t dim, SymmetryClass symmetry) : dim_(dim), symmetry_(symmetry) {}
  virtual ~KernelNode() = default;

  virtual double value(const Site& x) const = 0;
  virtual std::optional<std::int64_t> support_radius() const = 0;
  virtual bool linf_radial() const = 0;
  virtual std::optional<Truncation> truncation() const { return std::nullopt; }
  virtual std::string describe() const = 0;

  std::size_t dim() const { return dim_; }
  SymmetryClass symmetry() const { return symmetry_; }

 private:
  std::size_t dim_;
  SymmetryClass symmetry_;
};

namespace {

double norm_value(const Site& x, Norm norm) {
  switch (norm) {
    case Norm::LInf: return static_cast<double>(linf_norm(x));
    case Norm::L1: return static_cast<double>(l1_norm(x));
    case Norm::L2: return l2_norm(x);
  }
  return 0.0;
}

struct FamilyEval {
  const Site& x;

  double operator()(const InversePower& f) const {
    double v = f.scale * std::pow(norm_value(x, f.norm), -f.exponent);
    if (f.cap) v = std::min(v, *f.cap);
    return v;
  }
  double operator()(const FlatBox& f) const {
    return linf_norm(x) <= f.radius ? f.value : 0.0;
  }
  double operator()(const Counterexample& f) const {
    std::size_t nonzero = 0;
    std::size_t axis = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != 0) {
        ++nonzero;
        axis = i;
      }
    }
    if (nonzero != 1) return 0.0;
    const auto k = std::abs(x[axis]);
    if (axis == 0) return k <= f.range ? 0.5 : 0.0;
    return k == 1 ? f.epsilon : 0.0;
  }
  double operator()(const TableFamily& f) const {
    auto it = f.entries.find(x);
    return it == f.entries.end() ? 0.0 : it->second;
  }
  double operator()(const CustomFamily& f) const { return f.value(x); }
};

class BaseNode final : public KernelNode {
 public:
  BaseNode(std::size_t dim, SymmetryClass symmetry, KernelFamily family)
      : KernelNode(dim, symmetry), family_(std::move(family)) {}

  double value(const Site& x) const override { return std::visit(FamilyEval{x}, family_); }

  std::optional<std::int64_t> support_radius() const override {
    return std::visit(
        [](const auto& f) -> std::optional<std::int64_t> {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, InversePower>) {
            return std::nullopt;
          } else if constexpr (std::is_same_v<F, FlatBox>) {
            return f.radius;
          } else if constexpr (std::is_same_v<F, Counterexample>) {
            return std::max<std::int64_t>(f.range, 1);
          } else if constexpr (std::is_same_v<F, TableFamily>) {
            std::int64_t r = 0;
            for (const auto& [x, p] : f.entries) r = std::max(r, linf_norm(x));
            return r;
          } else {
            return f.support_radius;
          }
        },
        family_);
  }

  bool linf_radial() const override {
    if (auto* ip = std::get_if<InversePower>(&family_)) return ip->norm == Norm::LInf;
    if (std::holds_alternative<FlatBox>(family_)) return true;
    if (auto* c = std::get_if<CustomFamily>(&family_)) return c->linf_radial;
    return false;
  }

  std::string describe() const override {
    std::ostringstream os;
    std::visit(
        [&](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, InversePower>) {
            os << "inverse-power(c=" << f.scale << ", s=" << f.exponent
               << ", norm=" << to_string(f.norm);
            if (f.cap) os << ", cap=" << *f.cap;
            os << ")";
          } else if constexpr (std::is_same_v<F, FlatBox>) {
            os << "flat-box(delta=" << f.value << ", M=" << f.radius << ")";
          } else if constexpr (std::is_same_v<F, Counterexample>) {
            os << "counterexample(N=" << f.range << ", eps=" << f.epsilon << ")";
          } else if constexpr (std::is_same_v<F, TableFamily>) {
            os << "table(" << f.entries.size() << " entries)";
          } else {
            os << "custom(" << f.label << ")";
          }
        },
        family_);
    os << " d=" << dim();
    return os.str();
  }

 private:
  KernelFamily family_;
};

class TruncatedNode final : public KernelNode {
 public:
  TruncatedNode(std::shared_ptr<const KernelNode> base, Truncation t)
      : KernelNode(base->dim(), base->symmetry()), base_(std::move(base)), trunc_(t) {}

  double value(const Site& x) const override {
    return within_radius(x, trunc_.radius, trunc_.norm) ? base_->value(x) : 0.0;
  }
  std::optional<std::int64_t> support_radius() const override {
    // Every norm here dominates l_inf, so the truncation radius bounds the support.
    auto r = base_->support_radius();
    return r ? std::min(*r, trunc_.radius) : trunc_.radius;
  }
  bool linf_radial() const override {
    return base_->linf_radial() && trunc_.norm == Norm::LInf;
  }
  std::optional<Truncation> truncation() const override { return trunc_; }
  std::string describe() const override {
    std::ostringstream os;
    os << base_->describe() << " truncated(N=" << trunc_.radius << ", "
       << to_string(trunc_.norm) << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const KernelNode> base_;
  Truncation trunc_;
};

double raw_layer_sum(const KernelNode& k, std::int64_t n) {
  const auto d = k.dim();
  if (n <= 0) return 0.0;
  if (k.linf_radial()) {
    Site x = unit_vector(d, 0, n);
    return k.value(x) * 2.0 * std::pow(static_cast<double>(2 * n + 1), static_cast<double>(d - 1));
  }
  if (auto r = k.support_radius(); r && n > *r) return 0.0;
  double s = 0.0;
  for (std::int64_t sign : {-1, 1}) {
    for_each_in_cube(d - 1, n, [&](const Site& rest) {
      Site x(d);
      x[0] = sign * n;
      std::copy(rest.begin(), rest.end(), x.begin() + 1);
      s += k.value(x);
    });
  }
  return s;
}

constexpr double kLayerTolerance = 1e-12;

class LayerNormalizedNode final : public KernelNode {
 public:
  LayerNormalizedNode(std::shared_ptr<const KernelNode> base, std::int64_t threshold)
      : KernelNode(base->dim(), base->symmetry() == SymmetryClass::None
                                     ? SymmetryClass::None
                                     : SymmetryClass::Mirror),
        base_(std::move(base)),
        threshold_(threshold) {}

  double value(const Site& x) const override {
    const double p = base_->value(x);
    if (p == 0.0) return 0.0;
    const auto n = linf_norm(x);
    if (n <= threshold_) return p;
    return p / scale(n);
  }
  std::optional<std::int64_t> support_radius() const override { return base_->support_radius(); }
  bool linf_radial() const override { return base_->linf_radial(); }
  std::optional<Truncation> truncation() const override { return base_->truncation(); }
  std::string describe() const override {
    return base_->describe() + " layer-normalized(Q=" + std::to_string(threshold_) + ")";
  }

 private:
  double scale(std::int64_t n) const {
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(n);
      if (it != cache_.end()) return it->second;
    }
    const double s = raw_layer_sum(*base_, n);
    const double sc = s > 1.0 + kLayerTolerance ? s : 1.0;
    std::lock_guard lock(mutex_);
    cache_.emplace(n, sc);
    return sc;
  }

  std::shared_ptr<const KernelNode> base_;
  std::int64_t threshold_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::int64_t, double> cache_;
};

void check_table_symmetry(std::size_t dim, const std::map<Site, double>& entries,
                          SymmetryClass symmetry) {
  auto lookup = [&](const Site& x) {
    auto it = entries.find(x);
    return it == entries.end() ? 0.0 : it->second;
  };
  for (const auto& [x, p] : entries) {
    if (x.size() != dim) throw std::invalid_argument("table entry has wrong dimension");
    if (is_zero(x)) throw std::invalid_argument("table entry at the zero displacement");
    if (!(p >= 0.0 && p < 1.0))
      throw std::domain_error("table probability outside [0,1): " + format_site(x));
    if (symmetry == SymmetryClass::None) continue;
    for (std::size_t i = 0; i < dim; ++i) {
      Site y = x;
      y[i] = -y[i];
      if (lookup(y) != p)
        throw std::invalid_argument("table is not mirror-symmetric at " + format_site(x));
    }
    if (symmetry == SymmetryClass::SignedPermutation) {
      for (std::size_t i = 0; i + 1 < dim; ++i) {
        Site y = x;
        std::swap(y[i], y[i + 1]);
        if (lookup(y) != p)
          throw std::invalid_argument("table is not permutation-invariant at " + format_site(x));
      }
    }
  }
}

}  // namespace
}  // namespace detail

Kernel::Kernel(std::shared_ptr<const detail::KernelNode> node) : node_(std::move(node)) {}

Kernel Kernel::inverse_power(std::size_t dim, double scale, double exponent, Norm norm,
                             std::optional<double> cap) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(scale >= 0.0)) throw std::invalid_argument("inverse-power scale must be >= 0");
  if (cap && !(*cap >= 0.0 && *cap < 1.0))
    throw std::domain_error("inverse-power cap must lie in [0,1)");
  return Kernel(std::make_shared<detail::BaseNode>(
      dim, SymmetryClass::SignedPermutation, InversePower{scale, exponent, norm, cap}));
}

Kernel Kernel::flat_box(std::size_t dim, double value, std::int64_t radius) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(value >= 0.0 && value < 1.0)) throw std::domain_error("flat-box value must lie in [0,1)");
  if (radius < 1) throw std::invalid_argument("flat-box radius must be >= 1");
  return Kernel(std::make_shared<detail::BaseNode>(dim, SymmetryClass::SignedPermutation,
                                                   FlatBox{value, radius}));
}

Kernel Kernel::counterexample(std::size_t dim, std::int64_t range, double epsilon) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (range < 1) throw std::invalid_argument("counterexample range must be >= 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::domain_error("counterexample epsilon must lie in [0,1)");
  return Kernel(std::make_shared<detail::BaseNode>(dim, SymmetryClass::Mirror,
                                                   Counterexample{range, epsilon}));
}

Kernel Kernel::table(std::size_t dim, std::map<Site, double> entries, SymmetryClass symmetry) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  detail::check_table_symmetry(dim, entries, symmetry);
  return Kernel(
      std::make_shared<detail::BaseNode>(dim, symmetry, TableFamily{std::move(entries)}));
}

Kernel Kernel::custom(std::size_t dim, CustomFamily family, SymmetryClass symmetry) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!family.value) throw std::invalid_argument("custom kernel needs a value function");
  return Kernel(std::make_shared<detail::BaseNode>(dim, symmetry, std::move(family)));
}

double Kernel::prob_at(const Site& x) const {
  if (x.size() != node_->dim())
    throw std::invalid_argument("displacement dimension " + std::to_string(x.size()) +
                                " does not match kernel dimension " +
                                std::to_string(node_->dim()));
  if (is_zero(x)) throw std::invalid_argument("p_x is undefined at the zero displacement");
  const double p = node_->value(x);
  if (!(p >= 0.0 && p < 1.0))
    throw std::domain_error("kernel value outside [0,1) at " + format_site(x));
  return p;
}

std::size_t Kernel::dimension() const { return node_->dim(); }
SymmetryClass Kernel::symmetry() const { return node_->symmetry(); }
std::optional<std::int64_t> Kernel::support_radius() const { return node_->support_radius(); }
bool Kernel::linf_radial() const { return node_->linf_radial(); }

double Kernel::radial_value(std::int64_t n) const {
  if (!linf_radial()) throw std::logic_error("radial_value on a non-radial kernel");
  if (n < 1) throw std::invalid_argument("radial layer must be >= 1");
  return prob_at(unit_vector(dimension(), 0, n));
}

std::optional<Truncation> Kernel::truncation() const { return node_->truncation(); }
std::string Kernel::describe() const { return node_->describe(); }

Kernel Kernel::truncated(std::int64_t radius, Norm norm) const {
  if (radius < 1) throw std::invalid_argument("truncation radius must be >= 1");
  return Kernel(std::make_shared<detail::TruncatedNode>(node_, Truncation{radius, norm}));
}

double expected_degree(const Kernel& kernel, std::int64_t radius) {
  if (radius < 1) throw std::invalid_argument("expected_degree radius must be >= 1");
  const auto d = kernel.dimension();
  std::int64_t r = radius;
  if (auto s = kernel.support_radius()) r = std::min(r, *s);
  double total = 0.0;
  if (kernel.linf_radial()) {
    for (std::int64_t n = 1; n <= r; ++n) {
      const double shell = std::pow(2.0 * n + 1.0, static_cast<double>(d)) -
                           std::pow(2.0 * n - 1.0, static_cast<double>(d));
      total += kernel.radial_value(n) * shell;
    }
    return total;
  }
  for_each_in_cube(d, r, [&](const Site& x) {
    if (!is_zero(x)) total += kernel.prob_at(x);
  });
  return total;
}

double layer_sum(const Kernel& kernel, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("layer index must be >= 1");
  const auto d = kernel.dimension();
  if (kernel.linf_radial()) {
    return kernel.radial_value(n) * 2.0 * std::pow(2.0 * n + 1.0, static_cast<double>(d - 1));
  }
  if (auto r = kernel.support_radius(); r && n > *r) return 0.0;
  double s = 0.0;
  for (std::int64_t sign : {-1, 1}) {
    for_each_in_cube(d - 1, n, [&](const Site& rest) {
      Site x(d);
      x[0] = sign * n;
      std::copy(rest.begin(), rest.end(), x.begin() + 1);
      s += kernel.prob_at(x);
    });
  }
  return s;
}

Kernel layer_normalize(const Kernel& kernel, std::int64_t threshold) {
  if (!satisfies(kernel.symmetry(), SymmetryClass::Mirror))
    throw std::invalid_argument("layer_normalize requires a mirror-symmetric kernel");
  return Kernel(std::make_shared<detail::LayerNormalizedNode>(kernel.node_, threshold));
}

SplitDomination verify_split_domination(double p, std::int64_t copies) {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("p must lie in [0,1)");
  if (copies < 1) throw std::invalid_argument("number of copies must be >= 1");
  SplitDomination r;
  r.rhs = p;
  if (copies == 1) {
    r.lhs = p;
  } else {
    const double n = static_cast<double>(copies);
    r.lhs = -std::expm1(n * std::log1p(-p / n));
  }
  r.holds = r.lhs <= r.rhs;
  return r;
}

}  // namespace lrtrunc
