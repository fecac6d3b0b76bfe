#include "lrtrunc/potts.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lrtrunc {

namespace {

double norm_of(const Site& x, Norm norm) {
  switch (norm) {
    case Norm::LInf: return static_cast<double>(linf_norm(x));
    case Norm::L1: return static_cast<double>(l1_norm(x));
    case Norm::L2: return l2_norm(x);
  }
  return 0.0;
}

bool invariant_under_probes(const std::map<Site, double>& entries, SymmetryClass symmetry) {
  auto lookup = [&](const Site& x) {
    auto it = entries.find(x);
    return it == entries.end() ? 0.0 : it->second;
  };
  for (const auto& [x, v] : entries) {
    if (symmetry == SymmetryClass::None) break;
    for (std::size_t i = 0; i < x.size(); ++i) {
      Site y = x;
      y[i] = -y[i];
      if (lookup(y) != v) return false;
    }
    if (symmetry == SymmetryClass::SignedPermutation) {
      for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        Site y = x;
        std::swap(y[i], y[i + 1]);
        if (lookup(y) != v) return false;
      }
    }
  }
  return true;
}

}  // namespace

Potential Potential::inverse_power(std::size_t dim, double scale, double exponent, Norm norm) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (scale < 0.0) throw std::invalid_argument("potential scale must be nonnegative");
  std::ostringstream os;
  os << "inverse-power potential " << scale << " ||x||_" << to_string(norm) << "^-" << exponent;
  return custom(
      dim, [=](const Site& x) { return scale * std::pow(norm_of(x, norm), -exponent); },
      SymmetryClass::SignedPermutation, std::nullopt, norm == Norm::LInf, os.str());
}

Potential Potential::flat_box(std::size_t dim, double value, std::int64_t radius) {
  if (value < 0.0) throw std::invalid_argument("potential value must be nonnegative");
  if (radius < 1) throw std::invalid_argument("flat-box radius must be >= 1");
  std::ostringstream os;
  os << "flat-box potential " << value << " on ||x||_inf <= " << radius;
  return custom(
      dim, [=](const Site& x) { return linf_norm(x) <= radius ? value : 0.0; },
      SymmetryClass::SignedPermutation, radius, true, os.str());
}

Potential Potential::table(std::size_t dim, std::map<Site, double> entries,
                           SymmetryClass symmetry) {
  std::int64_t radius = 0;
  for (const auto& [x, v] : entries) {
    if (x.size() != dim || is_zero(x)) throw std::invalid_argument("bad table displacement");
    if (v < 0.0) throw std::invalid_argument("potential values must be nonnegative");
    radius = std::max(radius, linf_norm(x));
  }
  if (!invariant_under_probes(entries, symmetry))
    throw std::invalid_argument("table potential lacks the declared symmetry");
  auto shared = std::make_shared<const std::map<Site, double>>(std::move(entries));
  return custom(
      dim,
      [shared](const Site& x) {
        auto it = shared->find(x);
        return it == shared->end() ? 0.0 : it->second;
      },
      symmetry, std::max<std::int64_t>(radius, 1), false, "table potential");
}

Potential Potential::custom(std::size_t dim, std::function<double(const Site&)> value,
                            SymmetryClass symmetry, std::optional<std::int64_t> support_radius,
                            bool linf_radial, std::string label) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!value) throw std::invalid_argument("potential needs a value function");
  Potential p;
  p.dim_ = dim;
  p.value_ = std::move(value);
  p.symmetry_ = symmetry;
  p.support_radius_ = support_radius;
  p.linf_radial_ = linf_radial;
  p.label_ = std::move(label);
  return p;
}

double Potential::at(const Site& x) const {
  if (x.size() != dim_) throw std::invalid_argument("displacement dimension mismatch");
  if (is_zero(x)) throw std::invalid_argument("phi is undefined at the zero displacement");
  const double v = value_(x);
  if (!(v >= 0.0)) throw std::domain_error("potential value negative at " + format_site(x));
  return v;
}

Potential Potential::truncated(std::int64_t radius, Norm norm) const {
  if (radius < 1) throw std::invalid_argument("truncation radius must be >= 1");
  Potential p = *this;
  auto base = value_;
  p.value_ = [base, radius, norm](const Site& x) {
    return within_radius(x, radius, norm) ? base(x) : 0.0;
  };
  p.support_radius_ = support_radius_ ? std::min(*support_radius_, radius) : radius;
  p.linf_radial_ = linf_radial_ && norm == Norm::LInf;
  p.label_ = label_ + " truncated at " + to_string(norm) + " radius " + std::to_string(radius);
  return p;
}

Potential truncate_potential(const Potential& potential, std::int64_t radius, Norm norm) {
  return potential.truncated(radius, norm);
}

void PottsParams::validate() const {
  if (q < 2) throw std::invalid_argument("Potts q must be >= 2");
  if (!(beta > 0.0)) throw std::invalid_argument("Potts beta must be positive");
  if (boundary_spin < 1 || boundary_spin > q)
    throw std::invalid_argument("boundary spin must lie in 1..q");
}

double fk_probability(double beta_phi, int q) {
  if (q < 2) throw std::invalid_argument("Potts q must be >= 2");
  if (!(beta_phi >= 0.0)) throw std::invalid_argument("beta * phi must be nonnegative");
  const double t = std::exp(-2.0 * beta_phi);
  const double p = -std::expm1(-2.0 * beta_phi) / (1.0 + (q - 1) * t);
  return std::min(p, std::nextafter(1.0, 0.0));
}

Kernel map_to_percolation(const Potential& potential, const PottsParams& params) {
  params.validate();
  CustomFamily family;
  const double beta = params.beta;
  const int q = params.q;
  family.value = [potential, beta, q](const Site& x) {
    return fk_probability(beta * potential.at(x), q);
  };
  std::ostringstream os;
  os << "FK image of " << potential.describe() << " (q=" << q << ", beta=" << beta << ")";
  family.label = os.str();
  family.support_radius = potential.support_radius();
  family.linf_radial = potential.linf_radial();
  return Kernel::custom(potential.dimension(), std::move(family), potential.symmetry());
}

double magnetization_lower_bound(double theta, int q) {
  if (q < 2) throw std::invalid_argument("Potts q must be >= 2");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  return 1.0 / q + (q - 1.0) / q * theta;
}

long double theorem_threshold(std::size_t dim) {
  if (dim < 3) throw std::invalid_argument("the bound needs d >= 3");
  return dim == 3 ? 1e400L : 1e26L;
}

TheoremBBound theorem_b_from_sum(long double interaction_sum, int q, std::size_t dim) {
  if (q < 2) throw std::invalid_argument("Potts q must be >= 2");
  TheoremBBound out;
  out.interaction_sum = interaction_sum;
  const long double exponent = 1.0L - interaction_sum / (2.0L * q * theorem_threshold(dim));
  out.raw = -std::expm1(exponent);
  out.boundary = exponent == 0.0L;
  out.vacuous = out.raw <= 0.0L;
  out.bound = out.vacuous ? 0.0 : static_cast<double>(out.raw);
  return out;
}

TheoremBBound theorem_b_bound(const Potential& potential, double beta, int q,
                              std::int64_t radius) {
  if (radius < 1) throw std::invalid_argument("radius must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const auto d = potential.dimension();
  if (d < 3) throw std::invalid_argument("the bound needs d >= 3");
  long double sum = 0.0L;
  if (potential.linf_radial()) {
    for (std::int64_t n = 1; n <= radius; ++n) {
      const double v = std::min(beta * potential.at(unit_vector(d, 0, n)), 1.0);
      const long double shell = std::pow(2.0L * n + 1.0L, static_cast<long double>(d)) -
                                std::pow(2.0L * n - 1.0L, static_cast<long double>(d));
      sum += shell * v;
    }
  } else {
    for_each_in_cube(d, radius, [&](const Site& x) {
      if (!is_zero(x)) sum += std::min(beta * potential.at(x), 1.0);
    });
  }
  return theorem_b_from_sum(sum, q, d);
}

}  // namespace lrtrunc
