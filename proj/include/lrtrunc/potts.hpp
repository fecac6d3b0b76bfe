#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "lrtrunc/kernel.hpp"
#include "lrtrunc/lattice.hpp"

namespace lrtrunc {

/// Ferromagnetic pair potential x -> phi(x) >= 0 on Z^d \ {0}.
class Potential {
 public:
  static Potential inverse_power(std::size_t dim, double scale, double exponent,
                                 Norm norm = Norm::LInf);
  static Potential flat_box(std::size_t dim, double value, std::int64_t radius);
  /// Throws if the entries do not have the declared symmetry.
  static Potential table(std::size_t dim, std::map<Site, double> entries,
                         SymmetryClass symmetry);
  static Potential custom(std::size_t dim, std::function<double(const Site&)> value,
                          SymmetryClass symmetry, std::optional<std::int64_t> support_radius,
                          bool linf_radial, std::string label);

  /// phi(x); throws for x = 0, a dimension mismatch, or a negative value.
  double at(const Site& x) const;

  std::size_t dimension() const { return dim_; }
  SymmetryClass symmetry() const { return symmetry_; }
  std::optional<std::int64_t> support_radius() const { return support_radius_; }
  bool linf_radial() const { return linf_radial_; }
  std::string describe() const { return label_; }

  /// phi(x) 1{||x||_norm <= radius}.
  Potential truncated(std::int64_t radius, Norm norm = Norm::LInf) const;

 private:
  std::size_t dim_ = 0;
  std::function<double(const Site&)> value_;
  SymmetryClass symmetry_ = SymmetryClass::None;
  std::optional<std::int64_t> support_radius_;
  bool linf_radial_ = false;
  std::string label_;
};

Potential truncate_potential(const Potential& potential, std::int64_t radius,
                             Norm norm = Norm::LInf);

struct PottsParams {
  int q = 2;
  double beta = 1.0;
  int boundary_spin = 1;

  void validate() const;
};

/// (1 - e^{-2 beta phi}) / (1 + (q - 1) e^{-2 beta phi}), kept strictly below 1.
double fk_probability(double beta_phi, int q);

/// Kernel with p_x = fk_probability(beta phi(x), q), inheriting the symmetry class.
Kernel map_to_percolation(const Potential& potential, const PottsParams& params);

/// 1/q + (q - 1)/q * theta.
double magnetization_lower_bound(double theta, int q);

/// T(3) = 1e400, T(d >= 4) = 1e26.
long double theorem_threshold(std::size_t dim);

struct TheoremBBound {
  long double interaction_sum = 0.0L;  ///< sum_{0 < ||x||_inf <= R} min(beta phi(x), 1)
  long double raw = 0.0L;              ///< 1 - exp(1 - sum / (2 q T(d)))
  double bound = 0.0;                  ///< max(raw, 0)
  bool vacuous = false;                ///< raw <= 0
  bool boundary = false;               ///< exponent exactly 0
};

/// Evaluates the bound for a given interaction sum.
TheoremBBound theorem_b_from_sum(long double interaction_sum, int q, std::size_t dim);

/// Radius-truncated sum; truncation only lowers the sum, so the bound is conservative.
TheoremBBound theorem_b_bound(const Potential& potential, double beta, int q,
                              std::int64_t radius);

}  // namespace lrtrunc
