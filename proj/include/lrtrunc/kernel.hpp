#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "lrtrunc/lattice.hpp"

namespace lrtrunc {

enum class SymmetryClass {
  Mirror,             ///< invariant under flipping the sign of any coordinate
  SignedPermutation,  ///< additionally invariant under permuting coordinates
  None,
};

SymmetryClass parse_symmetry(const std::string& name);
std::string to_string(SymmetryClass s);

/// True if a kernel of class `have` satisfies the requirements of `need`.
bool satisfies(SymmetryClass have, SymmetryClass need);

/// scale * ||x||^-exponent, optionally capped at `cap`.
struct InversePower {
  double scale = 1.0;
  double exponent = 1.0;
  Norm norm = Norm::LInf;
  std::optional<double> cap;
};

/// `value` for 0 < ||x||_inf <= radius, 0 beyond.
struct FlatBox {
  double value = 0.0;
  std::int64_t radius = 1;
};

/// 1/2 on {k e_1 : 0 < |k| <= range}, epsilon on {+-e_i : i >= 2}, 0 elsewhere.
struct Counterexample {
  std::int64_t range = 1;
  double epsilon = 0.0;
};

/// Explicit finite support; displacements not listed have value 0.
struct TableFamily {
  std::map<Site, double> entries;
};

/// Arbitrary pointwise rule (used for mapped Potts potentials).
struct CustomFamily {
  std::function<double(const Site&)> value;
  std::string label;
  std::optional<std::int64_t> support_radius;
  bool linf_radial = false;
};

using KernelFamily =
    std::variant<InversePower, FlatBox, Counterexample, TableFamily, CustomFamily>;

struct Truncation {
  std::int64_t radius = 1;
  Norm norm = Norm::LInf;
};

namespace detail {
class KernelNode;
}

/// Symmetric connection-probability kernel x -> p_x on Z^d \ {0}.
///
/// Kernels are immutable, cheap to copy (shared structure) and safe to query
/// from any number of threads.
class Kernel {
 public:
  static Kernel inverse_power(std::size_t dim, double scale, double exponent,
                              Norm norm = Norm::LInf,
                              std::optional<double> cap = std::nullopt);
  static Kernel flat_box(std::size_t dim, double value, std::int64_t radius);
  static Kernel counterexample(std::size_t dim, std::int64_t range, double epsilon);
  /// Throws if the entries do not have the declared symmetry.
  static Kernel table(std::size_t dim, std::map<Site, double> entries,
                      SymmetryClass symmetry);
  static Kernel custom(std::size_t dim, CustomFamily family, SymmetryClass symmetry);

  /// p_x. Throws std::invalid_argument for x = 0 or a dimension mismatch and
  /// std::domain_error if the family would produce a value outside [0, 1).
  double prob_at(const Site& x) const;

  std::size_t dimension() const;
  SymmetryClass symmetry() const;

  /// Finite l_inf radius containing the support, if known.
  std::optional<std::int64_t> support_radius() const;

  /// True when p_x depends on x only through ||x||_inf.
  bool linf_radial() const;

  /// Value on the l_inf layer n; requires linf_radial().
  double radial_value(std::int64_t n) const;

  std::optional<Truncation> truncation() const;
  std::string describe() const;

  /// Kernel with p_x set to 0 whenever ||x||_norm > radius.
  Kernel truncated(std::int64_t radius, Norm norm = Norm::LInf) const;

 private:
  explicit Kernel(std::shared_ptr<const detail::KernelNode> node);
  std::shared_ptr<const detail::KernelNode> node_;

  friend Kernel layer_normalize(const Kernel& kernel, std::int64_t threshold);
};

/// Sum of p_x over 0 < ||x||_inf <= radius.
double expected_degree(const Kernel& kernel, std::int64_t radius);

/// Sum of p_x over {x : ||x||_inf = n, |x_1| = n}.
double layer_sum(const Kernel& kernel, std::int64_t n);

/// Divides every layer n > threshold by max(1, layer_sum(n)).
///
/// Requires a mirror-symmetric kernel. The result is pointwise dominated by
/// the input and every normalized layer sums to at most 1 (up to 1e-12
/// rounding, which is also the tolerance used to keep the map idempotent).
Kernel layer_normalize(const Kernel& kernel, std::int64_t threshold = 0);

struct SplitDomination {
  double lhs = 0.0;  ///< 1 - (1 - p/N)^N
  double rhs = 0.0;  ///< p
  bool holds = false;
};

/// Compares the edge marginal of the maximum of N independent p/N copies with p.
SplitDomination verify_split_domination(double p, std::int64_t copies);

}  // namespace lrtrunc
