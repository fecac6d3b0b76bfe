#include "lrtrunc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace lrtrunc {

Norm parse_norm(const std::string& name) {
  if (name == "linf" || name == "inf" || name == "max") return Norm::LInf;
  if (name == "l2" || name == "euclidean") return Norm::L2;
  if (name == "l1" || name == "manhattan") return Norm::L1;
  throw std::invalid_argument("unknown norm '" + name + "'");
}

std::string to_string(Norm norm) {
  switch (norm) {
    case Norm::LInf: return "linf";
    case Norm::L2: return "l2";
    case Norm::L1: return "l1";
  }
  return "?";
}

std::int64_t linf_norm(const Site& x) {
  std::int64_t m = 0;
  for (auto c : x) m = std::max(m, std::abs(c));
  return m;
}

std::int64_t l1_norm(const Site& x) {
  std::int64_t s = 0;
  for (auto c : x) s += std::abs(c);
  return s;
}

double l2_norm(const Site& x) {
  double s = 0.0;
  for (auto c : x) s += static_cast<double>(c) * static_cast<double>(c);
  return std::sqrt(s);
}

bool within_radius(const Site& x, std::int64_t radius, Norm norm) {
  switch (norm) {
    case Norm::LInf: return linf_norm(x) <= radius;
    case Norm::L1: return l1_norm(x) <= radius;
    case Norm::L2: {
      std::int64_t s = 0;
      for (auto c : x) s += c * c;
      return s <= radius * radius;
    }
  }
  return false;
}

bool is_zero(const Site& x) {
  return std::all_of(x.begin(), x.end(), [](auto c) { return c == 0; });
}

Site unit_vector(std::size_t dim, std::size_t axis, std::int64_t scale) {
  Site e(dim, 0);
  e.at(axis) = scale;
  return e;
}

Site add(const Site& a, const Site& b) {
  Site r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Site subtract(const Site& a, const Site& b) {
  Site r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

std::int64_t dot(const Site& a, const Site& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool in_positive_half_space(const Site& x) {
  for (auto c : x) {
    if (c != 0) return c > 0;
  }
  return false;
}

std::string format_site(const Site& x, char sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << sep;
    os << x[i];
  }
  return os.str();
}

Edge::Edge(Site x, Site y) {
  if (y < x) std::swap(x, y);
  a = std::move(x);
  b = std::move(y);
}

void for_each_in_cube(std::size_t dim, std::int64_t radius,
                      const std::function<void(const Site&)>& fn) {
  if (radius < 0) return;
  Site x(dim, -radius);
  while (true) {
    fn(x);
    std::size_t i = dim;
    while (i > 0) {
      --i;
      if (x[i] < radius) {
        ++x[i];
        break;
      }
      x[i] = -radius;
      if (i == 0) return;
    }
    if (dim == 0) return;
  }
}

}  // namespace lrtrunc
