#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrtrunc {

/// A point (or displacement) of Z^d.
using Site = std::vector<std::int64_t>;

enum class Norm { LInf, L2, L1 };

Norm parse_norm(const std::string& name);
std::string to_string(Norm norm);

std::int64_t linf_norm(const Site& x);
std::int64_t l1_norm(const Site& x);
double l2_norm(const Site& x);

/// True when ||x||_norm <= radius, computed without rounding for L1/LInf and
/// with the squared norm for L2.
bool within_radius(const Site& x, std::int64_t radius, Norm norm);

bool is_zero(const Site& x);
Site unit_vector(std::size_t dim, std::size_t axis, std::int64_t scale = 1);
Site add(const Site& a, const Site& b);
Site subtract(const Site& a, const Site& b);
std::int64_t dot(const Site& a, const Site& b);

/// Lexicographically-first nonzero coordinate is positive.
bool in_positive_half_space(const Site& x);

std::string format_site(const Site& x, char sep = ' ');

struct SiteHash {
  std::size_t operator()(const Site& x) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto c : x) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Unordered pair of sites, stored with the smaller endpoint first.
struct Edge {
  Site a;
  Site b;
  Edge(Site x, Site y);
  bool operator==(const Edge& other) const = default;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept {
    SiteHash h;
    return h(e.a) * 1315423911u ^ h(e.b);
  }
};

/// Calls fn(x) for every x in {-radius..radius}^dim in lexicographic order.
void for_each_in_cube(std::size_t dim, std::int64_t radius,
                      const std::function<void(const Site&)>& fn);

}  // namespace lrtrunc
