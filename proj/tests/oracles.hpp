#pragma once

// Test-only reference computations. These deliberately avoid the library's
// algorithms: they touch a group only through mul/order/name.

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rootset/builders.hpp"
#include "rootset/group_table.hpp"

namespace oracle {

using rootset::ElementId;

/// Q8 from the unit quaternion multiplication rules, names 1 -1 i -i j -j k -k.
inline rootset::FiniteGroupTable quaternion8() {
  // unit u in {1,i,j,k} = {0,1,2,3}; unit_mul[u][v] = (sign, unit)
  const int sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  const int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  const std::vector<std::string> names{"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  std::vector<std::uint32_t> t(64);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int ua = a / 2, ub = b / 2;
      const int s = (a % 2 ? -1 : 1) * (b % 2 ? -1 : 1) * sign[ua][ub];
      t[a * 8 + b] = static_cast<std::uint32_t>(unit[ua][ub] * 2 + (s < 0 ? 1 : 0));
    }
  return rootset::FiniteGroupTable(names, t);
}

/// Heisenberg group mod p as (a, b, c) upper unitriangular matrices, index a*p^2 + b*p + c.
inline rootset::FiniteGroupTable heisenberg_matrices(std::uint32_t p) {
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < p * p * p; ++i)
    names.push_back("m" + std::to_string(i / (p * p)) + std::to_string(i / p % p) + std::to_string(i % p));
  return rootset::FiniteGroupTable::from_function(names, [p](std::uint32_t x, std::uint32_t y) {
    const std::uint32_t a = x / (p * p), b = x / p % p, c = x % p;
    const std::uint32_t d = y / (p * p), e = y / p % p, f = y % p;
    return ((a + d) % p) * p * p + ((b + e) % p) * p + (c + f + a * e) % p;
  });
}

template <class G>
std::uint64_t order_by_iteration(const G& g, ElementId x) {
  std::uint64_t n = 1;
  for (ElementId c = x; c != rootset::kIdentity; c = g.mul(c, x)) ++n;
  return n;
}

/// eta by the double loop: for each h, enumerate h^n for 0 <= n < |h| and test for g.
template <class G>
std::set<std::uint32_t> eta_naive(const G& g, ElementId target) {
  std::set<std::uint32_t> out;
  for (std::uint32_t h = 0; h < g.order(); ++h) {
    const auto o = order_by_iteration(g, ElementId(h));
    bool hit = false;
    ElementId c = rootset::kIdentity;
    for (std::uint64_t n = 0; n < o; ++n) {
      if (c == target) hit = true;
      c = g.mul(c, ElementId(h));
    }
    if (!hit) out.insert(h);
  }
  return out;
}

template <class G>
std::map<std::uint64_t, std::size_t> profile_naive(const G& g) {
  std::map<std::uint64_t, std::size_t> out;
  for (std::uint32_t h = 0; h < g.order(); ++h) ++out[order_by_iteration(g, ElementId(h))];
  return out;
}

template <class G>
bool associative_naive(const G& g) {
  for (std::uint32_t a = 0; a < g.order(); ++a)
    for (std::uint32_t b = 0; b < g.order(); ++b)
      for (std::uint32_t c = 0; c < g.order(); ++c)
        if (g.mul(g.mul(ElementId(a), ElementId(b)), ElementId(c)) != g.mul(ElementId(a), g.mul(ElementId(b), ElementId(c))))
          return false;
  return true;
}

}  // namespace oracle
