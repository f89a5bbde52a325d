#pragma once

// Small named families used as fixtures and as GroupSpec kinds.

#include <numeric>

#include "rootset/kernel.hpp"

namespace rootset {

/// Z_n with element i named "i".
inline FiniteGroupTable cyclic(std::size_t n) {
  if (n == 0) throw Error(Errc::precondition, "cyclic group order must be >= 1");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return FiniteGroupTable::from_function(std::move(names), [n](std::uint32_t a, std::uint32_t b) { return (a + b) % n; });
}

/// Dihedral group of order 2n: elements s^f r^i, index f*n + i, names "e", "r3", "s", "sr3".
inline FiniteGroupTable dihedral(std::size_t n) {
  if (n < 1) throw Error(Errc::precondition, "dihedral parameter must be >= 1");
  std::vector<std::string> names;
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t i = 0; i < n; ++i) {
      std::string s = f ? "s" : "";
      if (i > 0) s += "r" + std::to_string(i);
      names.push_back(s.empty() ? "e" : s);
    }
  return FiniteGroupTable::from_function(std::move(names), [n](std::uint32_t a, std::uint32_t b) {
    const std::size_t fa = a / n, ia = a % n, fb = b / n, ib = b % n;
    const std::size_t i = ((fb ? n - ia : ia) + ib) % n;
    return ((fa ^ fb) * n + i);
  });
}

/// Generalized quaternion group of order 2^k (k >= 3): x^f c^i with |c| = 2^(k-1),
/// x^2 = c^(2^(k-2)), x^-1 c x = c^-1. Names "e", "c3", "x", "xc3".
inline FiniteGroupTable generalized_quaternion(std::size_t order) {
  auto pp = math::as_prime_power(order);
  if (!pp || pp->p != 2 || pp->exponent < 3)
    throw Error(Errc::precondition, "generalized quaternion order must be 2^k with k >= 3");
  const std::size_t n = order / 2;
  std::vector<std::string> names;
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t i = 0; i < n; ++i) {
      std::string s = f ? "x" : "";
      if (i > 0) s += "c" + std::to_string(i);
      names.push_back(s.empty() ? "e" : s);
    }
  return FiniteGroupTable::from_function(std::move(names), [n](std::uint32_t a, std::uint32_t b) {
    const std::size_t fa = a / n, ia = a % n, fb = b / n, ib = b % n;
    std::size_t i = ((fb ? n - ia : ia) + ib) % n;
    if (fa && fb) i = (i + n / 2) % n;
    return ((fa ^ fb) * n + i);
  });
}

/// Symmetric group on n <= 6 points; permutations in lexicographic order of one-line
/// notation (identity first), named "p" + one-line images, composed left to right.
inline FiniteGroupTable symmetric(std::size_t n) {
  if (n < 1 || n > 6) throw Error(Errc::precondition, "symmetric group degree must be in 1..6");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::map<std::vector<int>, std::uint32_t> index;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    index[perms[i]] = static_cast<std::uint32_t>(i);
    std::string s = "p";
    for (int v : perms[i]) s += std::to_string(v + 1);
    names.push_back(s);
  }
  return FiniteGroupTable::from_function(std::move(names), [&](std::uint32_t a, std::uint32_t b) {
    std::vector<int> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = perms[b][perms[a][i]];
    return index.at(c);
  });
}

}  // namespace rootset
