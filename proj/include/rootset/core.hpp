#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rootset {

/// Position of an element in its group's element list. Index 0 is always the identity.
struct ElementId {
  std::uint32_t index = 0;

  constexpr ElementId() = default;
  constexpr explicit ElementId(std::uint32_t i) : index(i) {}

  constexpr auto operator<=>(const ElementId&) const = default;
};

inline constexpr ElementId kIdentity{0};

inline std::ostream& operator<<(std::ostream& os, ElementId e) { return os << '#' << e.index; }

enum class Errc {
  invalid_element,
  invalid_table,
  not_subgroup,
  not_normal,
  not_bijective,
  not_homomorphic,
  precondition,
  hypothesis_failed,
  extension_conditions_failed,
  relation_failed,
  level_too_small,
  not_stable,
  coherence_violation,
  cocycle_violation,
  not_normalized,
  parse_error,
  unknown_element,
  out_of_range,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::invalid_element: return "invalid-element";
    case Errc::invalid_table: return "invalid-table";
    case Errc::not_subgroup: return "not-a-subgroup";
    case Errc::not_normal: return "not-normal";
    case Errc::not_bijective: return "not-bijective";
    case Errc::not_homomorphic: return "not-homomorphic";
    case Errc::precondition: return "precondition";
    case Errc::hypothesis_failed: return "hypothesis-failed";
    case Errc::extension_conditions_failed: return "extension-conditions-failed";
    case Errc::relation_failed: return "relation-failed";
    case Errc::level_too_small: return "level-too-small";
    case Errc::not_stable: return "not-stable";
    case Errc::coherence_violation: return "coherence-violation";
    case Errc::cocycle_violation: return "cocycle-violation";
    case Errc::not_normalized: return "not-normalized";
    case Errc::parse_error: return "parse-error";
    case Errc::unknown_element: return "unknown-element";
    case Errc::out_of_range: return "out-of-range";
  }
  return "unknown";
}

/// The library's single exception type. `code()` classifies the failure; the message
/// names the witness (element, pair, triple, level) when one exists.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A set of elements of a group of known order, kept as a sorted, duplicate-free index list.
class Subset {
 public:
  Subset() = default;

  Subset(std::size_t universe, std::vector<ElementId> members)
      : universe_(universe), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    for (auto m : members_) {
      if (m.index >= universe_)
        throw Error(Errc::invalid_element, "subset member " + std::to_string(m.index) +
                                               " outside group of order " + std::to_string(universe_));
    }
  }

  static Subset whole(std::size_t universe) {
    std::vector<ElementId> all(universe);
    for (std::size_t i = 0; i < universe; ++i) all[i] = ElementId(static_cast<std::uint32_t>(i));
    return Subset(universe, std::move(all));
  }

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<ElementId>& members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(ElementId e) const { return std::binary_search(members_.begin(), members_.end(), e); }

  bool is_subset_of(const Subset& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
  }

  friend bool operator==(const Subset& a, const Subset& b) {
    return a.universe_ == b.universe_ && a.members_ == b.members_;
  }

 private:
  std::size_t universe_ = 0;
  std::vector<ElementId> members_;
};

/// Images of every source element, indexed by source ElementId.
struct Homomorphism {
  std::size_t source_order = 0;
  std::size_t target_order = 0;
  std::vector<ElementId> images;

  ElementId operator()(ElementId e) const { return images.at(e.index); }

  Subset image_of(const Subset& s) const {
    std::vector<ElementId> out;
    out.reserve(s.size());
    for (auto e : s) out.push_back(images.at(e.index));
    return Subset(target_order, std::move(out));
  }
};

namespace math {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

struct PrimePower {
  std::uint64_t p = 0;
  unsigned exponent = 0;
};

/// n = p^e with p prime and e >= 1; nullopt otherwise (including n = 1).
inline std::optional<PrimePower> as_prime_power(std::uint64_t n) {
  if (n < 2) return std::nullopt;
  std::uint64_t p = 2;
  while (n % p != 0) ++p;
  unsigned e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  if (n != 1) return std::nullopt;
  return PrimePower{p, e};
}

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace math

}  // namespace rootset
