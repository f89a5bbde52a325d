#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rootset/core.hpp"

namespace rootset {

/// Anything that behaves like a finite group with identity at index 0: Cayley tables,
/// coordinate-arithmetic oracles, tower levels.
template <class G>
concept FiniteGroup = requires(const G& g, ElementId a, ElementId b) {
  { g.order() } -> std::convertible_to<std::size_t>;
  { g.mul(a, b) } -> std::same_as<ElementId>;
  { g.inverse(a) } -> std::same_as<ElementId>;
  { g.name(a) } -> std::convertible_to<std::string>;
};

enum class AssociativityCheck { full, sampled };

inline const char* to_string(AssociativityCheck c) {
  return c == AssociativityCheck::full ? "full" : "sampled";
}

struct TableOptions {
  /// Groups up to this order get the exhaustive O(n^3) associativity check.
  std::size_t full_associativity_bound = 512;
  /// Above the bound, this many random triples per element are checked.
  std::size_t samples_per_element = 10;
  std::uint64_t seed = 0x5eed;
};

/// A finite group given by its full Cayley table. Immutable once constructed; the
/// constructor enforces the identity row/column, the Latin-square property, name
/// uniqueness, and associativity (exhaustive or sampled, see TableOptions).
class FiniteGroupTable {
 public:
  FiniteGroupTable(std::vector<std::string> names, std::vector<std::uint32_t> table,
                   const TableOptions& opts = {})
      : n_(names.size()), table_(std::move(table)), names_(std::move(names)) {
    validate(opts);
    inverse_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (table_[i * n_ + j] == 0) {
          inverse_[i] = static_cast<std::uint32_t>(j);
          break;
        }
      }
    }
  }

  /// Builds the table by evaluating `mul` on all index pairs.
  template <class Mul>
  static FiniteGroupTable from_function(std::vector<std::string> names, Mul&& mul,
                                        const TableOptions& opts = {}) {
    const std::size_t n = names.size();
    std::vector<std::uint32_t> t(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        t[i * n + j] = static_cast<std::uint32_t>(mul(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
    return FiniteGroupTable(std::move(names), std::move(t), opts);
  }

  std::size_t order() const noexcept { return n_; }

  ElementId mul(ElementId a, ElementId b) const {
    check(a);
    check(b);
    return ElementId(table_[a.index * n_ + b.index]);
  }

  ElementId inverse(ElementId a) const {
    check(a);
    return ElementId(inverse_[a.index]);
  }

  const std::string& name(ElementId a) const {
    check(a);
    return names_[a.index];
  }

  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<ElementId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return ElementId(it->second);
  }

  ElementId at(std::string_view name) const {
    if (auto e = find(name)) return *e;
    throw Error(Errc::unknown_element, "no element named '" + std::string(name) + "'");
  }

  /// Row-major raw table, table[i*n + j] = i*j.
  const std::vector<std::uint32_t>& raw() const noexcept { return table_; }

  AssociativityCheck associativity_check() const noexcept { return assoc_; }

  friend bool operator==(const FiniteGroupTable& a, const FiniteGroupTable& b) {
    return a.names_ == b.names_ && a.table_ == b.table_;
  }

 private:
  void check(ElementId a) const {
    if (a.index >= n_)
      throw Error(Errc::invalid_element,
                  "index " + std::to_string(a.index) + " in group of order " + std::to_string(n_));
  }

  std::uint32_t at_raw(std::size_t i, std::size_t j) const { return table_[i * n_ + j]; }

  void validate(const TableOptions& opts) {
    if (n_ == 0) throw Error(Errc::invalid_table, "group must have at least one element");
    if (table_.size() != n_ * n_)
      throw Error(Errc::invalid_table, "table has " + std::to_string(table_.size()) + " entries, expected " +
                                           std::to_string(n_ * n_));
    for (std::size_t i = 0; i < n_; ++i) {
      if (!by_name_.emplace(names_[i], static_cast<std::uint32_t>(i)).second)
        throw Error(Errc::invalid_table, "duplicate element name '" + names_[i] + "'");
      if (names_[i].empty()) throw Error(Errc::invalid_table, "empty element name at index " + std::to_string(i));
    }
    for (auto v : table_)
      if (v >= n_) throw Error(Errc::invalid_table, "table entry " + std::to_string(v) + " out of range");
    for (std::size_t i = 0; i < n_; ++i) {
      if (at_raw(0, i) != i || at_raw(i, 0) != i)
        throw Error(Errc::invalid_table, "row/column 0 is not the identity at " + std::to_string(i));
    }
    std::vector<std::uint32_t> seen(n_, UINT32_MAX);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        auto v = at_raw(i, j);
        if (seen[v] == i) throw Error(Errc::invalid_table, "row " + std::to_string(i) + " repeats " + std::to_string(v));
        seen[v] = static_cast<std::uint32_t>(i);
      }
    }
    std::fill(seen.begin(), seen.end(), UINT32_MAX);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < n_; ++i) {
        auto v = at_raw(i, j);
        if (seen[v] == j)
          throw Error(Errc::invalid_table, "column " + std::to_string(j) + " repeats " + std::to_string(v));
        seen[v] = static_cast<std::uint32_t>(j);
      }
    }
    auto assoc_ok = [&](std::size_t x, std::size_t y, std::size_t z) {
      if (at_raw(at_raw(x, y), z) != at_raw(x, at_raw(y, z)))
        throw Error(Errc::invalid_table, "associativity fails on (" + names_[x] + ", " + names_[y] + ", " +
                                             names_[z] + ")");
    };
    if (n_ <= opts.full_associativity_bound) {
      assoc_ = AssociativityCheck::full;
      for (std::size_t x = 1; x < n_; ++x)
        for (std::size_t y = 1; y < n_; ++y)
          for (std::size_t z = 1; z < n_; ++z) assoc_ok(x, y, z);
    } else {
      assoc_ = AssociativityCheck::sampled;
      std::mt19937_64 rng(opts.seed);
      std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
      for (std::size_t s = 0; s < opts.samples_per_element * n_; ++s) assoc_ok(pick(rng), pick(rng), pick(rng));
    }
  }

  std::size_t n_;
  std::vector<std::uint32_t> table_;
  std::vector<std::string> names_;
  std::vector<std::uint32_t> inverse_;
  std::unordered_map<std::string, std::uint32_t> by_name_;
  AssociativityCheck assoc_ = AssociativityCheck::full;
};

static_assert(FiniteGroup<FiniteGroupTable>);

}  // namespace rootset
