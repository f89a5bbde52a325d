#pragma once

// Structural subroutines shared by every downstream module. All algorithms are written
// against the FiniteGroup concept so they run unchanged on Cayley tables and on
// coordinate oracles (tower levels, large tree groups).

#include <deque>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "rootset/group_table.hpp"

namespace rootset {

namespace detail {

/// Membership marks sized to the group, falling back to a hash set for huge oracle groups.
class MarkSet {
 public:
  explicit MarkSet(std::size_t universe) : dense_(universe <= (std::size_t{1} << 24)) {
    if (dense_) bits_.assign(universe, 0);
  }
  bool test(ElementId e) const { return dense_ ? bits_[e.index] != 0 : sparse_.count(e.index) != 0; }
  /// Returns true when newly inserted.
  bool insert(ElementId e) {
    if (dense_) {
      if (bits_[e.index]) return false;
      bits_[e.index] = 1;
      return true;
    }
    return sparse_.insert(e.index).second;
  }

 private:
  bool dense_;
  std::vector<char> bits_;
  std::unordered_set<std::uint32_t> sparse_;
};

inline std::vector<ElementId> all_elements(std::size_t n) {
  std::vector<ElementId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = ElementId(static_cast<std::uint32_t>(i));
  return v;
}

}  // namespace detail

template <FiniteGroup G>
ElementId mul(const G& g, ElementId a, ElementId b) {
  return g.mul(a, b);
}

/// g^n for any integer n.
template <FiniteGroup G>
ElementId power(const G& grp, ElementId g, std::int64_t n) {
  if (n < 0) {
    g = grp.inverse(g);
    n = -n;
  }
  ElementId result = kIdentity;
  ElementId base = g;
  while (n > 0) {
    if (n & 1) result = grp.mul(result, base);
    base = grp.mul(base, base);
    n >>= 1;
  }
  return result;
}

template <FiniteGroup G>
std::uint64_t order_of(const G& grp, ElementId g) {
  if (g.index >= grp.order()) throw Error(Errc::invalid_element, "index " + std::to_string(g.index));
  std::uint64_t n = 1;
  ElementId cur = g;
  while (cur != kIdentity) {
    cur = grp.mul(cur, g);
    ++n;
    if (n > grp.order()) throw std::logic_error("element order exceeds group order: table is not a group");
  }
  if (grp.order() % n != 0) throw std::logic_error("element order does not divide group order");
  return n;
}

/// Powers g^0, g^1, ..., g^(|g|-1) in exponent order.
template <FiniteGroup G>
std::vector<ElementId> powers_of(const G& grp, ElementId g) {
  std::vector<ElementId> out{kIdentity};
  for (ElementId cur = g; cur != kIdentity; cur = grp.mul(cur, g)) {
    out.push_back(cur);
    if (out.size() > grp.order()) throw std::logic_error("element order exceeds group order");
  }
  return out;
}

template <FiniteGroup G>
Subset cyclic_subgroup(const G& grp, ElementId g) {
  return Subset(grp.order(), powers_of(grp, g));
}

/// Least subgroup containing `gens`, by breadth-first right multiplication from the identity.
template <FiniteGroup G>
Subset closure(const G& grp, const std::vector<ElementId>& gens) {
  detail::MarkSet seen(grp.order());
  std::vector<ElementId> members{kIdentity};
  seen.insert(kIdentity);
  for (std::size_t head = 0; head < members.size(); ++head) {
    const ElementId cur = members[head];
    for (auto s : gens) {
      const ElementId nxt = grp.mul(cur, s);
      if (seen.insert(nxt)) members.push_back(nxt);
    }
  }
  return Subset(grp.order(), std::move(members));
}

template <FiniteGroup G>
Subset closure(const G& grp, const Subset& s) {
  return closure(grp, s.members());
}

template <FiniteGroup G>
ElementId commutator(const G& grp, ElementId a, ElementId b) {
  return grp.mul(grp.mul(grp.inverse(a), grp.inverse(b)), grp.mul(a, b));
}

template <FiniteGroup G>
bool commutes(const G& grp, ElementId a, ElementId b) {
  return grp.mul(a, b) == grp.mul(b, a);
}

template <FiniteGroup G>
Subset centralizer(const G& grp, const Subset& s) {
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < grp.order(); ++i) {
    const ElementId g(static_cast<std::uint32_t>(i));
    bool ok = true;
    for (auto x : s) {
      if (!commutes(grp, g, x)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(g);
  }
  return Subset(grp.order(), std::move(out));
}

template <FiniteGroup G>
Subset center(const G& grp) {
  return centralizer(grp, Subset::whole(grp.order()));
}

template <FiniteGroup G>
Subset derived_subgroup(const G& grp) {
  std::vector<ElementId> comms;
  detail::MarkSet seen(grp.order());
  for (std::size_t i = 0; i < grp.order(); ++i)
    for (std::size_t j = 0; j < grp.order(); ++j) {
      auto c = commutator(grp, ElementId(static_cast<std::uint32_t>(i)), ElementId(static_cast<std::uint32_t>(j)));
      if (seen.insert(c)) comms.push_back(c);
    }
  return closure(grp, comms);
}

/// Subgroup generated by the elements of order exactly p.
template <FiniteGroup G>
Subset omega1(const G& grp, std::uint64_t p) {
  if (!math::is_prime(p)) throw Error(Errc::precondition, std::to_string(p) + " is not prime");
  std::vector<ElementId> gens;
  for (std::size_t i = 1; i < grp.order(); ++i) {
    const ElementId g(static_cast<std::uint32_t>(i));
    if (order_of(grp, g) == p) gens.push_back(g);
  }
  return closure(grp, gens);
}

template <FiniteGroup G>
std::uint64_t exponent(const G& grp) {
  std::uint64_t e = 1;
  for (std::size_t i = 0; i < grp.order(); ++i) e = std::lcm(e, order_of(grp, ElementId(static_cast<std::uint32_t>(i))));
  return e;
}

/// Element order -> number of elements of that order.
template <FiniteGroup G>
std::map<std::uint64_t, std::size_t> order_profile(const G& grp) {
  std::map<std::uint64_t, std::size_t> out;
  for (std::size_t i = 0; i < grp.order(); ++i) ++out[order_of(grp, ElementId(static_cast<std::uint32_t>(i)))];
  return out;
}

template <FiniteGroup G>
bool is_abelian(const G& grp) {
  for (std::size_t i = 0; i < grp.order(); ++i)
    for (std::size_t j = i + 1; j < grp.order(); ++j)
      if (!commutes(grp, ElementId(static_cast<std::uint32_t>(i)), ElementId(static_cast<std::uint32_t>(j))))
        return false;
  return true;
}

/// Throws not-a-subgroup naming the first pair whose product escapes `s`.
template <FiniteGroup G>
void require_subgroup(const G& grp, const Subset& s) {
  if (!s.contains(kIdentity)) throw Error(Errc::not_subgroup, "identity missing");
  for (auto a : s)
    for (auto b : s)
      if (!s.contains(grp.mul(a, b)))
        throw Error(Errc::not_subgroup, "product of " + std::string(grp.name(a)) + " and " + std::string(grp.name(b)) +
                                            " leaves the set");
}

/// Throws not-normal naming the conjugating element and the escaping member.
template <FiniteGroup G>
void require_normal(const G& grp, const Subset& n) {
  for (std::size_t i = 0; i < grp.order(); ++i) {
    const ElementId g(static_cast<std::uint32_t>(i));
    const ElementId gi = grp.inverse(g);
    for (auto x : n) {
      if (!n.contains(grp.mul(grp.mul(gi, x), g)))
        throw Error(Errc::not_normal, "conjugating " + std::string(grp.name(x)) + " by " + std::string(grp.name(g)) +
                                          " leaves the subgroup");
    }
  }
}

/// Right cosets gN = Ng of a normal subgroup. Cosets are numbered by increasing minimal
/// representative, so coset 0 is N itself.
struct CosetDecomposition {
  std::vector<ElementId> representatives;  // minimal index in each coset
  std::vector<std::uint32_t> coset_of;     // element index -> coset number
};

template <FiniteGroup G>
CosetDecomposition coset_decomposition(const G& grp, const Subset& n) {
  CosetDecomposition out;
  out.coset_of.assign(grp.order(), UINT32_MAX);
  for (std::size_t i = 0; i < grp.order(); ++i) {
    if (out.coset_of[i] != UINT32_MAX) continue;
    const ElementId rep(static_cast<std::uint32_t>(i));
    const auto idx = static_cast<std::uint32_t>(out.representatives.size());
    out.representatives.push_back(rep);
    for (auto x : n) out.coset_of[grp.mul(rep, x).index] = idx;
  }
  return out;
}

struct Quotient {
  FiniteGroupTable group;
  Homomorphism projection;
};

/// G/N with coset names "[rep]" built from minimal-index representatives.
template <FiniteGroup G>
Quotient quotient(const G& grp, const Subset& n) {
  if (n.universe() != grp.order()) throw Error(Errc::invalid_element, "subset belongs to a different group");
  require_subgroup(grp, n);
  require_normal(grp, n);
  auto cosets = coset_decomposition(grp, n);
  const std::size_t m = cosets.representatives.size();
  std::vector<std::string> names;
  names.reserve(m);
  for (auto r : cosets.representatives) names.push_back("[" + std::string(grp.name(r)) + "]");
  auto table = FiniteGroupTable::from_function(std::move(names), [&](std::uint32_t i, std::uint32_t j) {
    return cosets.coset_of[grp.mul(cosets.representatives[i], cosets.representatives[j]).index];
  });
  Homomorphism proj{grp.order(), m, {}};
  proj.images.reserve(grp.order());
  for (auto c : cosets.coset_of) proj.images.emplace_back(c);
  return {std::move(table), std::move(proj)};
}

/// Componentwise product; element (g, h) has index g*|H| + h and name "g|h".
template <FiniteGroup G, FiniteGroup H>
FiniteGroupTable direct_product(const G& g, const H& h) {
  const std::size_t nh = h.order();
  std::vector<std::string> names;
  names.reserve(g.order() * nh);
  for (std::size_t i = 0; i < g.order(); ++i)
    for (std::size_t j = 0; j < nh; ++j)
      names.push_back(std::string(g.name(ElementId(static_cast<std::uint32_t>(i)))) + "|" +
                      std::string(h.name(ElementId(static_cast<std::uint32_t>(j)))));
  return FiniteGroupTable::from_function(std::move(names), [&](std::uint32_t a, std::uint32_t b) {
    const auto ga = g.mul(ElementId(static_cast<std::uint32_t>(a / nh)), ElementId(static_cast<std::uint32_t>(b / nh)));
    const auto ha = h.mul(ElementId(static_cast<std::uint32_t>(a % nh)), ElementId(static_cast<std::uint32_t>(b % nh)));
    return ga.index * nh + ha.index;
  });
}

struct HomomorphismCheck {
  bool full = true;  // false when only a random sample of pairs was checked
  std::optional<std::pair<ElementId, ElementId>> witness;
};

/// Checks images[ab] = images[a]images[b]. Exhaustive while |G|^2 <= pair_bound, else sampled.
template <FiniteGroup S, FiniteGroup T>
HomomorphismCheck check_homomorphism(const S& src, const T& tgt, const std::vector<ElementId>& images,
                                     std::size_t pair_bound = std::size_t{1} << 22, std::uint64_t seed = 0x5eed) {
  HomomorphismCheck out;
  const std::size_t n = src.order();
  auto bad = [&](std::size_t a, std::size_t b) {
    const ElementId ea(static_cast<std::uint32_t>(a)), eb(static_cast<std::uint32_t>(b));
    return images[src.mul(ea, eb).index] != tgt.mul(images[a], images[b]);
  };
  if (n * n <= pair_bound) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (bad(a, b)) {
          out.witness = {ElementId(static_cast<std::uint32_t>(a)), ElementId(static_cast<std::uint32_t>(b))};
          return out;
        }
  } else {
    out.full = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < 64 * n; ++s) {
      auto a = pick(rng), b = pick(rng);
      if (bad(a, b)) {
        out.witness = {ElementId(static_cast<std::uint32_t>(a)), ElementId(static_cast<std::uint32_t>(b))};
        return out;
      }
    }
  }
  return out;
}

/// Validates `map` as an automorphism of `grp`: length, bijectivity, then the
/// homomorphism law on all pairs (sampled for very large groups).
template <FiniteGroup G>
Homomorphism validate_automorphism(const G& grp, const std::vector<ElementId>& map) {
  const std::size_t n = grp.order();
  if (map.size() != n)
    throw Error(Errc::precondition, "map has " + std::to_string(map.size()) + " entries for a group of order " +
                                        std::to_string(n));
  std::vector<char> hit(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (map[i].index >= n) throw Error(Errc::invalid_element, "image index " + std::to_string(map[i].index));
    if (hit[map[i].index]) throw Error(Errc::not_bijective, std::string(grp.name(map[i])) + " is hit twice");
    hit[map[i].index] = 1;
  }
  if (map[0] != kIdentity) throw Error(Errc::not_homomorphic, "identity is not fixed");
  auto chk = check_homomorphism(grp, grp, map);
  if (chk.witness)
    throw Error(Errc::not_homomorphic, "law fails on pair (" + std::string(grp.name(chk.witness->first)) + ", " +
                                           std::string(grp.name(chk.witness->second)) + ")");
  return Homomorphism{n, n, map};
}

/// Extends an assignment on generators of `src` to a homomorphism into `tgt`, walking
/// words breadth-first. Throws not-homomorphic if two words for one element disagree.
template <FiniteGroup S, FiniteGroup T>
Homomorphism extend_from_generators(const S& src, const T& tgt, const std::vector<ElementId>& gens,
                                    const std::vector<ElementId>& images) {
  if (gens.size() != images.size()) throw Error(Errc::precondition, "generator/image count mismatch");
  std::vector<ElementId> img(src.order());
  std::vector<char> known(src.order(), 0);
  known[0] = 1;
  std::vector<ElementId> queue{kIdentity};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const ElementId cur = queue[head];
    for (std::size_t k = 0; k < gens.size(); ++k) {
      const ElementId nxt = src.mul(cur, gens[k]);
      const ElementId val = tgt.mul(img[cur.index], images[k]);
      if (!known[nxt.index]) {
        known[nxt.index] = 1;
        img[nxt.index] = val;
        queue.push_back(nxt);
      } else if (img[nxt.index] != val) {
        throw Error(Errc::not_homomorphic, "generator images are inconsistent at " + std::string(src.name(nxt)));
      }
    }
  }
  if (queue.size() != src.order()) throw Error(Errc::precondition, "elements do not generate the group");
  return Homomorphism{src.order(), tgt.order(), std::move(img)};
}

/// Materializes a subgroup as its own Cayley table (identity first, then increasing index).
struct SubgroupTable {
  FiniteGroupTable group;
  Homomorphism inclusion;
};

template <FiniteGroup G>
SubgroupTable subgroup_table(const G& grp, const Subset& s) {
  require_subgroup(grp, s);
  const auto& mem = s.members();  // sorted, identity first
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < mem.size(); ++i) {
    local.emplace(mem[i].index, static_cast<std::uint32_t>(i));
    names.emplace_back(grp.name(mem[i]));
  }
  auto table = FiniteGroupTable::from_function(std::move(names), [&](std::uint32_t a, std::uint32_t b) {
    return local.at(grp.mul(mem[a], mem[b]).index);
  });
  return {std::move(table), Homomorphism{mem.size(), grp.order(), mem}};
}

/// Full Cayley table of an oracle group.
template <FiniteGroup G>
FiniteGroupTable materialize(const G& grp, const TableOptions& opts = {}) {
  std::vector<std::string> names;
  names.reserve(grp.order());
  for (std::size_t i = 0; i < grp.order(); ++i) names.emplace_back(grp.name(ElementId(static_cast<std::uint32_t>(i))));
  return FiniteGroupTable::from_function(
      std::move(names),
      [&](std::uint32_t a, std::uint32_t b) { return grp.mul(ElementId(a), ElementId(b)).index; }, opts);
}

}  // namespace rootset
