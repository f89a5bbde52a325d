#pragma once

// eta(g) = { h : g not in <h> }, the non-roots of g, and executable forms of the
// classical facts about it on finite groups.

#include <boost/dynamic_bitset.hpp>

#include "rootset/kernel.hpp"
#include "rootset/report.hpp"

namespace rootset {

using Bitset = boost::dynamic_bitset<std::uint64_t>;

namespace detail {

/// Visits every cyclic subgroup once as (powers in exponent order, generators).
/// A cyclic subgroup of order m has the phi(m) generators h^j with gcd(j, m) = 1.
template <FiniteGroup G, class Fn>
void for_each_cyclic_subgroup(const G& grp, Fn&& fn) {
  std::vector<char> visited(grp.order(), 0);
  std::vector<ElementId> gens;
  for (std::size_t i = 0; i < grp.order(); ++i) {
    if (visited[i]) continue;
    const auto pw = powers_of(grp, ElementId(static_cast<std::uint32_t>(i)));
    const std::size_t m = pw.size();
    gens.clear();
    for (std::size_t j = 1; j <= m; ++j) {
      if (std::gcd(j, m) == 1) {
        const ElementId g = pw[j % m];
        gens.push_back(g);
        visited[g.index] = 1;
      }
    }
    fn(pw, gens);
  }
}

inline Bitset to_bitset(const Subset& s) {
  Bitset b(s.universe());
  for (auto e : s) b.set(e.index);
  return b;
}

inline Subset to_subset(const Bitset& b) {
  std::vector<ElementId> out;
  out.reserve(b.count());
  for (auto i = b.find_first(); i != Bitset::npos; i = b.find_next(i)) out.emplace_back(static_cast<std::uint32_t>(i));
  return Subset(b.size(), std::move(out));
}

}  // namespace detail

/// For each target g, the bitset of its roots { h : g in <h> }.
template <FiniteGroup G>
std::vector<Bitset> roots_of(const G& grp, const std::vector<ElementId>& targets) {
  std::vector<std::int64_t> slot(grp.order(), -1);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t].index >= grp.order()) throw Error(Errc::invalid_element, "target index " + std::to_string(targets[t].index));
    slot[targets[t].index] = static_cast<std::int64_t>(t);
  }
  std::vector<Bitset> roots(targets.size(), Bitset(grp.order()));
  detail::for_each_cyclic_subgroup(grp, [&](const std::vector<ElementId>& pw, const std::vector<ElementId>& gens) {
    for (auto q : pw) {
      if (slot[q.index] < 0) continue;
      auto& r = roots[static_cast<std::size_t>(slot[q.index])];
      for (auto h : gens) r.set(h.index);
    }
  });
  // Duplicate targets share the first slot's result.
  for (std::size_t t = 0; t < targets.size(); ++t) roots[t] = roots[static_cast<std::size_t>(slot[targets[t].index])];
  return roots;
}

/// Non-root bitsets eta(g) for the given targets.
template <FiniteGroup G>
std::vector<Bitset> eta_bitsets(const G& grp, const std::vector<ElementId>& targets) {
  auto r = roots_of(grp, targets);
  for (auto& b : r) b.flip();
  return r;
}

/// Root relation for every element of the group: roots[g] = { h : g in <h> }.
template <FiniteGroup G>
std::vector<Bitset> root_relation(const G& grp) {
  return roots_of(grp, detail::all_elements(grp.order()));
}

struct EtaSet {
  ElementId target;
  Subset members;
};

template <FiniteGroup G>
EtaSet eta(const G& grp, ElementId g) {
  auto b = eta_bitsets(grp, {g});
  return EtaSet{g, detail::to_subset(b[0])};
}

inline constexpr const char* kDegeneracyWarning =
    "degenerate-for-finite-groups: every finite group has K = D = G; the tower-level notions are the real object";

struct DegenerateResult {
  Subset set;
  std::string warning = kDegeneracyWarning;
};

/// { g : |eta(g)| < |G| }, evaluated literally. Always the whole group when G is finite.
template <FiniteGroup G>
DegenerateResult k_finite(const G& grp) {
  auto roots = root_relation(grp);
  std::vector<ElementId> out;
  for (std::size_t g = 0; g < grp.order(); ++g)
    if (grp.order() - roots[g].count() < grp.order()) out.emplace_back(static_cast<std::uint32_t>(g));
  return {Subset(grp.order(), std::move(out))};
}

/// Intersection of all subgroups equipotent with G. Only G itself qualifies when G is finite.
template <FiniteGroup G>
DegenerateResult d_finite(const G& grp) {
  return {Subset::whole(grp.order())};
}

/// Closed-form decision of whether a*h is a root of a, given [h, a] = 1, h in eta(a) and
/// |a| = p^n: true iff gcd(p, |<h>| / |<h> cap <a>|) = 1.
template <FiniteGroup G>
bool lemma38_decide(const G& grp, ElementId a, ElementId h) {
  if (!commutes(grp, a, h))
    throw Error(Errc::precondition, "non-commuting: " + std::string(grp.name(h)) + " and " + std::string(grp.name(a)));
  const auto ha = cyclic_subgroup(grp, h);
  const auto aa = cyclic_subgroup(grp, a);
  if (ha.contains(a))
    throw Error(Errc::precondition, "h-not-in-eta: " + std::string(grp.name(h)) + " is a root of " + std::string(grp.name(a)));
  const auto pp = math::as_prime_power(aa.size());
  if (!pp) throw Error(Errc::precondition, "a-not-prime-power: |" + std::string(grp.name(a)) + "| = " + std::to_string(aa.size()));
  std::size_t meet = 0;
  for (auto x : ha)
    if (aa.contains(x)) ++meet;
  const std::size_t ratio = ha.size() / meet;
  return std::gcd<std::uint64_t, std::uint64_t>(pp->p, ratio) == 1;
}

struct PPrimePart {
  Subset set;
  bool is_subgroup = true;
  std::optional<std::pair<ElementId, ElementId>> witness;  // product escaping the set
};

/// The p'-elements { g : gcd(|g|, p) = 1 }, with closure under multiplication reported.
template <FiniteGroup G>
PPrimePart p_prime_part(const G& grp, std::uint64_t p) {
  if (!math::is_prime(p)) throw Error(Errc::precondition, std::to_string(p) + " is not prime");
  std::vector<ElementId> mem;
  for (std::size_t i = 0; i < grp.order(); ++i) {
    const ElementId g(static_cast<std::uint32_t>(i));
    if (std::gcd<std::uint64_t, std::uint64_t>(order_of(grp, g), p) == 1) mem.push_back(g);
  }
  PPrimePart out{Subset(grp.order(), std::move(mem)), true, std::nullopt};
  for (auto a : out.set)
    for (auto b : out.set)
      if (!out.set.contains(grp.mul(a, b))) {
        out.is_subgroup = false;
        out.witness = {a, b};
        return out;
      }
  return out;
}

namespace detail {

template <FiniteGroup G>
std::string names_of(const G& grp, std::initializer_list<ElementId> xs) {
  std::string s = "(";
  bool first = true;
  for (auto x : xs) {
    if (!first) s += ", ";
    s += grp.name(x);
    first = false;
  }
  return s + ")";
}

}  // namespace detail

/// eta(1) empty; eta(x^-1) = eta(x); eta(x1 x2) within eta(x1) u eta(x2); eta(x) contains G - C(x).
template <FiniteGroup G>
LemmaReport check_lemma31(const G& grp) {
  const std::size_t n = grp.order();
  const auto roots = root_relation(grp);
  LemmaReport rep{"3.1", {}};

  CheckResult c1{"3.1(i) eta(1) is empty", CheckStatus::pass, 1, std::nullopt, {}};
  if (roots[0].count() != n) {
    c1.status = CheckStatus::fail;
    c1.witness = "identity has a non-root";
  }
  rep.clauses.push_back(c1);

  CheckResult c2{"3.1(ii) eta(x^-1) = eta(x)", CheckStatus::pass, 0, std::nullopt, {}};
  for (std::size_t x = 0; x < n; ++x) {
    ++c2.checked;
    const ElementId ex(static_cast<std::uint32_t>(x));
    if (roots[x] != roots[grp.inverse(ex).index]) {
      c2.status = CheckStatus::fail;
      c2.witness = detail::names_of(grp, {ex});
      break;
    }
  }
  rep.clauses.push_back(c2);

  CheckResult c3{"3.1(iii) eta(x1 x2) within eta(x1) u eta(x2)", CheckStatus::pass, 0, std::nullopt, {}};
  for (std::size_t a = 0; a < n && c3.passed(); ++a)
    for (std::size_t b = 0; b < n; ++b) {
      ++c3.checked;
      const ElementId ea(static_cast<std::uint32_t>(a)), eb(static_cast<std::uint32_t>(b));
      const auto ab = grp.mul(ea, eb).index;
      // h in eta(ab) but a root of both a and b would be a counterexample.
      if ((roots[a] & roots[b] & ~roots[ab]).any()) {
        c3.status = CheckStatus::fail;
        c3.witness = detail::names_of(grp, {ea, eb});
        break;
      }
    }
  rep.clauses.push_back(c3);

  CheckResult c6{"3.1(vi) eta(x) contains G - C(x)", CheckStatus::pass, 0, std::nullopt, {}};
  for (std::size_t x = 0; x < n && c6.passed(); ++x)
    for (std::size_t h = 0; h < n; ++h) {
      ++c6.checked;
      const ElementId ex(static_cast<std::uint32_t>(x)), eh(static_cast<std::uint32_t>(h));
      if (!commutes(grp, ex, eh) && roots[x].test(h)) {
        c6.status = CheckStatus::fail;
        c6.witness = detail::names_of(grp, {ex, eh});
        break;
      }
    }
  rep.clauses.push_back(c6);
  return rep;
}

/// Transitivity of the root relation: x1 root of x2, x2 root of x3 => x1 root of x3.
/// The second clause of the lemma is its contrapositive and is not checked separately.
template <FiniteGroup G>
LemmaReport check_lemma32(const G& grp) {
  const std::size_t n = grp.order();
  const auto roots = root_relation(grp);
  CheckResult c{"3.2(i) root relation is transitive", CheckStatus::pass, 0, std::nullopt, {}};
  for (std::size_t x3 = 0; x3 < n && c.passed(); ++x3)
    for (std::size_t x2 = 0; x2 < n; ++x2) {
      if (!roots[x3].test(x2)) continue;
      c.checked += n;
      if (!roots[x2].is_subset_of(roots[x3])) {
        const auto bad = (roots[x2] & ~roots[x3]).find_first();
        c.status = CheckStatus::fail;
        c.witness = detail::names_of(grp, {ElementId(static_cast<std::uint32_t>(bad)), ElementId(static_cast<std::uint32_t>(x2)),
                                           ElementId(static_cast<std::uint32_t>(x3))});
        break;
      }
    }
  return {"3.2", {c}};
}

/// g in eta(a), x^p = a, g not in eta(y) => y in eta(x), for every applicable (x, y, g).
template <FiniteGroup G>
LemmaReport check_lemma39(const G& grp, std::uint64_t p) {
  if (!math::is_prime(p)) throw Error(Errc::precondition, std::to_string(p) + " is not prime");
  const std::size_t n = grp.order();
  const auto roots = root_relation(grp);
  CheckResult c{"3.9 p=" + std::to_string(p), CheckStatus::pass, 0, std::nullopt, {}};
  for (std::size_t x = 0; x < n && c.passed(); ++x) {
    const ElementId ex(static_cast<std::uint32_t>(x));
    const ElementId a = power(grp, ex, static_cast<std::int64_t>(p));
    for (std::size_t y = 0; y < n; ++y) {
      c.checked += n;
      if (!roots[x].test(y)) continue;  // y already in eta(x): conclusion holds
      // Need every g in eta(a) to lie in eta(y): roots(y) within roots(a).
      if (!roots[y].is_subset_of(roots[a.index])) {
        const auto g = (roots[y] & ~roots[a.index]).find_first();
        c.status = CheckStatus::fail;
        c.witness = "x=" + std::string(grp.name(ex)) + " y=" + std::string(grp.name(ElementId(static_cast<std::uint32_t>(y)))) +
                    " g=" + std::string(grp.name(ElementId(static_cast<std::uint32_t>(g))));
        break;
      }
    }
  }
  return {"3.9", {c}};
}

/// alpha(eta(a)) = eta(a) for an automorphism alpha with alpha(<a>) = <a>.
template <FiniteGroup G>
CheckResult check_eta_automorphism_invariance(const G& grp, ElementId a, const Homomorphism& alpha) {
  CheckResult r{"3.3 alpha(eta(a)) = eta(a)", CheckStatus::pass, 0, std::nullopt, {}};
  const auto ca = cyclic_subgroup(grp, a);
  if (alpha.image_of(ca) != ca) {
    r.status = CheckStatus::hypothesis_failed;
    r.witness = "alpha(<" + std::string(grp.name(a)) + ">) != <" + std::string(grp.name(a)) + ">";
    return r;
  }
  const auto e = eta(grp, a).members;
  const auto img = alpha.image_of(e);
  r.checked = e.size();
  if (img != e) {
    r.status = CheckStatus::fail;
    for (auto x : e)
      if (!e.contains(alpha(x))) {
        r.witness = std::string(grp.name(x)) + " -> " + std::string(grp.name(alpha(x)));
        break;
      }
  }
  return r;
}

/// Automorphism invariance of eta: for every a, each inner automorphism (plus inversion when
/// abelian) that stabilizes <a> maps eta(a) onto itself.
template <FiniteGroup G>
LemmaReport check_lemma33(const G& grp) {
  const std::size_t n = grp.order();
  std::vector<Homomorphism> autos;
  for (std::size_t g = 0; g < n; ++g) {
    const ElementId eg(static_cast<std::uint32_t>(g));
    const ElementId gi = grp.inverse(eg);
    Homomorphism conj{n, n, {}};
    for (std::size_t x = 0; x < n; ++x) conj.images.push_back(grp.mul(grp.mul(gi, ElementId(static_cast<std::uint32_t>(x))), eg));
    autos.push_back(std::move(conj));
  }
  if (is_abelian(grp)) {
    Homomorphism inv{n, n, {}};
    for (std::size_t x = 0; x < n; ++x) inv.images.push_back(grp.inverse(ElementId(static_cast<std::uint32_t>(x))));
    autos.push_back(std::move(inv));
  }
  CheckResult c{"3.3 alpha(eta(a)) = eta(a)", CheckStatus::pass, 0, std::nullopt, {}};
  std::size_t skipped = 0;
  for (std::size_t a = 0; a < n && c.passed(); ++a)
    for (const auto& alpha : autos) {
      auto r = check_eta_automorphism_invariance(grp, ElementId(static_cast<std::uint32_t>(a)), alpha);
      if (r.status == CheckStatus::hypothesis_failed) {
        ++skipped;
        continue;
      }
      ++c.checked;
      if (r.status == CheckStatus::fail) {
        c.status = CheckStatus::fail;
        c.witness = "a=" + std::string(grp.name(ElementId(static_cast<std::uint32_t>(a)))) + " " + r.witness.value_or("");
        break;
      }
    }
  c.detail = std::to_string(skipped) + " (a, alpha) pairs skipped: alpha does not stabilize <a>";
  return {"3.3", {c}};
}

/// Closed form of lemma38_decide against direct eta membership, over every valid (a, h).
template <FiniteGroup G>
LemmaReport check_lemma38(const G& grp, std::optional<std::uint64_t> only_p = std::nullopt) {
  const std::size_t n = grp.order();
  const auto roots = root_relation(grp);
  CheckResult c{"3.8 closed form = brute force", CheckStatus::pass, 0, std::nullopt, {}};
  for (std::size_t a = 1; a < n && c.passed(); ++a) {
    const ElementId ea(static_cast<std::uint32_t>(a));
    const auto pp = math::as_prime_power(order_of(grp, ea));
    if (!pp || (only_p && pp->p != *only_p)) continue;
    for (std::size_t h = 0; h < n; ++h) {
      const ElementId eh(static_cast<std::uint32_t>(h));
      if (roots[a].test(h) || !commutes(grp, ea, eh)) continue;
      ++c.checked;
      const bool closed = lemma38_decide(grp, ea, eh);
      const bool brute = roots[a].test(grp.mul(ea, eh).index);
      if (closed != brute) {
        c.status = CheckStatus::fail;
        c.witness = detail::names_of(grp, {ea, eh});
        break;
      }
    }
  }
  if (only_p) c.name += " p=" + std::to_string(*only_p);
  return {"3.8", {c}};
}

/// eta(x N, G/N) within the projection of eta(x, G). `detail` records whether equality held.
template <FiniteGroup G>
CheckResult check_quotient_eta(const G& grp, const Subset& n, ElementId x) {
  auto q = quotient(grp, n);
  const auto lhs = eta(q.group, q.projection(x)).members;
  const auto rhs = q.projection.image_of(eta(grp, x).members);
  CheckResult r{"3.1(iv) eta(xN, G/N) within image of eta(x, G)", CheckStatus::pass, lhs.size(), std::nullopt, {}};
  if (!lhs.is_subset_of(rhs)) {
    r.status = CheckStatus::fail;
    for (auto e : lhs)
      if (!rhs.contains(e)) {
        r.witness = q.group.name(e);
        break;
      }
  }
  r.detail = lhs == rhs ? "equality" : "proper inclusion";
  return r;
}

}  // namespace rootset
