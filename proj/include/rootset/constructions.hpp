#pragma once

// Explicit constructions: extraspecial building blocks, central extensions by a
// 2-cocycle, the tree group V gamma W, and the reduction of a T2 tower to a
// generalized quaternion section.

#include <map>
#include <random>

#include "rootset/report.hpp"
#include "rootset/root_sets.hpp"
#include "rootset/tower.hpp"

namespace rootset {

/// Upper unitriangular 3x3 matrices over Z_p, p odd. Element x^i y^j c^k has index
/// i*p^2 + j*p + k, where x, y are the elementary off-diagonal matrices and c = [x, y]
/// generates the centre; names are normal forms like "xy^2c" ("e" for the identity).
inline FiniteGroupTable heisenberg(std::uint64_t p) {
  if (!math::is_prime(p)) throw Error(Errc::precondition, "p = " + std::to_string(p) + " is not prime");
  if (p == 2) throw Error(Errc::precondition, "p must be odd: a nonabelian group of order 8 has exponent 4");
  auto factor = [](const char* g, std::uint64_t e) -> std::string {
    if (e == 0) return "";
    return e == 1 ? g : std::string(g) + "^" + std::to_string(e);
  };
  std::vector<std::string> names;
  for (std::uint64_t i = 0; i < p; ++i)
    for (std::uint64_t j = 0; j < p; ++j)
      for (std::uint64_t k = 0; k < p; ++k) {
        auto s = factor("x", i) + factor("y", j) + factor("c", k);
        names.push_back(s.empty() ? "e" : s);
      }
  // Matrix (a, b, t) = [[1,a,t],[0,1,b],[0,0,1]]; x^i y^j c^k = (i, j, ij + k).
  const std::uint64_t pp = p * p;
  return FiniteGroupTable::from_function(std::move(names), [p, pp](std::uint32_t u, std::uint32_t v) {
    const std::uint64_t a1 = u / pp, b1 = u / p % p, t1 = (u % p + a1 * b1) % p;
    const std::uint64_t a2 = v / pp, b2 = v / p % p, t2 = (v % p + a2 * b2) % p;
    const std::uint64_t a = (a1 + a2) % p, b = (b1 + b2) % p, t = (t1 + t2 + a1 * b2) % p;
    const std::uint64_t k = (t + p * p - a * b % p) % p;
    return static_cast<std::uint32_t>(a * pp + b * p + k);
  });
}

// ---------------------------------------------------------------------------
// Central extensions
// ---------------------------------------------------------------------------

/// A Z_p-valued function w on B x B, indexed by element indices of `base`.
struct CocycleTable {
  FiniteGroupTable base;
  std::uint64_t p = 2;
  std::vector<std::vector<std::uint32_t>> w;
};

/// Throws not-normalized or cocycle-violation (with the first failing triple).
inline void validate_cocycle(const CocycleTable& c) {
  const std::size_t n = c.base.order();
  if (!math::is_prime(c.p)) throw Error(Errc::precondition, "p = " + std::to_string(c.p) + " is not prime");
  if (c.w.size() != n) throw Error(Errc::invalid_table, "cocycle has " + std::to_string(c.w.size()) + " rows, expected " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (c.w[i].size() != n) throw Error(Errc::invalid_table, "cocycle row " + std::to_string(i) + " has wrong length");
    for (auto v : c.w[i])
      if (v >= c.p) throw Error(Errc::invalid_table, "cocycle entry " + std::to_string(v) + " is not reduced mod p");
  }
  for (std::size_t b = 0; b < n; ++b)
    if (c.w[0][b] != 0 || c.w[b][0] != 0)
      throw Error(Errc::not_normalized, "w(1, " + c.base.name(ElementId(static_cast<std::uint32_t>(b))) + ") or its mirror is nonzero");
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y) {
      const auto xy = c.base.mul(ElementId(x), ElementId(y)).index;
      for (std::uint32_t z = 0; z < n; ++z) {
        const auto yz = c.base.mul(ElementId(y), ElementId(z)).index;
        if ((c.w[xy][z] + c.w[x][y]) % c.p != (c.w[x][yz] + c.w[y][z]) % c.p)
          throw Error(Errc::cocycle_violation, "identity fails on (" + c.base.name(ElementId(x)) + ", " +
                                                   c.base.name(ElementId(y)) + ", " + c.base.name(ElementId(z)) + ")");
      }
    }
}

/// Group on pairs (b, t), index b*p + t, name "b:t", with
/// (b1, t1)(b2, t2) = (b1 b2, t1 + t2 + w(b1, b2)).
inline FiniteGroupTable central_extension(const CocycleTable& c) {
  validate_cocycle(c);
  const std::uint64_t p = c.p;
  std::vector<std::string> names;
  for (std::size_t b = 0; b < c.base.order(); ++b)
    for (std::uint64_t t = 0; t < p; ++t) names.push_back(c.base.name(ElementId(static_cast<std::uint32_t>(b))) + ":" + std::to_string(t));
  auto g = FiniteGroupTable::from_function(std::move(names), [&](std::uint32_t u, std::uint32_t v) {
    const auto b1 = u / p, b2 = v / p;
    const auto b = c.base.mul(ElementId(static_cast<std::uint32_t>(b1)), ElementId(static_cast<std::uint32_t>(b2))).index;
    return static_cast<std::uint32_t>(b * p + (u % p + v % p + c.w[b1][b2]) % p);
  });
  for (std::uint64_t t = 0; t < p; ++t)
    for (std::size_t i = 0; i < g.order(); ++i)
      if (!commutes(g, ElementId(static_cast<std::uint32_t>(t)), ElementId(static_cast<std::uint32_t>(i))))
        throw std::logic_error("kernel of the extension is not central");
  return g;
}

// ---------------------------------------------------------------------------
// Tree groups
// ---------------------------------------------------------------------------

struct TreeVW {
  TreeVWGroup oracle;
  std::optional<FiniteGroupTable> table;  // depth <= 2 only
  std::vector<CheckResult> checks;
};

/// Verifies the class-2 structure on all pairs (depth <= 2) or on `samples` random pairs:
/// commutators are (0, rho), W is central, squares are (0, gamma(v, v)).
inline std::vector<CheckResult> check_tree_structure(const TreeVWGroup& g, std::size_t samples = 100000,
                                                     std::uint64_t seed = 0x5eed) {
  const auto& sp = g.spec();
  const bool exhaustive = sp.depth() <= 2;
  CheckResult comm{"commutator-is-rho", CheckStatus::pass, 0, std::nullopt, ""};
  CheckResult central{"w-central", CheckStatus::pass, 0, std::nullopt, ""};
  CheckResult square{"square-is-gamma-diagonal", CheckStatus::pass, 0, std::nullopt, ""};
  CheckResult nonzero{"gamma-diagonal-nonzero", CheckStatus::pass, 0, std::nullopt, ""};
  auto pair = [&](ElementId x, ElementId y) {
    ++comm.checked;
    if (comm.passed() && commutator(g, x, y) != g.make(0, sp.rho(g.v_of(x), g.v_of(y)))) {
      comm.status = CheckStatus::fail;
      comm.witness = g.name(x) + ", " + g.name(y);
    }
  };
  auto single = [&](ElementId x) {
    ++square.checked;
    if (square.passed() && g.mul(x, x) != g.make(0, sp.gamma(g.v_of(x), g.v_of(x)))) {
      square.status = CheckStatus::fail;
      square.witness = g.name(x);
    }
    const ElementId w = g.make(0, g.w_of(x));
    ++central.checked;
    for (unsigned f = 0; f < sp.dim_v() && central.passed(); ++f)
      if (!commutes(g, w, g.make(1u << f, 0))) {
        central.status = CheckStatus::fail;
        central.witness = g.name(w);
      }
  };
  const std::uint32_t nv = 1u << sp.dim_v();
  for (std::uint32_t v = 1; v < nv; ++v) {
    ++nonzero.checked;
    if (nonzero.passed() && sp.gamma(v, v) == 0) {
      nonzero.status = CheckStatus::fail;
      nonzero.witness = g.name(g.make(v, 0));
    }
  }
  if (exhaustive) {
    for (std::size_t i = 0; i < g.order(); ++i) {
      const ElementId x(static_cast<std::uint32_t>(i));
      single(x);
      for (std::size_t j = 0; j < g.order(); ++j) pair(x, ElementId(static_cast<std::uint32_t>(j)));
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, g.order() - 1);
    for (std::size_t s = 0; s < samples; ++s) {
      const ElementId x(static_cast<std::uint32_t>(pick(rng))), y(static_cast<std::uint32_t>(pick(rng)));
      single(x);
      pair(x, y);
    }
  }
  const char* how = exhaustive ? "exhaustive" : "sampled";
  for (auto* c : {&comm, &central, &square, &nonzero}) c->detail = c == &nonzero ? "all nonzero v" : how;
  return {comm, central, square, nonzero};
}

inline TreeVW tree_vw_group(unsigned depth) {
  TreeVW out{TreeVWGroup(depth), std::nullopt, {}};
  if (depth <= 2) out.table = materialize(out.oracle);
  out.checks = check_tree_structure(out.oracle);
  return out;
}

struct Omega1Census {
  unsigned depth = 0;
  std::size_t group_order = 0;
  std::size_t involutions = 0;
  std::size_t omega1_order = 0;
  std::size_t w_order = 0;
  bool omega1_equals_w = false;  // Omega_1 = {0} x W
  bool involutions_in_w = false;
};

/// Omega_1 of the depth-d tree group. (v, a)^2 = (0, gamma(v, v)) does not depend on a,
/// so involutions are counted per v and every coset {v} x W contributes all or nothing.
inline Omega1Census omega1_census(unsigned depth) {
  const TreeVWGroup g(depth);
  const auto& sp = g.spec();
  Omega1Census c;
  c.depth = depth;
  c.group_order = g.order();
  c.w_order = std::size_t{1} << sp.dim_w();
  const std::uint32_t nv = 1u << sp.dim_v();
  std::vector<ElementId> gens;
  bool outside = false;
  for (std::uint32_t v = 0; v < nv; ++v) {
    if (sp.gamma(v, v) != 0) continue;
    const std::size_t count = v == 0 ? c.w_order - 1 : c.w_order;
    c.involutions += count;
    if (v != 0) outside = true;
    for (unsigned n = 0; n < sp.dim_w(); ++n) gens.push_back(g.make(v, 1u << n));
    if (v != 0) gens.push_back(g.make(v, 0));
  }
  c.involutions_in_w = !outside;
  if (!outside) {
    c.omega1_order = c.w_order;  // the involutions span the elementary abelian {0} x W
    c.omega1_equals_w = c.involutions == c.w_order - 1;
  } else {
    c.omega1_order = closure(g, gens).size();
  }
  return c;
}

/// (xy)^2 = x^2 y^2 [x, y] on all pairs; requires G' central of exponent dividing 2.
inline CheckResult check_class2_squaring(const FiniteGroupTable& g) {
  CheckResult r{"class2-squaring", CheckStatus::pass, 0, std::nullopt, ""};
  const auto derived = derived_subgroup(g);
  const auto z = center(g);
  if (!derived.is_subset_of(z)) {
    r.status = CheckStatus::hypothesis_failed;
    r.detail = "derived subgroup is not central (class > 2)";
    return r;
  }
  for (auto d : derived)
    if (g.mul(d, d) != kIdentity) {
      r.status = CheckStatus::hypothesis_failed;
      r.witness = g.name(d);
      r.detail = "derived subgroup has an element of order " + std::to_string(order_of(g, d));
      return r;
    }
  for (std::uint32_t i = 0; i < g.order(); ++i)
    for (std::uint32_t j = 0; j < g.order(); ++j) {
      const ElementId x(i), y(j);
      const ElementId xy = g.mul(x, y);
      ++r.checked;
      if (g.mul(xy, xy) != g.mul(g.mul(g.mul(x, x), g.mul(y, y)), commutator(g, x, y))) {
        r.status = CheckStatus::fail;
        r.witness = g.name(x) + ", " + g.name(y);
        return r;
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Generalized quaternion recognition and the T2 reduction
// ---------------------------------------------------------------------------

struct QuaternionRecognition {
  bool two_group = false;
  bool unique_involution = false;
  bool cyclic_index_two = false;
  bool non_cyclic = false;

  bool passed() const { return two_group && unique_involution && cyclic_index_two && non_cyclic; }
};

template <FiniteGroup G>
QuaternionRecognition recognize_generalized_quaternion(const G& g) {
  QuaternionRecognition r;
  const std::size_t n = g.order();
  auto pp = math::as_prime_power(n);
  r.two_group = pp && pp->p == 2;
  if (!r.two_group) return r;
  std::size_t involutions = 0, max_order = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = order_of(g, ElementId(static_cast<std::uint32_t>(i)));
    involutions += o == 2;
    max_order = std::max<std::size_t>(max_order, o);
  }
  r.unique_involution = involutions == 1;
  r.cyclic_index_two = n >= 2 && max_order >= n / 2;
  r.non_cyclic = max_order < n;
  return r;
}

enum class ReductionBranch { odd, even };

inline const char* to_string(ReductionBranch b) { return b == ReductionBranch::odd ? "odd" : "even"; }

struct ReductionStep {
  std::uint64_t m = 0;
  ReductionBranch branch = ReductionBranch::odd;
  std::string a2;  // order-4 element of C (names in the current section)
  std::string z;   // x^m a2
  std::optional<std::vector<std::string>> normal;  // N = {1, z, za, a} on even steps
  std::size_t section_order = 0;                   // |<x, C>| at this step
};

struct ReductionTrace {
  unsigned level = 0;
  std::vector<ReductionStep> steps;
  std::size_t final_order = 0;
  std::map<std::uint64_t, std::size_t> final_profile;
  QuaternionRecognition recognition;
  bool eta_a_trivial = false;  // eta(image of a) within the final section is {1}
};

namespace detail {

inline ReductionTrace reduce_once(const InvertingExtensionTower& t, unsigned level) {
  auto lv = t.level(level);
  const std::uint64_t cpart = std::uint64_t{1} << level;
  auto need = [&](std::uint64_t order) {
    if (cpart < order)
      throw Error(Errc::level_too_small, "level " + std::to_string(level) + " has |C| = " + std::to_string(cpart) +
                                             ", reduction needs " + std::to_string(order));
  };
  std::uint64_t m = t.m();
  unsigned evens = 0;
  for (std::uint64_t mm = m; mm % 2 == 0; mm /= 2) ++evens;
  need(std::uint64_t{4} << evens);

  const ElementId x_l = *lv->find("x");
  const ElementId c_l = *t.c_element(level, 1);
  auto sec = subgroup_table(*lv, closure(*lv, std::vector<ElementId>{x_l, c_l}));
  FiniteGroupTable s = std::move(sec.group);
  ElementId x = *s.find(lv->name(x_l)), c = *s.find(lv->name(c_l));
  std::uint64_t c_order = cpart;

  ReductionTrace trace;
  trace.level = level;
  auto fail = [](const std::string& what) { return Error(Errc::relation_failed, what); };
  for (;;) {
    const ElementId a = power(s, c, static_cast<std::int64_t>(c_order / 2));
    const ElementId a2 = power(s, c, static_cast<std::int64_t>(c_order / 4));
    if (power(s, x, static_cast<std::int64_t>(2 * m)) != a) throw fail("x^(2m) != a for m = " + std::to_string(m));
    const ElementId z = s.mul(power(s, x, static_cast<std::int64_t>(m)), a2);
    const ElementId a2_signed = m % 2 ? s.inverse(a2) : a2;
    if (s.mul(z, z) != s.mul(s.mul(a2_signed, a2), a)) throw fail("z^2 != a2^((-1)^m) a2 a");

    ReductionStep step;
    step.m = m;
    step.a2 = s.name(a2);
    step.z = s.name(z);
    step.section_order = s.order();
    if (m % 2 == 1) {
      step.branch = ReductionBranch::odd;
      trace.steps.push_back(std::move(step));
      auto fin = subgroup_table(s, closure(s, std::vector<ElementId>{z, c}));
      const auto& f = fin.group;
      trace.final_order = f.order();
      trace.final_profile = order_profile(f);
      trace.recognition = recognize_generalized_quaternion(f);
      const auto eta_a = eta(f, *f.find(s.name(a)));
      trace.eta_a_trivial = eta_a.members.size() <= 1;
      return trace;
    }

    step.branch = ReductionBranch::even;
    if (s.mul(z, z) != kIdentity) throw fail("z^2 != 1");
    const ElementId xi = s.inverse(x);
    for (std::uint64_t e = 0; e < c_order; ++e)
      if (!commutes(s, z, power(s, c, static_cast<std::int64_t>(e)))) throw fail("[z, c] != 1");
    const ElementId za = s.mul(z, a);
    if (s.mul(s.mul(xi, z), x) != za) throw fail("x^-1 z x != za");
    const Subset n(s.order(), {kIdentity, z, za, a});
    if (n.size() != 4) throw fail("N = {1, z, za, a} does not have four elements");
    try {
      require_subgroup(s, n);
      require_normal(s, n);
    } catch (const Error& e) {
      throw fail(std::string("N is not a normal subgroup: ") + e.what());
    }
    step.normal = std::vector<std::string>{s.name(kIdentity), s.name(z), s.name(za), s.name(a)};
    trace.steps.push_back(std::move(step));

    auto q = quotient(s, n);
    x = q.projection(x);
    c = q.projection(c);
    s = std::move(q.group);
    c_order /= 2;
    m /= 2;
  }
}

}  // namespace detail

struct ReductionResult {
  ReductionTrace trace;
  ReductionTrace rerun;  // same reduction at level + 1
  /// Both levels take the same branches, both final sections are generalized quaternion,
  /// and the final section doubles with the level.
  bool level_independent = false;
};

/// Reduction of <x, C> in a T2 tower to a generalized quaternion section, following
/// z = x^m a2: odd m stops at <z, C>; even m passes to <x, C>/{1, z, za, a} with m/2.
inline ReductionResult quaternion_reduce(const Tower& t, unsigned level) {
  const auto* t2 = dynamic_cast<const InvertingExtensionTower*>(&t);
  if (!t2) throw Error(Errc::precondition, "quaternion_reduce needs a t2 or quaternion tower, got " + t.kind());
  if (level < t.min_level()) throw Error(Errc::level_too_small, "tower starts at level " + std::to_string(t.min_level()));
  ReductionResult r;
  r.trace = detail::reduce_once(*t2, level);
  r.rerun = detail::reduce_once(*t2, level + 1);
  bool same = r.trace.steps.size() == r.rerun.steps.size();
  for (std::size_t i = 0; same && i < r.trace.steps.size(); ++i)
    same = r.trace.steps[i].branch == r.rerun.steps[i].branch && r.trace.steps[i].m == r.rerun.steps[i].m;
  r.level_independent = same && r.trace.recognition.passed() && r.rerun.recognition.passed() &&
                        r.rerun.final_order == 2 * r.trace.final_order;
  return r;
}

}  // namespace rootset
