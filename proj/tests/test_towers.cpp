#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rootset/builders.hpp"
#include "rootset/constructions.hpp"
#include "rootset/tower.hpp"

using namespace rootset;

namespace {

std::multiset<std::size_t> eta_size_multiset(const auto& g) {
  std::multiset<std::size_t> out;
  for (std::uint32_t i = 0; i < g.order(); ++i) out.insert(oracle::eta_naive(g, ElementId(i)).size());
  return out;
}

// Level k of the Heisenberg amalgam, built independently: (H x Z_{3^k}) / <(c, -1/3)>.
FiniteGroupTable amalgam_oracle(unsigned k) {
  const auto h = heisenberg(3);
  const std::uint32_t n = static_cast<std::uint32_t>(math::ipow(3, k));
  const auto prod = direct_product(h, cyclic(n));
  const ElementId gen = prod.at("c|" + std::to_string(n - n / 3));
  return quotient(prod, cyclic_subgroup(prod, gen)).group;
}

std::shared_ptr<const AmalgamTower> heisenberg_tower() {
  auto h = heisenberg(3);
  const auto c = h.at("c");
  return std::make_shared<AmalgamTower>(std::move(h), 3, c, 1);
}

TowerPtr example_t2() {
  auto base = t1_tower(cyclic(2), 2, kIdentity, 0);
  return t2_tower(base, "1|1/4", 2, AlphaRecipe{AlphaRecipe::Kind::invert_c, {{"1", "1|1/2"}}});
}

std::vector<TowerPtr> fixtures() {
  return {prufer_tower(2), prufer_tower(3), quaternion_tower(), heisenberg_tower(), example_t2(),
          quotient_tower(quaternion_tower(), {"a"}), tree_vw_tower()};
}

}  // namespace

TEST(Prufer, LevelsAreCyclicPrimePowers) {
  auto t = prufer_tower(2);
  EXPECT_EQ(t->level(3)->order(), 8u);
  EXPECT_EQ(order_of(*t->level(3), *t->level(3)->find("1/8")), 8u);
  auto t3 = prufer_tower(3);
  for (unsigned k = 1; k <= 6; ++k) EXPECT_EQ(order_of(*t3->level(k), *t3->level(k)->find("1/3")), 3u) << k;
}

TEST(Prufer, ElementNormalForm) {
  const PruferElement e(2, 4, 3);  // 4/8 = 1/2
  EXPECT_EQ(e.name(), "1/2");
  EXPECT_EQ(e.order(), 2u);
  EXPECT_EQ(PruferElement(3, 9, 2).name(), "0");
  EXPECT_EQ((PruferElement(2, 1, 2) + PruferElement(2, 1, 2)).name(), "1/2");
  EXPECT_EQ((-PruferElement(3, 1, 2)).name(), "8/9");
  EXPECT_FALSE(PruferElement::parse(2, "2/4"));
  EXPECT_FALSE(PruferElement::parse(2, "1/6"));
  EXPECT_EQ(PruferElement::parse(5, "3/25")->numerator_at(3), 15u);
  EXPECT_THROW(PruferElement(4, 1, 1), Error);
}

TEST(Prufer, EtaOfInvolutionStabilizesToIdentity) {
  auto t = prufer_tower(2);
  const auto r = eta_stabilized(*t, "1/2", 6, 2);
  EXPECT_TRUE(r.stabilized);
  EXPECT_EQ(r.certificate_level, 1u);
  EXPECT_EQ(*r.stable_set, std::vector<std::string>{"0"});
  for (const auto& l : r.levels) EXPECT_EQ(l.size, 1u);
  // Brute force on each level agrees.
  for (unsigned k = 1; k <= 6; ++k) {
    auto z = cyclic(std::size_t{1} << k);
    EXPECT_EQ(oracle::eta_naive(z, ElementId(1u << (k - 1))).size(), 1u);
  }
}

TEST(Prufer, GenericElementsSizes) {
  // In Z_{p^k}, eta(g) for g of order p^j is the elements of order < p^j.
  auto t = prufer_tower(3);
  const auto r = eta_stabilized(*t, "1/9", 5, 2);
  ASSERT_TRUE(r.stabilized);
  EXPECT_EQ(r.stable_set->size(), 3u);
}

TEST(Amalgam, OrdersFollowClosedForm) {
  auto t = heisenberg_tower();
  for (unsigned k = 1; k <= 6; ++k) EXPECT_EQ(t->level(k)->order(), 9u * math::ipow(3, k)) << k;
}

TEST(Amalgam, LevelsMatchIndependentQuotientConstruction) {
  auto t = heisenberg_tower();
  for (unsigned k = 1; k <= 3; ++k) {
    const auto oracle_level = amalgam_oracle(k);
    const auto& lv = *t->level(k);
    ASSERT_EQ(lv.order(), oracle_level.order());
    EXPECT_EQ(oracle::profile_naive(lv), oracle::profile_naive(oracle_level)) << k;
    EXPECT_EQ(eta_size_multiset(lv), eta_size_multiset(oracle_level)) << k;
  }
}

TEST(Amalgam, FrozenEtaSizes) {
  auto t = heisenberg_tower();
  for (unsigned k = 1; k <= 5; ++k) {
    const auto& lv = *t->level(k);
    EXPECT_EQ(eta(lv, *lv.find("e|1/3")).members.size(), 25u) << k;
    EXPECT_EQ(eta(lv, *lv.find("x|0")).members.size(), lv.order() - 2) << k;
    if (k >= 2) {
      EXPECT_EQ(eta(lv, *lv.find("e|1/9")).members.size(), 75u) << k;
    }
  }
}

TEST(Amalgam, QuotientByCPartHasOrderNineExponentThree) {
  auto t = heisenberg_tower();
  for (unsigned k = 1; k <= 3; ++k) {
    const auto& lv = *t->level(k);
    auto q = quotient(lv, closure(lv, std::vector<ElementId>{*t->c_element(k, 1)}));
    EXPECT_EQ(q.group.order(), 9u);
    EXPECT_EQ(exponent(q.group), 3u);
  }
}

TEST(Amalgam, FullAmalgamationOfCyclicIsCyclic) {
  auto t = t1_tower(cyclic(4), 2, ElementId(1), 2);
  for (unsigned k = 2; k <= 6; ++k) {
    const auto& lv = *t->level(k);
    EXPECT_EQ(lv.order(), std::size_t{1} << k);
    EXPECT_EQ(exponent(lv), lv.order()) << k;
  }
}

TEST(Amalgam, DegenerateHIsPrufer) {
  auto t = t1_tower(cyclic(3), 3, ElementId(1), 1);
  auto p = prufer_tower(3);
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(oracle::profile_naive(*t->level(k)), oracle::profile_naive(*p->level(k)));
}

TEST(Amalgam, Preconditions) {
  auto err = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_element;
  };
  auto s3 = symmetric(3);
  EXPECT_EQ(err([&] { t1_tower(s3, 3, s3.at("p231"), 1); }), Errc::precondition);  // not central
  EXPECT_EQ(err([&] { t1_tower(cyclic(6), 2, ElementId(1), 1); }), Errc::precondition);  // order 6
  EXPECT_EQ(err([&] { t1_tower(cyclic(4), 2, ElementId(2), 2); }), Errc::precondition);  // order 2, not 4
  EXPECT_EQ(err([&] { t1_tower(cyclic(4), 4, ElementId(1), 1); }), Errc::precondition);  // p not prime
}

TEST(InvertingExtension, QuaternionLevels) {
  auto q = quaternion_tower();
  EXPECT_EQ(q->min_level(), 2u);
  EXPECT_EQ(oracle::profile_naive(*q->level(2)), oracle::profile_naive(oracle::quaternion8()));
  for (unsigned k = 2; k <= 5; ++k) {
    const auto& lv = *q->level(k);
    EXPECT_EQ(order_profile(lv), order_profile(generalized_quaternion(std::size_t{2} << k))) << k;
    EXPECT_TRUE(recognize_generalized_quaternion(lv).passed()) << k;
    const auto a = *lv.find("1/2");
    for (std::uint32_t i = 1; i < lv.order(); ++i) EXPECT_TRUE(cyclic_subgroup(lv, ElementId(i)).contains(a));
  }
  EXPECT_TRUE(q->embedding_check(2).injective);
  EXPECT_TRUE(q->embedding_check(2).homomorphism_full);
}

TEST(InvertingExtension, ExampleWithMTwo) {
  auto t = example_t2();
  EXPECT_EQ(t->min_level(), 2u);
  for (unsigned k = 2; k <= 5; ++k) {
    const auto& lv = *t->level(k);
    EXPECT_EQ(lv.order(), std::size_t{4} << k);
    const auto x = *lv.find("x");
    // x^4 = y^2 = a
    EXPECT_EQ(power(lv, x, 4), *lv.find("0|1/2"));
    EXPECT_EQ(power(lv, x, 2), *lv.find("1|1/4"));
  }
}

TEST(InvertingExtension, ProductPutsYOnTheLeft) {
  // (x g)(x h) = y alpha(g) h: check against the group law directly.
  auto t = example_t2();
  const auto& lv = *t->level(3);
  const auto x = *lv.find("x");
  for (std::uint32_t g = 0; g < lv.order() / 2; ++g)
    for (std::uint32_t h = 0; h < lv.order() / 2; ++h) {
      const auto lhs = lv.mul(lv.mul(x, ElementId(g)), lv.mul(x, ElementId(h)));
      const auto rhs = lv.mul(lv.mul(lv.mul(x, x), lv.mul(lv.mul(lv.inverse(x), ElementId(g)), x)), ElementId(h));
      ASSERT_EQ(lhs, rhs);
    }
}

TEST(InvertingExtension, ConditionFailuresAreReported) {
  auto d4 = dihedral(4);
  auto base = t1_tower(d4, 2, d4.at("r2"), 1);
  auto expect_failure = [&](AlphaRecipe alpha, const std::string& y, unsigned m, const std::string& fragment) {
    auto t = t2_tower(base, y, m, std::move(alpha));
    try {
      t->level(t->min_level());
      ADD_FAILURE() << "no failure for " << fragment;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::extension_conditions_failed);
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_failure(AlphaRecipe{AlphaRecipe::Kind::identity, {}}, "s|0", 1, "alpha^2");
  expect_failure(AlphaRecipe{AlphaRecipe::Kind::inversion, {}}, "e|1/2", 1, "not an automorphism");
  auto z2 = t1_tower(cyclic(2), 2, kIdentity, 0);
  auto t = t2_tower(z2, "1|1/4", 1, AlphaRecipe{AlphaRecipe::Kind::invert_c, {{"1", "1|1/2"}}});
  EXPECT_THROW(t->level(3), Error);  // y^1 != a
  EXPECT_THROW(t2_tower(prufer_tower(3), "1/3", 1, AlphaRecipe{}), Error);
}

TEST(Towers, EmbeddingsPreserveNames) {
  for (const auto& t : fixtures()) {
    const unsigned top = std::min(t->min_level() + 2, t->max_level());
    for (unsigned k = t->min_level(); k < top; ++k) {
      const auto& map = t->embed(k);
      const auto lo = t->level(k), hi = t->level(k + 1);
      for (std::uint32_t i = 0; i < lo->order(); ++i) ASSERT_EQ(hi->name(map[i]), lo->name(ElementId(i))) << t->kind();
      EXPECT_EQ(t->new_elements(k + 1).size(), hi->order() - lo->order()) << t->kind();
    }
  }
}

TEST(Towers, CoherenceHoldsForEveryElement) {
  for (const auto& t : fixtures()) {
    const unsigned top = std::min(t->min_level() + 3, t->max_level());
    const auto rep = k_estimate(*t, top, 2, t->min_level() + 1);
    for (const auto& e : rep.elements) EXPECT_GT(e.coherence_checks + (e.birth_level == top), 0u) << t->kind() << " " << e.element;
  }
}

TEST(Towers, LevelBounds) {
  auto q = quaternion_tower();
  try {
    q->level(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::level_too_small);
  }
  EXPECT_THROW(tree_vw_tower()->level(4), Error);
}

TEST(EtaStabilized, QuaternionInvolution) {
  auto q = quaternion_tower();
  const auto r = eta_stabilized(*q, "a", 6, 2);
  EXPECT_EQ(r.element, "1/2");
  EXPECT_TRUE(r.stabilized);
  EXPECT_EQ(r.certificate_level, 2u);
  EXPECT_EQ(*r.stable_set, std::vector<std::string>{"0"});
}

TEST(EtaStabilized, NonCentralElementGrows) {
  auto t = heisenberg_tower();
  const auto r = eta_stabilized(*t, "x|0", 6, 2);
  EXPECT_FALSE(r.stabilized);
  EXPECT_TRUE(r.growing);
  for (std::size_t i = 1; i < r.levels.size(); ++i) EXPECT_GT(r.levels[i].size, r.levels[i - 1].size);
  // Lemma: eta(x) contains G - C(x), so |eta| >= |G| - |C(x)|.
  for (const auto& l : r.levels) EXPECT_GE(l.size, l.level_order - l.level_order / 3);
}

TEST(EtaStabilized, Errors) {
  auto q = quaternion_tower();
  try {
    eta_stabilized(*q, "nonsense", 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_element);
  }
  // Born after max_level.
  EXPECT_THROW(eta_stabilized(*q, "1/64", 4), Error);
}

TEST(EtaStabilized, WindowControlsCertificate) {
  auto q = quaternion_tower();
  EXPECT_TRUE(eta_stabilized(*q, "a", 4, 3).stabilized);
  EXPECT_FALSE(eta_stabilized(*q, "a", 4, 4).stabilized);
}

TEST(KEstimate, MatchesTheoryOnEveryFamily) {
  auto check = [](const Tower& t, unsigned max_level, const std::vector<std::string>& expect_exact) -> KReport {
    const auto r = k_estimate(t, max_level, 2, 4);
    EXPECT_TRUE(r.theory && r.theory->agrees) << t.kind();
    EXPECT_TRUE(r.undetermined.empty()) << t.kind();
    EXPECT_TRUE(r.estimate_is_subgroup) << t.kind();
    if (!expect_exact.empty()) {
      EXPECT_EQ(r.estimate, expect_exact) << t.kind();
    }
    return r;
  };
  check(*quaternion_tower(), 7, {"0", "1/2"});
  check(*example_t2(), 7, {"0|0", "0|1/2"});
  const auto p = check(*prufer_tower(2), 7, {});
  EXPECT_EQ(p.estimate.size(), 16u);  // everything born by level 4
  const auto h = check(*heisenberg_tower(), 6, {});
  EXPECT_EQ(h.estimate.size(), 81u);  // C-part at level 4
  for (const auto& e : h.estimate) EXPECT_TRUE(e.starts_with("e|")) << e;
}

TEST(QuotientTower, QuaternionModCentreIsDihedral) {
  auto t = quotient_tower(quaternion_tower(), {"a"});
  for (unsigned k = 2; k <= 5; ++k)
    EXPECT_EQ(order_profile(*t->level(k)), order_profile(dihedral(std::size_t{1} << (k - 1)))) << k;
  const auto r = k_estimate(*t, 7, 2, 4);
  EXPECT_EQ(r.estimate, std::vector<std::string>{"[0]"});
  ASSERT_TRUE(r.theory);
  EXPECT_TRUE(r.theory->agrees);
}

TEST(QuotientTower, TrivialQuotientIsUnchanged) {
  auto q = quaternion_tower();
  auto t = quotient_tower(q, {"0"});
  for (unsigned k = 2; k <= 5; ++k) EXPECT_EQ(order_profile(*t->level(k)), order_profile(*q->level(k)));
}

TEST(QuotientTower, AmalgamModCentralSubgroupKeepsK) {
  auto t = quotient_tower(heisenberg_tower(), {"a"});
  const auto r = k_estimate(*t, 6, 2, 4);
  ASSERT_TRUE(r.theory);
  EXPECT_TRUE(r.theory->agrees);
  EXPECT_EQ(r.estimate.size(), 27u);  // C/<a> at level 4
}

TEST(QuotientTower, RejectsNonNormal) {
  try {
    quotient_tower(heisenberg_tower(), {"x|0"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_normal);
  }
}

// Property: random words evaluated at level k and pushed to level k+1 agree with the
// word evaluated at level k+1 on the pushed letters.
TEST(TowerProperties, EmbeddingCommutesWithRandomWords) {
  std::mt19937_64 rng(17);
  for (const auto& t : fixtures()) {
    const unsigned k = t->min_level();
    const auto lo = t->level(k), hi = t->level(k + 1);
    const auto& map = t->embed(k);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(lo->order() - 1));
    for (int trial = 0; trial < 200; ++trial) {
      ElementId a = kIdentity, b = kIdentity;
      for (int len = 0; len < 8; ++len) {
        const ElementId g(pick(rng));
        const bool inv = rng() & 1;
        a = lo->mul(a, inv ? lo->inverse(g) : g);
        b = hi->mul(b, inv ? hi->inverse(map[g.index]) : map[g.index]);
      }
      ASSERT_EQ(map[a.index], b) << t->kind();
    }
  }
}

TEST(TowerProperties, CPartAlwaysStabilizesInAmalgams) {
  std::mt19937_64 rng(5);
  auto t = heisenberg_tower();
  for (int trial = 0; trial < 10; ++trial) {
    const auto num = 1 + rng() % 26;
    const auto name = t->level(3)->name(*t->c_element(3, num));
    EXPECT_TRUE(eta_stabilized(*t, name, 6, 2).stabilized) << name;
  }
}
