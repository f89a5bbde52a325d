#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "corpus.hpp"
#include "oracles.hpp"
#include "rootset/builders.hpp"
#include "rootset/kernel.hpp"
#include "rootset/table_io.hpp"

using namespace rootset;

namespace {

std::set<std::string> names_of(const FiniteGroupTable& g, const Subset& s) {
  std::set<std::string> out;
  for (auto e : s) out.insert(g.name(e));
  return out;
}

}  // namespace

TEST(Mul, CyclicInversePair) {
  auto z4 = cyclic(4);
  EXPECT_EQ(z4.mul(ElementId(1), ElementId(3)), kIdentity);
}

TEST(Mul, QuaternionSquare) {
  auto q8 = oracle::quaternion8();
  EXPECT_EQ(q8.name(q8.mul(q8.at("i"), q8.at("i"))), "-1");
  EXPECT_EQ(q8.name(q8.mul(q8.at("i"), q8.at("j"))), "k");
  EXPECT_EQ(q8.name(q8.mul(q8.at("j"), q8.at("i"))), "-k");
}

TEST(Mul, IdentityLawAndRangeError) {
  for (const auto& e : corpus::groups())
    for (std::uint32_t x = 0; x < e.group.order(); ++x) EXPECT_EQ(e.group.mul(kIdentity, ElementId(x)), ElementId(x));
  auto z4 = cyclic(4);
  try {
    z4.mul(ElementId(4), ElementId(0));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::invalid_element);
  }
}

TEST(OrderOf, Examples) {
  EXPECT_EQ(order_of(cyclic(6), ElementId(2)), 3u);
  auto q8 = oracle::quaternion8();
  EXPECT_EQ(order_of(q8, q8.at("-1")), 2u);
  EXPECT_EQ(order_of(q8, kIdentity), 1u);
}

TEST(CyclicSubgroup, Examples) {
  EXPECT_EQ(cyclic_subgroup(cyclic(4), ElementId(1)).size(), 4u);
  auto q8 = oracle::quaternion8();
  EXPECT_EQ(names_of(q8, cyclic_subgroup(q8, q8.at("i"))), (std::set<std::string>{"1", "i", "-1", "-i"}));
  EXPECT_EQ(cyclic_subgroup(q8, kIdentity).size(), 1u);
}

TEST(Closure, Examples) {
  auto z6 = cyclic(6);
  EXPECT_EQ(closure(z6, std::vector{ElementId(2)}), Subset(6, {ElementId(0), ElementId(2), ElementId(4)}));
  auto q8 = oracle::quaternion8();
  EXPECT_EQ(closure(q8, std::vector{q8.at("i"), q8.at("j")}).size(), 8u);
  EXPECT_EQ(closure(q8, std::vector<ElementId>{}), Subset(8, {kIdentity}));
}

TEST(Structure, CenterDerivedCommutator) {
  auto q8 = oracle::quaternion8();
  EXPECT_EQ(names_of(q8, center(q8)), (std::set<std::string>{"1", "-1"}));
  EXPECT_EQ(derived_subgroup(cyclic(12)).size(), 1u);
  EXPECT_EQ(derived_subgroup(oracle::heisenberg_matrices(3)).size(), 3u);
  EXPECT_EQ(q8.name(commutator(q8, q8.at("i"), q8.at("j"))), "-1");
  auto s = Subset(8, {q8.at("i")});
  EXPECT_EQ(names_of(q8, centralizer(q8, s)), (std::set<std::string>{"1", "-1", "i", "-i"}));
}

TEST(Omega1, Examples) {
  EXPECT_EQ(omega1(cyclic(4), 2), Subset(4, {ElementId(0), ElementId(2)}));
  auto q8 = oracle::quaternion8();
  EXPECT_EQ(names_of(q8, omega1(q8, 2)), (std::set<std::string>{"1", "-1"}));
  auto z33 = direct_product(cyclic(3), cyclic(3));
  EXPECT_EQ(omega1(z33, 3).size(), 9u);
  EXPECT_THROW(omega1(z33, 4), Error);
}

TEST(Exponent, Examples) {
  EXPECT_EQ(exponent(cyclic(6)), 6u);
  EXPECT_EQ(exponent(oracle::quaternion8()), 4u);
  EXPECT_EQ(exponent(direct_product(cyclic(2), cyclic(2))), 2u);
}

TEST(Quotient, Examples) {
  auto q = quotient(cyclic(4), Subset(4, {ElementId(0), ElementId(2)}));
  EXPECT_EQ(q.group.order(), 2u);

  auto q8 = oracle::quaternion8();
  auto qq = quotient(q8, Subset(8, {q8.at("1"), q8.at("-1")}));
  EXPECT_EQ(order_profile(qq.group), (std::map<std::uint64_t, std::size_t>{{1, 1}, {2, 3}}));
  EXPECT_EQ(qq.group.names()[0], "[1]");
  EXPECT_EQ(qq.group.name(qq.projection(q8.at("-i"))), "[i]");

  // Quotient by the trivial subgroup is the same table under renaming.
  auto d4 = dihedral(4);
  auto triv = quotient(d4, Subset(8, {kIdentity}));
  EXPECT_EQ(triv.group.raw(), d4.raw());
}

TEST(Quotient, Errors) {
  auto s3 = symmetric(3);
  try {
    quotient(s3, Subset(6, {kIdentity, s3.at("p213")}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_normal);
    EXPECT_NE(std::string(e.what()).find("p213"), std::string::npos);
  }
  try {
    quotient(cyclic(6), Subset(6, {ElementId(0), ElementId(1)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_subgroup);
  }
}

TEST(DirectProduct, Examples) {
  auto z6 = direct_product(cyclic(2), cyclic(3));
  EXPECT_EQ(z6.order(), 6u);
  EXPECT_EQ(exponent(z6), 6u);
  EXPECT_EQ(z6.names()[5], "1|2");
  EXPECT_EQ(exponent(direct_product(cyclic(2), cyclic(2))), 2u);
  auto q8z3 = direct_product(oracle::quaternion8(), cyclic(3));
  EXPECT_EQ(q8z3.order(), 24u);
  EXPECT_EQ(exponent(q8z3), 12u);
}

TEST(ValidateAutomorphism, Examples) {
  auto q8 = oracle::quaternion8();
  std::vector<ElementId> id;
  for (std::uint32_t i = 0; i < 8; ++i) id.emplace_back(i);
  EXPECT_NO_THROW(validate_automorphism(q8, id));

  auto z5 = cyclic(5);
  std::vector<ElementId> inv5;
  for (std::uint32_t i = 0; i < 5; ++i) inv5.push_back(z5.inverse(ElementId(i)));
  EXPECT_NO_THROW(validate_automorphism(z5, inv5));

  std::vector<ElementId> inv8;
  for (std::uint32_t i = 0; i < 8; ++i) inv8.push_back(q8.inverse(ElementId(i)));
  try {
    validate_automorphism(q8, inv8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_homomorphic);
    EXPECT_NE(std::string(e.what()).find("(i, j)"), std::string::npos) << e.what();
  }

  std::vector<ElementId> collapse(8, kIdentity);
  try {
    validate_automorphism(q8, collapse);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_bijective);
  }
}

TEST(TableConstruction, RejectsBrokenTables) {
  EXPECT_THROW(FiniteGroupTable({"e", "a"}, {0, 1, 1, 1}), Error);      // Latin square
  EXPECT_THROW(FiniteGroupTable({"e", "e"}, {0, 1, 1, 0}), Error);      // duplicate names
  EXPECT_THROW(FiniteGroupTable({"a", "e"}, {1, 0, 0, 1}), Error);      // identity not at 0
  // A Latin square with identity that is not associative (order 5 loop).
  std::vector<std::uint32_t> loop{0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0};
  try {
    FiniteGroupTable({"e", "a", "b", "c", "d"}, loop);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("associativity"), std::string::npos);
  }
}

TEST(TableConstruction, SampledAssociativityAboveBound) {
  auto big = cyclic(600);
  EXPECT_EQ(big.associativity_check(), AssociativityCheck::sampled);
  EXPECT_EQ(cyclic(512).associativity_check(), AssociativityCheck::full);
}

TEST(TableIo, RoundTripAndComments) {
  auto q8 = oracle::quaternion8();
  const auto text = to_table_text(q8);
  std::istringstream in("# quaternion group\n" + text);
  auto back = read_table(in);
  EXPECT_EQ(back, q8);
  EXPECT_EQ(to_table_text(back), text);
  EXPECT_EQ(text.substr(0, 20), "8\n1 -1 i -i j -j k -");
}

TEST(TableIo, Errors) {
  std::istringstream bad_count("3\na b\n0 1 2\n1 2 0\n2 0 1\n");
  EXPECT_THROW(read_table(bad_count), Error);
  std::istringstream bad_index("2\ne a\n0 1\n1 x\n");
  EXPECT_THROW(read_table(bad_index), Error);
  std::istringstream missing_row("2\ne a\n0 1\n");
  EXPECT_THROW(read_table(missing_row), Error);
}

// ---- properties over the corpus ----

TEST(KernelProperties, LagrangeAndProfileAgreeWithIteration) {
  for (const auto& e : corpus::groups()) {
    EXPECT_EQ(order_profile(e.group), oracle::profile_naive(e.group)) << e.label;
    for (std::uint32_t x = 0; x < e.group.order(); ++x) EXPECT_EQ(e.group.order() % order_of(e.group, ElementId(x)), 0u);
  }
}

TEST(KernelProperties, CommutatorIdentityIffCommute) {
  for (const auto& e : corpus::groups()) {
    const auto& g = e.group;
    for (std::uint32_t a = 0; a < g.order(); ++a)
      for (std::uint32_t b = 0; b < g.order(); ++b)
        ASSERT_EQ(commutator(g, ElementId(a), ElementId(b)) == kIdentity, commutes(g, ElementId(a), ElementId(b)))
            << e.label;
    EXPECT_EQ(is_abelian(g), e.abelian) << e.label;
  }
}

TEST(KernelProperties, ClosureIdempotentAndQuotientOrder) {
  std::mt19937 rng(7);
  for (const auto& e : corpus::groups()) {
    const auto& g = e.group;
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(g.order() - 1));
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<ElementId> gens{ElementId(pick(rng)), ElementId(pick(rng))};
      auto s = closure(g, gens);
      EXPECT_EQ(closure(g, s), s);
      EXPECT_NO_THROW(require_subgroup(g, s));
    }
    // Every normal subgroup we can name: center, derived subgroup, omega1 for each prime.
    std::vector<Subset> normals{center(g), derived_subgroup(g)};
    for (auto p : math::prime_divisors(g.order())) normals.push_back(omega1(g, p));
    for (const auto& n : normals) {
      auto q = quotient(g, n);
      EXPECT_EQ(q.group.order() * n.size(), g.order()) << e.label;
      EXPECT_FALSE(check_homomorphism(g, q.group, q.projection.images).witness);
    }
  }
}

TEST(ExtendFromGenerators, InnerAutomorphismAndInconsistency) {
  auto d4 = dihedral(4);
  const auto r = d4.at("r1"), s = d4.at("s");
  // conjugation by r: r -> r, s -> r^-1 s r
  auto h = extend_from_generators(d4, d4, {r, s}, {r, d4.mul(d4.mul(d4.inverse(r), s), r)});
  EXPECT_NO_THROW(validate_automorphism(d4, h.images));
  EXPECT_NO_THROW(extend_from_generators(d4, d4, {r, s}, {s, s}));  // D4 -> <s> is a genuine homomorphism
  EXPECT_THROW(extend_from_generators(d4, d4, {r, s}, {r, r}), Error);  // s^2 = 1 but r^2 != 1
}
