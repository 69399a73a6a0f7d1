#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "ehrenfest/families.hpp"
#include "ehrenfest/group.hpp"

namespace ehrenfest {
namespace {

TEST(FiniteGroupTest, CyclicArithmetic) {
  const auto z4 = cyclic_group(4);
  EXPECT_EQ(z4.order(), 4u);
  EXPECT_EQ(z4.mul(1, 3), 0);
  EXPECT_EQ(z4.inv(1), 3);
  EXPECT_TRUE(z4.is_abelian());
}

TEST(FiniteGroupTest, DihedralRelations) {
  const auto d4 = NamedGroup::build(GroupSpec::parse("dihedral:4"));
  const auto& g = d4.group();
  EXPECT_EQ(g.order(), 8u);
  const Element a = d4.parse_element("a"), b = d4.parse_element("b");
  Element a4 = 0;
  for (int i = 0; i < 4; ++i) a4 = g.mul(a4, a);
  EXPECT_EQ(a4, g.identity());
  EXPECT_EQ(g.mul(b, b), g.identity());
  const Element ab = g.mul(a, b);
  EXPECT_EQ(g.mul(ab, ab), g.identity());
  EXPECT_EQ(ab, d4.parse_element("ab"));
  EXPECT_FALSE(g.is_abelian());
}

TEST(FiniteGroupTest, SymmetricLexicographicOrder) {
  const auto s3 = NamedGroup::build(GroupSpec::symmetric(3));
  EXPECT_EQ(s3.group().order(), 6u);
  EXPECT_FALSE(s3.group().is_abelian());
  // [0,1,2] [0,2,1] [1,0,2] [1,2,0] [2,0,1] [2,1,0]
  EXPECT_EQ(s3.parse_element("e"), 0);
  EXPECT_EQ(s3.parse_element("(1 2)"), 1);
  EXPECT_EQ(s3.parse_element("(0 1)"), 2);
  EXPECT_EQ(s3.parse_element("(0 1 2)"), 3);
  EXPECT_EQ(s3.parse_element("(0 2 1)"), 4);
  EXPECT_EQ(s3.parse_element("(0 2)"), 5);
  // Products of cycles compose right to left.
  EXPECT_EQ(s3.parse_element("(0 1)(1 2)"), s3.group().mul(2, 1));
}

TEST(FiniteGroupTest, ElementNamesRoundTrip) {
  for (const char* spec : {"symmetric:4", "cyclic:7", "dihedral:5", "product(symmetric:3,dihedral:3)"}) {
    const auto named = NamedGroup::build(GroupSpec::parse(spec));
    for (Element g = 0; g < static_cast<Element>(named.group().order()); ++g) {
      EXPECT_EQ(named.parse_element(named.element_name(g)), g) << spec << " element " << g;
    }
  }
}

TEST(FiniteGroupTest, AssociativityIsSampledForLargeGroups) {
  const auto s6 = symmetric_group(6);
  EXPECT_EQ(s6.order(), 720u);
}

TEST(CayleyTableTest, RejectsNonSquare) {
  std::istringstream in("3\n0 1 2\n1 2 0\n");
  EXPECT_THROW(read_cayley_table(in), ValidationError);
  std::istringstream ragged("2\n0 1\n1\n");
  try {
    read_cayley_table(ragged);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("non-square"), std::string::npos);
  }
}

TEST(CayleyTableTest, NamesTheFailedAxiom) {
  auto message = [](std::size_t order, std::vector<Element> table) {
    try {
      FiniteGroup::from_cayley_table(order, std::move(table));
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(2, {0, 1, 1, 1}).find("row"), std::string::npos);
  EXPECT_NE(message(2, {0, 1, 0, 1}).find("latin"), std::string::npos);
  EXPECT_NE(message(2, {1, 0, 0, 1}).find("identity"), std::string::npos);
  EXPECT_NE(message(5, {0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0})
                .find("associativity"),
            std::string::npos);
  EXPECT_NE(message(2, {0, 1, 1, 5}).find("closure"), std::string::npos);
}

TEST(CayleyTableTest, ReadsTableFromStream) {
  const auto d4 = dihedral_group(4);
  std::ostringstream out;
  out << d4.order() << "\n";
  for (std::size_t g = 0; g < d4.order(); ++g) {
    for (std::size_t h = 0; h < d4.order(); ++h) out << d4.table()[g * d4.order() + h] << ' ';
    out << "\n";
  }
  std::istringstream in(out.str());
  EXPECT_EQ(read_cayley_table(in), d4);
}

TEST(SubgroupTest, Closure) {
  const auto s3 = NamedGroup::build(GroupSpec::symmetric(3));
  const Element t = s3.parse_element("(0 1)");
  EXPECT_EQ(subgroup_closure(s3.group(), std::vector<Element>{t}).order(), 2u);

  const auto d4 = NamedGroup::build(GroupSpec::dihedral(4));
  const auto l = d4.parse_subgroup("b");
  ASSERT_EQ(l.order(), 2u);
  EXPECT_EQ(l.members()[0], 0);
  EXPECT_EQ(l.members()[1], d4.parse_element("b"));

  const auto trivial = subgroup_closure(s3.group(), {});
  EXPECT_EQ(trivial.order(), 1u);
  EXPECT_TRUE(trivial.contains(0));

  EXPECT_EQ(s3.parse_subgroup("(0 1),(1 2)").order(), 6u);
  EXPECT_EQ(NamedGroup::build(GroupSpec::symmetric(4)).parse_subgroup("stabilizer").order(), 6u);
  EXPECT_EQ(NamedGroup::build(GroupSpec::parse("product(symmetric:3,symmetric:3)")).parse_subgroup("diagonal").order(), 6u);
  EXPECT_THROW(subgroup_closure(s3.group(), std::vector<Element>{17}), ValidationError);
}

TEST(CosetSpaceTest, Sizes) {
  const auto s3 = NamedGroup::build(GroupSpec::symmetric(3));
  EXPECT_EQ(coset_space(s3.group(), s3.parse_subgroup("stabilizer")).r, 3u);

  const auto z4 = cyclic_group(4);
  const auto space = coset_space(z4, subgroup_closure(z4, {}));
  EXPECT_EQ(space.r, 4u);
  for (Element g = 0; g < 4; ++g) EXPECT_EQ(space.coset_of[static_cast<std::size_t>(g)], g);

  const auto d4 = NamedGroup::build(GroupSpec::dihedral(4));
  EXPECT_EQ(coset_space(d4.group(), d4.parse_subgroup("b")).r, 4u);
}

TEST(CosetSpaceTest, Invariants) {
  for (const auto& spec : builtin_pairs()) {
    const auto space = spec.build();
    const auto& g = space.group();
    const auto& cs = space.cosets();
    for (Element x = 0; x < static_cast<Element>(g.order()); ++x)
      for (Element h : space.subgroup().members())
        ASSERT_EQ(cs.coset_of[static_cast<std::size_t>(g.mul(x, h))], cs.coset_of[static_cast<std::size_t>(x)]);
    for (std::size_t j = 0; j < cs.r; ++j)
      EXPECT_EQ(cs.reps[static_cast<std::size_t>(cs.coset_of[static_cast<std::size_t>(cs.reps[j])])], cs.reps[j]);
    for (Element h : space.subgroup().members()) EXPECT_EQ(cs.coset_of[static_cast<std::size_t>(h)], 0);
  }
}

TEST(DoubleCosetTest, Examples) {
  {
    const auto space = PairSpec{"symmetric:3", "(0 1)", "(0 2)"}.build();
    EXPECT_EQ(space.s(), 2u);
    EXPECT_EQ(space.classes().valencies, (std::vector<int>{1, 2}));
    EXPECT_EQ(space.m(), 2);
  }
  for (int r = 2; r <= 7; ++r) {
    const auto space = cyclic_pair(r).build();
    EXPECT_EQ(space.s(), static_cast<std::size_t>(r));
    EXPECT_EQ(space.classes().valencies, std::vector<int>(static_cast<std::size_t>(r), 1));
    EXPECT_EQ(space.m(), 1);
  }
  {
    const auto space = dihedral_pair(4).build();
    EXPECT_EQ(space.s(), 3u);
    EXPECT_EQ(space.classes().valencies, (std::vector<int>{1, 2, 1}));
    EXPECT_EQ(space.m(), 2);
    EXPECT_EQ(space.generator_class(), 1);
  }
}

TEST(DoubleCosetTest, GeneratorInsideSubgroupIsRejected) {
  try {
    PairSpec{"dihedral:4", "b", "b"}.build();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("generator must lie outside L"), std::string::npos);
  }
}

TEST(DoubleCosetTest, Invariants) {
  for (const auto& spec : builtin_pairs()) {
    const auto space = spec.build();
    const auto& dct = space.classes();
    const auto& cs = space.cosets();
    for (std::size_t c = 0; c < cs.r; ++c)
      for (Element h : space.subgroup().members()) {
        const int d = cs.coset_of[static_cast<std::size_t>(space.group().mul(h, cs.reps[c]))];
        ASSERT_EQ(dct.class_of_coset[static_cast<std::size_t>(d)], dct.class_of_coset[c]);
      }
    EXPECT_EQ(std::accumulate(dct.valencies.begin(), dct.valencies.end(), 0), static_cast<int>(space.r()));
    EXPECT_EQ(dct.valencies[0], 1);
    EXPECT_NE(dct.generator_class, 0);
    for (std::size_t x = 0; x < space.r(); ++x)
      EXPECT_EQ(space.neighbors(static_cast<int>(x)).size(), static_cast<std::size_t>(space.m()));
  }
}

TEST(DoubleCosetTest, Deterministic) {
  const auto a = diagonal_pair("symmetric:3", "(0 1)").build();
  const auto b = diagonal_pair("symmetric:3", "(0 1)").build();
  EXPECT_EQ(a.classes().class_of_coset, b.classes().class_of_coset);
  EXPECT_EQ(a.classes().valencies, b.classes().valencies);
  EXPECT_EQ(a.cosets().reps, b.cosets().reps);
}

TEST(GroupSpecTest, ParseAndPrint) {
  for (const char* text : {"symmetric:5", "cyclic:12", "dihedral:3", "product(cyclic:2,product(symmetric:3,cyclic:2))",
                           "cayley:/tmp/x.txt"}) {
    EXPECT_EQ(GroupSpec::parse(text).to_string(), text);
  }
  EXPECT_THROW(GroupSpec::parse("klein:4"), ValidationError);
  EXPECT_THROW(GroupSpec::parse("cyclic:x"), ValidationError);
}

}  // namespace
}  // namespace ehrenfest
