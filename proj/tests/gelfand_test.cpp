#include <gtest/gtest.h>

#include "ehrenfest/families.hpp"
#include "ehrenfest/gelfand.hpp"

namespace ehrenfest {
namespace {

constexpr double kTol = 1e-10;

SphericalTable table_for(const PairSpec& spec, const SphericalOptions& opt = {}) {
  const auto space = spec.build();
  return spherical_table(orbitals(space), space.classes(), opt);
}

TEST(OrbitalTest, SymmetricPairIsCompleteGraph) {
  const auto orb = orbitals(symmetric_pair(3).build());
  ASSERT_EQ(orb.s(), 2u);
  EXPECT_EQ(orb.matrices[0], IntMatrix::Identity(3, 3));
  const IntMatrix j = IntMatrix::Ones(3, 3) - IntMatrix::Identity(3, 3);
  EXPECT_EQ(orb.matrices[1], j);
}

TEST(OrbitalTest, DihedralGeneratorIsACycle) {
  const auto space = dihedral_pair(4).build();
  const auto orb = orbitals(space);
  const auto& a = orb.matrices[static_cast<std::size_t>(space.generator_class())];
  EXPECT_EQ(a, a.transpose());
  for (Eigen::Index x = 0; x < 4; ++x) EXPECT_EQ(a.row(x).sum(), 2);
  const IntMatrix walk = IntMatrix::Identity(4, 4) + a;
  EXPECT_GT((walk * walk * walk).minCoeff(), 0);  // connected
  EXPECT_EQ(a.trace(), 0);
}

TEST(OrbitalTest, CyclicOrbitalsArePermutations) {
  const auto orb = orbitals(cyclic_pair(3).build());
  ASSERT_EQ(orb.s(), 3u);
  IntMatrix sum = IntMatrix::Zero(3, 3);
  for (const auto& a : orb.matrices) {
    EXPECT_EQ((a * a.transpose()), IntMatrix::Identity(3, 3));
    sum += a;
  }
  EXPECT_EQ(sum, IntMatrix::Ones(3, 3));
  EXPECT_NE(orb.matrices[1], orb.matrices[1].transpose());
}

TEST(CertificateTest, GelfandPairsCommute) {
  for (const auto& spec : builtin_pairs()) {
    const auto cert = certify_gelfand(orbitals(spec.build()));
    EXPECT_TRUE(cert) << spec.label();
    EXPECT_FALSE(cert.witness.has_value());
  }
}

TEST(CertificateTest, NonGelfandPairHasWitness) {
  const auto space = PairSpec{"symmetric:3", "trivial", "(0 1)"}.build();
  const auto orb = orbitals(space);
  const auto cert = certify_gelfand(orb);
  ASSERT_FALSE(cert);
  ASSERT_TRUE(cert.witness.has_value());
  const auto& w = *cert.witness;
  const IntMatrix tu = orb.matrices[w.t] * orb.matrices[w.u];
  const IntMatrix ut = orb.matrices[w.u] * orb.matrices[w.t];
  EXPECT_EQ(tu(w.row, w.col), w.tu);
  EXPECT_EQ(ut(w.row, w.col), w.ut);
  EXPECT_NE(w.tu, w.ut);

  const auto analysis = analyze_pair(space);
  EXPECT_FALSE(analysis.spherical.has_value());
}

TEST(SphericalTest, SymmetricPair) {
  const auto st = table_for(symmetric_pair(3));
  ASSERT_EQ(st.s, 2u);
  EXPECT_TRUE(st.all_real);
  EXPECT_EQ(st.dims, (std::vector<int>{1, 2}));
  EXPECT_NEAR(st.omega(1, 1).real(), -0.5, kTol);
  EXPECT_NEAR(st.M, -0.5, kTol);
  EXPECT_EQ(st.m(), 2);
}

TEST(SphericalTest, SymmetricPairGeneral) {
  for (int r = 2; r <= 6; ++r) {
    const auto st = table_for(symmetric_pair(r));
    EXPECT_EQ(st.dims, (std::vector<int>{1, r - 1}));
    EXPECT_NEAR(st.M, -1.0 / (r - 1), kTol) << r;
  }
}

TEST(SphericalTest, DihedralPair) {
  const auto st = table_for(dihedral_pair(4));
  ASSERT_EQ(st.s, 3u);
  ASSERT_EQ(st.generator_class, 1);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 1, 1, 1, 0, -1, 1, -1, 1;
  EXPECT_LT((st.omega - expected.cast<cplx>()).cwiseAbs().maxCoeff(), kTol);
  EXPECT_EQ(st.dims, (std::vector<int>{1, 2, 1}));
  EXPECT_NEAR(st.M, 0.0, kTol);
}

TEST(SphericalTest, CyclicPairIsComplex) {
  const auto st = table_for(cyclic_pair(4));
  EXPECT_FALSE(st.all_real);
  EXPECT_TRUE(std::isnan(st.M));
  EXPECT_LT(std::abs(st.at_generator(1) - cplx(0, 1)), kTol);
  EXPECT_LT(std::abs(st.at_generator(2) - cplx(0, -1)), kTol);
  EXPECT_LT(std::abs(st.at_generator(3) - cplx(-1, 0)), kTol);
  EXPECT_EQ(st.dims, std::vector<int>(4, 1));
}

TEST(SphericalTest, ReconstructsOrbitals) {
  for (const auto& spec : builtin_pairs()) {
    const auto space = spec.build();
    const auto orb = orbitals(space);
    const auto st = spherical_table(orb, space.classes());
    for (std::size_t t = 0; t < st.s; ++t) {
      Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(orb.r(), orb.r());
      for (std::size_t i = 0; i < st.s; ++i) sum += st.eigenvalue(i, t) * st.projection(i);
      const Eigen::MatrixXcd a = orb.matrices[t].cast<double>().cast<cplx>();
      EXPECT_LT((sum - a).cwiseAbs().maxCoeff(), 1e-8) << spec.label() << " class " << t;
    }
    for (std::size_t i = 0; i < st.s; ++i) {
      for (std::size_t t = 0; t < st.s; ++t) {
        const Eigen::MatrixXcd a = orb.matrices[t].cast<double>().cast<cplx>();
        const auto& v = st.eigenbases[i];
        EXPECT_LT((a * v - st.eigenvalue(i, t) * v).cwiseAbs().maxCoeff(), 1e-8);
      }
    }
  }
}

TEST(SphericalTest, Orthogonality) {
  for (const auto& spec : builtin_pairs()) {
    const auto st = table_for(spec);
    EXPECT_LT(orthogonality_defect(st), 1e-9) << spec.label();
    int total = 0;
    for (int d : st.dims) total += d;
    EXPECT_EQ(total, static_cast<int>(st.r));
    EXPECT_EQ(st.dims[0], 1);
    for (std::size_t i = 0; i < st.s; ++i)
      for (std::size_t t = 0; t < st.s; ++t) EXPECT_LE(std::abs(st.omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t))), 1 + 1e-9);
  }
}

TEST(SphericalTest, OrderingIsSeedIndependent) {
  for (const auto& spec : builtin_pairs()) {
    const auto a = table_for(spec);
    SphericalOptions opt;
    opt.seed = 99;
    const auto b = table_for(spec, opt);
    EXPECT_LT((a.omega - b.omega).cwiseAbs().maxCoeff(), 1e-9) << spec.label();
    EXPECT_EQ(a.dims, b.dims);
    for (std::size_t i = 2; i < a.s; ++i) EXPECT_GE(a.at_generator(i - 1).real(), a.at_generator(i).real() - 1e-9);
  }
}

TEST(IntersectionTest, Examples) {
  {
    const auto inx = intersection_numbers(symmetric_pair(3).build());
    EXPECT_EQ(inx.N, (std::vector<std::vector<int>>{{0, 2}, {1, 1}}));
  }
  for (int r = 2; r <= 6; ++r) {
    const auto inx = intersection_numbers(cyclic_pair(r).build());
    for (int t = 0; t < r; ++t)
      for (int u = 0; u < r; ++u)
        EXPECT_EQ(inx(static_cast<std::size_t>(t), static_cast<std::size_t>(u)), u == (t + 1) % r ? 1 : 0);
  }
  {
    const auto inx = intersection_numbers(dihedral_pair(4).build());
    EXPECT_EQ(inx.N[0], (std::vector<int>{0, 2, 0}));
    EXPECT_EQ(inx.N[2], (std::vector<int>{0, 2, 0}));
  }
}

TEST(IntersectionTest, RowsSumToValency) {
  for (const auto& spec : builtin_pairs()) {
    const auto inx = intersection_numbers(spec.build());
    for (const auto& row : inx.N) {
      int sum = 0;
      for (int v : row) sum += v;
      EXPECT_EQ(sum, inx.m) << spec.label();
    }
  }
}

}  // namespace
}  // namespace ehrenfest
