#include <gtest/gtest.h>

#include <cmath>

#include "ehrenfest/families.hpp"
#include "ehrenfest/model.hpp"
#include "ehrenfest/urn_chain.hpp"

namespace ehrenfest {
namespace {

TEST(ModelParamsTest, Validation) {
  EXPECT_THROW(ModelParams::make(0, 0.1, 1), ParameterError);
  EXPECT_THROW(ModelParams::make(3, 0.6, 2), ParameterError);
  EXPECT_THROW(ModelParams::make(3, -0.1, 2), ParameterError);
  const auto p = ModelParams::from_mp(3, 0.5, 2);
  EXPECT_DOUBLE_EQ(p.p, 0.25);
  EXPECT_TRUE(p.within_bound_regime());
  EXPECT_FALSE(ModelParams::make(3, 0.4, 2).within_bound_regime());
}

TEST(KernelTest, CyclicEntries) {
  const auto space = cyclic_pair(4).build();
  const auto params = ModelParams::make(2, 0.3, 1);
  EXPECT_DOUBLE_EQ(kernel_entry(params, space, {{0, 0}}, {{0, 0}}), 0.7);
  EXPECT_DOUBLE_EQ(kernel_entry(params, space, {{0, 0}}, {{1, 0}}), 0.15);
  EXPECT_DOUBLE_EQ(kernel_entry(params, space, {{0, 2}}, {{0, 3}}), 0.15);
  EXPECT_DOUBLE_EQ(kernel_entry(params, space, {{0, 0}}, {{3, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(kernel_entry(params, space, {{0, 0}}, {{1, 1}}), 0.0);
  EXPECT_THROW(kernel_entry(params, space, {{0}}, {{0, 0}}), ParameterError);
}

TEST(KernelTest, FullChainMatchesEntries) {
  for (const auto& spec : {symmetric_pair(3), dihedral_pair(4), cyclic_pair(3)}) {
    const auto space = spec.build();
    const auto params = ModelParams::from_mp(3, 0.4, space.m());
    const FullChain chain(params, space);
    for (std::size_t x = 0; x < chain.states(); ++x) {
      std::vector<double> dense(chain.states(), 0.0);
      for (const auto& [y, prob] : chain.row(x)) dense[y] += prob;
      for (std::size_t y = 0; y < chain.states(); ++y)
        ASSERT_NEAR(dense[y], kernel_entry(params, space, chain.state(x), chain.state(y)), 1e-15);
    }
  }
}

TEST(KernelTest, Guards) {
  const auto space = symmetric_pair(6).build();
  EXPECT_THROW(FullChain(ModelParams::make(7, 0.05, 5), space), GuardExceeded);
  EXPECT_THROW(FullChain(ModelParams::make(2, 0.05, 4), space), ParameterError);
}

TEST(BruteForceTest, SymmetricOneStep) {
  const auto space = symmetric_pair(3).build();
  const auto d = brute_force_distribution(ModelParams::make(2, 0.25, 2), space, 1);
  EXPECT_DOUBLE_EQ(d.at(Composition{{2, 0}}), 0.5);
  EXPECT_DOUBLE_EQ(d.at(Composition{{1, 1}}), 0.5);
  EXPECT_DOUBLE_EQ(d.at(Composition{{0, 2}}), 0.0);
}

struct Case {
  PairSpec spec;
  int n;
  double mp;
};

class AgreementTest : public testing::TestWithParam<Case> {};

TEST_P(AgreementTest, ThreeWay) {
  const auto& c = GetParam();
  const auto model = UrnModel::with_mp(CertifiedPair::build(c.spec), c.n, c.mp);
  const auto brute = brute_force_evolution(model.params, model.space(), 20);
  const auto kernel = model.lumped();
  const auto kt = build_table(model.spherical(), c.n);
  const SpectralEvaluator spectral(kt, model.spherical(), model.params);
  auto mu = TypeDistribution::point_mass(kernel.types());
  for (int N = 0; N <= 20; ++N) {
    EXPECT_LT(max_deviation(brute[static_cast<std::size_t>(N)], mu), 1e-12) << c.spec.label() << " N=" << N;
    EXPECT_LT(max_deviation(spectral.distribution(N), mu), 1e-10) << c.spec.label() << " N=" << N;
    mu = kernel.step(mu);
  }
}

INSTANTIATE_TEST_SUITE_P(Pairs, AgreementTest,
                         testing::Values(Case{symmetric_pair(3), 4, 0.5}, Case{symmetric_pair(4), 3, 0.3},
                                         Case{dihedral_pair(4), 3, 0.5}, Case{dihedral_pair(5), 3, 1.0},
                                         Case{cyclic_pair(3), 3, 0.3}, Case{cyclic_pair(4), 4, 0.45},
                                         Case{diagonal_pair("symmetric:3", "(0 1)"), 2, 0.5},
                                         Case{diagonal_pair("dihedral:4", "a"), 2, 0.25}));

TEST(LumpedTest, StochasticAndNormalized) {
  const auto model = UrnModel::with_mp(CertifiedPair::build(dihedral_pair(6)), 8, 0.5);
  const auto kernel = model.lumped();
  for (std::size_t idx = 0; idx < kernel.size(); ++idx) {
    double sum = kernel.hold(idx);
    for (const auto& mv : kernel.moves(idx)) sum += mv.prob;
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
  const auto mu = evolve_lumped(kernel, 1000);
  EXPECT_NEAR(mu.total(), 1.0, 1e-12);
  for (double v : mu.mass) EXPECT_GE(v, 0.0);
  const auto uniform = model.uniform();
  EXPECT_LT(tv_distance(mu, uniform), 1e-6);
  // The uniform law is stationary.
  TypeDistribution pi{kernel.types(), uniform};
  EXPECT_LT(max_deviation(kernel.step(pi), pi), 1e-15);
}

TEST(LumpedTest, KrawtchoukColumnsAreEigenfunctions) {
  for (const auto& spec : {symmetric_pair(4), dihedral_pair(4), cyclic_pair(3), cyclic_pair(5)}) {
    const auto model = UrnModel::with_mp(CertifiedPair::build(spec), 4, 0.4);
    const auto kernel = model.lumped();
    const auto kt = build_table(model.spherical(), 4);
    for (std::size_t k = 0; k < kt.size(); ++k) {
      const Eigen::VectorXcd phi = kt.values.row(static_cast<Eigen::Index>(k)).transpose().conjugate();
      const cplx f = fourier_coefficient(model.spherical(), model.params.m, model.params.p, kt.comps->at(k));
      EXPECT_LT((kernel.apply(phi) - f * phi).cwiseAbs().maxCoeff(), 1e-12) << spec.label() << " k=" << kt.comps->label(k);
    }
  }
}

TEST(SpectralTest, ComplexPairLongRun) {
  const auto model = UrnModel::with_p(CertifiedPair::build(cyclic_pair(3)), 3, 0.3);
  const auto kt = build_table(model.spherical(), 3);
  SpectralDiagnostics diag;
  const auto lumped = evolve_lumped(model.lumped(), 200);
  EXPECT_LT(max_deviation(spectral_distribution(kt, model.spherical(), model.params, 200, &diag), lumped), 1e-12);
  EXPECT_LT(diag.max_imaginary, 1e-12);
}

TEST(SpectralTest, TableMustMatch) {
  const auto model = UrnModel::with_p(CertifiedPair::build(cyclic_pair(3)), 3, 0.3);
  const auto kt = build_table(model.spherical(), 4);
  EXPECT_THROW(SpectralEvaluator(kt, model.spherical(), model.params), ParameterError);
}

TEST(TvTest, InitialDistance) {
  for (const auto& [spec, n] : std::vector<std::pair<PairSpec, int>>{{symmetric_pair(3), 2}, {dihedral_pair(4), 5},
                                                                     {cyclic_pair(5), 3}}) {
    const auto model = UrnModel::with_mp(CertifiedPair::build(spec), n, 0.5);
    const auto mu = TypeDistribution::point_mass(model.lumped().types());
    EXPECT_NEAR(tv_distance(mu, model.uniform()), 1.0 - std::pow(static_cast<double>(model.pair.r()), -n), 1e-15);
  }
  const auto model = UrnModel::with_mp(CertifiedPair::build(symmetric_pair(3)), 2, 0.5);
  EXPECT_NEAR(tv_distance(TypeDistribution::point_mass(model.lumped().types()), model.uniform()), 8.0 / 9.0, 1e-15);
}

TEST(TvTest, NonIncreasing) {
  for (const auto& spec : {symmetric_pair(5), dihedral_pair(7), cyclic_pair(6)}) {
    const auto model = UrnModel::with_mp(CertifiedPair::build(spec), 6, 0.5);
    const auto kernel = model.lumped();
    const auto uniform = model.uniform();
    auto mu = TypeDistribution::point_mass(kernel.types());
    double last = tv_distance(mu, uniform);
    for (int N = 1; N <= 150; ++N) {
      mu = kernel.step(mu);
      const double tv = tv_distance(mu, uniform);
      ASSERT_LE(tv, last + 1e-14) << spec.label() << " N=" << N;
      last = tv;
    }
  }
}

TEST(SimulationTest, LazyChainStaysPut) {
  const auto space = symmetric_pair(4).build();
  const auto emp = simulate(ModelParams::make(3, 0.0, 3), space, 50, 100, 7);
  EXPECT_EQ(emp.counts[0], 100u);
}

TEST(SimulationTest, MatchesExactLaw) {
  const auto model = UrnModel::with_mp(CertifiedPair::build(dihedral_pair(4)), 3, 0.5);
  const int N = 4;
  const std::uint64_t trials = 40000;
  const auto exact = evolve_lumped(model.lumped(), N);
  const auto emp = simulate(model.params, model.space(), N, trials, 12345);
  for (std::size_t idx = 0; idx < exact.size(); ++idx) {
    const double sigma = std::sqrt(exact[idx] * (1 - exact[idx]) / static_cast<double>(trials));
    EXPECT_LE(std::abs(emp.frequencies[idx] - exact[idx]), 4 * sigma + 1e-12) << exact.types->label(idx);
  }
}

TEST(SimulationTest, Deterministic) {
  const auto space = cyclic_pair(4).build();
  const auto params = ModelParams::make(5, 0.5, 1);
  const auto a = simulate(params, space, 10, 500, 42);
  const auto b = simulate(params, space, 10, 500, 42);
  const auto c = simulate(params, space, 10, 500, 43);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
}

}  // namespace
}  // namespace ehrenfest
