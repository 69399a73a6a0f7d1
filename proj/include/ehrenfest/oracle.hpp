#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "ehrenfest/cutoff.hpp"
#include "ehrenfest/krawtchouk.hpp"
#include "ehrenfest/model.hpp"
#include "ehrenfest/urn_chain.hpp"

namespace ehrenfest {

struct AgreementReport {
  int n_max = 0;
  double brute_vs_lumped = 0.0;
  std::optional<double> spectral_vs_lumped;  // absent when the table exceeds its guard
};

// Per-type deviations between the three evaluation routes, N = 0..n_max.
inline AgreementReport three_way_agreement(const UrnModel& model, int n_max) {
  AgreementReport rep;
  rep.n_max = n_max;
  const auto brute = brute_force_evolution(model.params, model.space(), n_max);
  const auto kernel = model.lumped();
  std::optional<KrawtchoukTable> kt;
  try {
    kt = build_table(model.spherical(), model.params.n);
  } catch (const GuardExceeded&) {
  }
  std::optional<SpectralEvaluator> spectral;
  if (kt) {
    spectral.emplace(*kt, model.spherical(), model.params);
    rep.spectral_vs_lumped = 0.0;
  }
  auto mu = TypeDistribution::point_mass(kernel.types());
  for (int N = 0; N <= n_max; ++N) {
    rep.brute_vs_lumped = std::max(rep.brute_vs_lumped, max_deviation(brute[static_cast<std::size_t>(N)], mu));
    if (spectral) rep.spectral_vs_lumped = std::max(*rep.spectral_vs_lumped, max_deviation(spectral->distribution(N), mu));
    mu = kernel.step(mu);
  }
  return rep;
}

// max_k |P phi_k - f(k) phi_k| with phi_k(j) = conj(Omega_k(j)).
inline double eigen_relation_defect(const UrnModel& model, const KrawtchoukTable& kt) {
  const auto kernel = model.lumped();
  double worst = 0.0;
  for (std::size_t k = 0; k < kt.size(); ++k) {
    const Eigen::VectorXcd phi = kt.values.row(static_cast<Eigen::Index>(k)).transpose().conjugate();
    const cplx f = fourier_coefficient(model.spherical(), model.params.m, model.params.p, kt.comps->at(k));
    worst = std::max(worst, (kernel.apply(phi) - f * phi).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Largest n <= cap with r^n within the brute-force guard.
inline int brute_force_size(std::size_t r, int cap) {
  int n = 0;
  std::size_t states = 1;
  while (n < cap && states * r <= kMaxBruteForceStates) {
    states *= r;
    ++n;
  }
  return std::max(n, 1);
}

}  // namespace ehrenfest
