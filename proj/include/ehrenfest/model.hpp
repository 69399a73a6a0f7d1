#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ehrenfest/families.hpp"
#include "ehrenfest/gelfand.hpp"
#include "ehrenfest/urn_chain.hpp"

namespace ehrenfest {

// A certified pair with its spectral data; shared by every model built on it.
struct CertifiedPair {
  std::shared_ptr<const HomogeneousSpace> space;
  SphericalTable spherical;
  IntersectionNumbers intersections;

  static CertifiedPair build(HomogeneousSpace space, const SphericalOptions& opt = {}) {
    auto shared = std::make_shared<const HomogeneousSpace>(std::move(space));
    auto analysis = analyze_pair(*shared, opt);
    if (!analysis.certificate) {
      const auto& w = *analysis.certificate.witness;
      throw ConsistencyError("not a Gelfand pair: A_" + std::to_string(w.t) + " and A_" + std::to_string(w.u) +
                             " do not commute");
    }
    return {shared, std::move(*analysis.spherical), std::move(*analysis.intersections)};
  }
  static CertifiedPair build(const PairSpec& spec, const SphericalOptions& opt = {}) { return build(spec.build(), opt); }

  std::size_t r() const { return space->r(); }
  std::size_t s() const { return space->s(); }
  int m() const { return space->m(); }
};

// An urn model: a certified pair plus (n, p).
struct UrnModel {
  CertifiedPair pair;
  ModelParams params;

  static UrnModel with_p(CertifiedPair pair, int n, double p) {
    const int m = pair.m();
    return {std::move(pair), ModelParams::make(n, p, m)};
  }
  static UrnModel with_mp(CertifiedPair pair, int n, double mp) {
    const int m = pair.m();
    return {std::move(pair), ModelParams::from_mp(n, mp, m)};
  }

  const HomogeneousSpace& space() const { return *pair.space; }
  const SphericalTable& spherical() const { return pair.spherical; }
  const IntersectionNumbers& intersections() const { return pair.intersections; }

  LumpedKernel lumped() const { return LumpedKernel(params, pair.intersections); }
  std::vector<double> uniform() const {
    return uniform_type_law(CompositionSet(static_cast<int>(pair.s()), params.n), pair.spherical.valencies, pair.r());
  }
};

}  // namespace ehrenfest
