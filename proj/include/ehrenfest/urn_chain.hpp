#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <random>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ehrenfest/composition.hpp"
#include "ehrenfest/error.hpp"
#include "ehrenfest/gelfand.hpp"
#include "ehrenfest/group.hpp"
#include "ehrenfest/krawtchouk.hpp"
#include "ehrenfest/numeric.hpp"

namespace ehrenfest {

// n balls in r urns. Each step, for every ball and every one of its m
// generator neighbours, that ball moves there with probability p / n;
// with the remaining probability 1 - mp nothing moves.
struct ModelParams {
  int n = 1;
  double p = 0.0;
  int m = 1;

  static ModelParams make(int n, double p, int m) {
    if (n < 1) throw ParameterError("n must be >= 1");
    if (m < 1) throw ParameterError("m must be >= 1");
    const double mp = m * p;
    if (!(mp >= 0.0 && mp <= 1.0)) throw ParameterError("mp = " + std::to_string(mp) + " is outside [0, 1]");
    return {n, p, m};
  }
  static ModelParams from_mp(int n, double mp, int m) { return make(n, mp / m, m); }

  double mp() const { return m * p; }
  // 0 < mp <= 1/2, the range where the cutoff bounds are proved.
  bool within_bound_regime() const { return mp() > 0.0 && mp() <= 0.5; }
};

// Probability mass per type vector, in canonical composition order.
struct TypeDistribution {
  std::shared_ptr<const CompositionSet> types;
  std::vector<double> mass;

  int n() const { return types->n(); }
  int s() const { return types->s(); }
  std::size_t size() const { return mass.size(); }
  double operator[](std::size_t idx) const { return mass[idx]; }
  double at(const Composition& k) const { return mass[types->rank(k)]; }
  double total() const {
    CompensatedSum acc;
    for (double v : mass) acc.add(v);
    return acc.value();
  }

  static TypeDistribution point_mass(std::shared_ptr<const CompositionSet> types, std::size_t idx = 0) {
    TypeDistribution d{std::move(types), {}};
    d.mass.assign(d.types->size(), 0.0);
    d.mass[idx] = 1.0;
    return d;
  }
};

inline double max_deviation(const TypeDistribution& a, const TypeDistribution& b) {
  if (a.size() != b.size()) throw ParameterError("distributions over different type sets");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// A configuration of the n balls: coordinate i is the coset (urn) of ball i.
struct StateVector {
  std::vector<int> coords;
};

// Counts of coordinates per double-coset class, relative to the base state.
inline Composition type_of(const HomogeneousSpace& space, const StateVector& x) {
  Composition k{std::vector<int>(space.s(), 0)};
  for (int c : x.coords) ++k.parts[static_cast<std::size_t>(space.class_of(c))];
  return k;
}

inline double kernel_entry(const ModelParams& params, const HomogeneousSpace& space, const StateVector& x,
                           const StateVector& y) {
  if (x.coords.size() != y.coords.size() || x.coords.size() != static_cast<std::size_t>(params.n)) {
    throw ParameterError("state length differs from n");
  }
  int differing = -1;
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    if (x.coords[i] == y.coords[i]) continue;
    if (differing >= 0) return 0.0;
    differing = static_cast<int>(i);
  }
  if (differing < 0) return 1.0 - params.mp();
  const auto i = static_cast<std::size_t>(differing);
  return space.relation(x.coords[i], y.coords[i]) == space.generator_class() ? params.p / params.n : 0.0;
}

// The uniform law pi pushed to types: |type j| / r^n.
inline std::vector<double> uniform_type_law(const CompositionSet& types, std::span<const int> valencies, std::size_t r) {
  std::vector<double> law(types.size());
  const double log_total = types.n() * std::log(static_cast<double>(r));
  for (std::size_t idx = 0; idx < types.size(); ++idx) law[idx] = std::exp(log_type_count(types[idx], valencies) - log_total);
  return law;
}

// nu_N is constant on types, so the state-level distance reduces to types.
// Positive-part form sum_j (mu_j - pi_j)^+.
inline double tv_distance(const TypeDistribution& dist, std::span<const double> uniform) {
  if (dist.size() != uniform.size()) throw ParameterError("distribution and uniform law differ in length");
  CompensatedSum acc;
  for (std::size_t idx = 0; idx < dist.size(); ++idx) acc.add(std::max(0.0, dist[idx] - uniform[idx]));
  return acc.value();
}

// ---------------------------------------------------------------------------
// Brute force on the full r^n state space; the test oracle.

inline constexpr std::size_t kMaxBruteForceStates = 200'000;

class FullChain {
 public:
  FullChain(const ModelParams& params, const HomogeneousSpace& space) : params_(params), space_(&space) {
    if (params.m != space.m()) throw ParameterError("model m differs from the generator valency");
    const auto r = space.r();
    std::size_t states = 1;
    for (int i = 0; i < params.n; ++i) {
      states *= r;
      if (states > kMaxBruteForceStates) {
        throw GuardExceeded("r^n exceeds " + std::to_string(kMaxBruteForceStates) +
                            " states; use the lumped or spectral method");
      }
    }
    states_ = states;
    const double move = params.p / params.n;
    offsets_.reserve(states + 1);
    offsets_.push_back(0);
    std::vector<double> column_sums(states, 0.0);
    std::vector<int> digits(static_cast<std::size_t>(params.n));
    for (std::size_t x = 0; x < states; ++x) {
      decode(x, digits);
      CompensatedSum row;
      push(x, 1.0 - params.mp(), column_sums, row);
      std::size_t place = 1;
      for (int i = 0; i < params.n; ++i) {
        const int c = digits[static_cast<std::size_t>(i)];
        for (int y : space.neighbors(c)) {
          const std::size_t target = x + place * static_cast<std::size_t>(y) - place * static_cast<std::size_t>(c);
          push(target, move, column_sums, row);
        }
        place *= r;
      }
      if (std::abs(row.value() - 1.0) > 1e-12) throw ConsistencyError("full kernel row does not sum to 1");
      offsets_.push_back(targets_.size());
    }
    for (double c : column_sums)
      if (std::abs(c - 1.0) > 1e-12) throw ConsistencyError("full kernel is not doubly stochastic");
    types_ = std::make_shared<const CompositionSet>(static_cast<int>(space.s()), params.n);
    type_index_.resize(states);
    for (std::size_t x = 0; x < states; ++x) {
      decode(x, digits);
      type_index_[x] = types_->rank(type_of(space, StateVector{digits}));
    }
  }

  std::size_t states() const { return states_; }
  std::shared_ptr<const CompositionSet> types() const { return types_; }

  StateVector state(std::size_t x) const {
    std::vector<int> digits(static_cast<std::size_t>(params_.n));
    decode(x, digits);
    return {digits};
  }
  std::size_t type_index(std::size_t x) const { return type_index_[x]; }

  // Row of the kernel as (target, probability) pairs.
  std::vector<std::pair<std::size_t, double>> row(std::size_t x) const {
    std::vector<std::pair<std::size_t, double>> out;
    for (auto e = offsets_[x]; e < offsets_[x + 1]; ++e) out.emplace_back(targets_[e], probs_[e]);
    return out;
  }

  std::vector<double> step(const std::vector<double>& mu) const {
    std::vector<double> next(states_, 0.0);
    for (std::size_t x = 0; x < states_; ++x) {
      const double w = mu[x];
      if (w == 0.0) continue;
      for (auto e = offsets_[x]; e < offsets_[x + 1]; ++e) next[targets_[e]] += w * probs_[e];
    }
    return next;
  }

  TypeDistribution aggregate(const std::vector<double>& mu) const {
    TypeDistribution d{types_, std::vector<double>(types_->size(), 0.0)};
    for (std::size_t x = 0; x < states_; ++x) d.mass[type_index_[x]] += mu[x];
    return d;
  }

 private:
  void decode(std::size_t x, std::vector<int>& digits) const {
    const auto r = space_->r();
    for (auto& d : digits) {
      d = static_cast<int>(x % r);
      x /= r;
    }
  }
  void push(std::size_t target, double prob, std::vector<double>& column_sums, CompensatedSum& row) {
    targets_.push_back(target);
    probs_.push_back(prob);
    column_sums[target] += prob;
    row.add(prob);
  }

  ModelParams params_;
  const HomogeneousSpace* space_;
  std::size_t states_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> targets_;
  std::vector<double> probs_;
  std::shared_ptr<const CompositionSet> types_;
  std::vector<std::size_t> type_index_;
};

// Type laws of P^N started at the base state, for N = 0..n_max.
inline std::vector<TypeDistribution> brute_force_evolution(const ModelParams& params, const HomogeneousSpace& space,
                                                           int n_max) {
  const FullChain chain(params, space);
  std::vector<double> mu(chain.states(), 0.0);
  mu[0] = 1.0;
  std::vector<TypeDistribution> out;
  for (int N = 0; N <= n_max; ++N) {
    out.push_back(chain.aggregate(mu));
    if (N < n_max) mu = chain.step(mu);
  }
  return out;
}

inline TypeDistribution brute_force_distribution(const ModelParams& params, const HomogeneousSpace& space, int N) {
  return brute_force_evolution(params, space, N).back();
}

// ---------------------------------------------------------------------------
// Exact lumped chain on types.

class LumpedKernel {
 public:
  struct Move {
    std::size_t target;
    double prob;
  };

  LumpedKernel(const ModelParams& params, const IntersectionNumbers& inx)
      : types_(std::make_shared<const CompositionSet>(static_cast<int>(inx.s()), params.n)) {
    if (params.m != inx.m) throw ParameterError("model m differs from the generator valency");
    const auto s = inx.s();
    const double move = params.p / params.n;
    hold_.resize(types_->size());
    moves_.resize(types_->size());
    std::vector<int> tmp(s);
    for (std::size_t idx = 0; idx < types_->size(); ++idx) {
      const auto j = (*types_)[idx];
      CompensatedSum row;
      CompensatedSum hold;
      hold.add(1.0 - params.mp());
      for (std::size_t t = 0; t < s; ++t) {
        if (j[t] == 0) continue;
        for (std::size_t u = 0; u < s; ++u) {
          if (inx(t, u) == 0) continue;
          const double prob = j[t] * move * inx(t, u);
          if (u == t) {
            hold.add(prob);
            continue;
          }
          std::copy(j.begin(), j.end(), tmp.begin());
          --tmp[t];
          ++tmp[u];
          moves_[idx].push_back({types_->rank(tmp), prob});
          row.add(prob);
        }
      }
      hold_[idx] = hold.value();
      row.add(hold_[idx]);
      if (std::abs(row.value() - 1.0) > 1e-12) {
        throw ConsistencyError("lumped kernel row " + types_->label(idx) + " sums to " + std::to_string(row.value()));
      }
    }
  }

  std::shared_ptr<const CompositionSet> types() const { return types_; }
  std::size_t size() const { return types_->size(); }
  double hold(std::size_t idx) const { return hold_[idx]; }
  std::span<const Move> moves(std::size_t idx) const { return moves_[idx]; }

  // mu -> mu P
  TypeDistribution step(const TypeDistribution& mu) const {
    TypeDistribution next{types_, std::vector<double>(size(), 0.0)};
    for (std::size_t idx = 0; idx < size(); ++idx) {
      const double w = mu.mass[idx];
      if (w == 0.0) continue;
      next.mass[idx] += w * hold_[idx];
      for (const auto& mv : moves_[idx]) next.mass[mv.target] += w * mv.prob;
    }
    return next;
  }

  // phi -> P phi
  Eigen::VectorXcd apply(const Eigen::VectorXcd& phi) const {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(size()));
    for (std::size_t idx = 0; idx < size(); ++idx) {
      cplx acc = hold_[idx] * phi(static_cast<Eigen::Index>(idx));
      for (const auto& mv : moves_[idx]) acc += mv.prob * phi(static_cast<Eigen::Index>(mv.target));
      out(static_cast<Eigen::Index>(idx)) = acc;
    }
    return out;
  }

 private:
  std::shared_ptr<const CompositionSet> types_;
  std::vector<double> hold_;
  std::vector<std::vector<Move>> moves_;
};

inline LumpedKernel lumped_kernel(const ModelParams& params, const IntersectionNumbers& inx) {
  return LumpedKernel(params, inx);
}

inline TypeDistribution evolve_lumped(const LumpedKernel& kernel, int N) {
  if (N < 0) throw ParameterError("N must be >= 0");
  auto mu = TypeDistribution::point_mass(kernel.types());
  for (int step = 0; step < N; ++step) mu = kernel.step(mu);
  return mu;
}

// ---------------------------------------------------------------------------
// Spectral expansion nu_N = r^-n sum_k d_k f(k)^N Omega_k.

inline constexpr double kImaginaryResidueTol = 1e-8;
inline constexpr double kNegativeMassTol = 1e-8;

struct SpectralDiagnostics {
  int clipped = 0;
  double max_imaginary = 0.0;
  double most_negative = 0.0;
};

class SpectralEvaluator {
 public:
  SpectralEvaluator(const KrawtchoukTable& kt, const SphericalTable& st, const ModelParams& params)
      : kt_(&kt), r_(st.r) {
    if (static_cast<int>(st.s) != kt.s || params.n != kt.n) throw ParameterError("table does not match the model");
    for (std::size_t k = 0; k < kt.size(); ++k) {
      const cplx f = fourier_coefficient(st, params.m, params.p, kt.comps->at(k));
      f_.push_back(f);
      log_abs_f_.push_back(std::log(std::abs(f)));
      phase_f_.push_back(std::abs(f) > 0 ? f / std::abs(f) : cplx(1.0));
    }
  }

  const std::vector<cplx>& fourier() const { return f_; }

  TypeDistribution distribution(int N, SpectralDiagnostics* diag = nullptr) const {
    if (N < 0) throw ParameterError("N must be >= 0");
    const auto& kt = *kt_;
    const double log_rn = kt.n * std::log(static_cast<double>(r_));
    TypeDistribution out{kt.comps, std::vector<double>(kt.size(), 0.0)};
    SpectralDiagnostics local;
    for (std::size_t j = 0; j < kt.size(); ++j) {
      CompensatedComplexSum acc;
      const double base = kt.log_counts[j] - log_rn;
      for (std::size_t k = 0; k < kt.size(); ++k) {
        const cplx omega = kt(k, j);
        const double mag = std::abs(omega);
        if (mag == 0.0) continue;
        double log_term = base + kt.log_dims[k] + std::log(mag);
        cplx phase = omega / mag;
        if (N > 0) {
          if (!std::isfinite(log_abs_f_[k])) continue;  // f(k) = 0
          log_term += N * log_abs_f_[k];
          phase *= std::pow(phase_f_[k], N);
        }
        acc.add(std::exp(log_term) * phase);
      }
      const cplx value = acc.value();
      local.max_imaginary = std::max(local.max_imaginary, std::abs(value.imag()));
      double mass = value.real();
      if (mass < 0.0) {
        local.most_negative = std::min(local.most_negative, mass);
        if (mass >= -kNegativeMassTol) {
          ++local.clipped;
          mass = 0.0;
        }
      }
      out.mass[j] = mass;
    }
    if (diag) *diag = local;
    if (local.max_imaginary >= kImaginaryResidueTol || local.most_negative < -kNegativeMassTol) {
      std::ostringstream msg;
      msg << std::setprecision(3) << "spectral sum lost precision at N = " << N << " (imaginary residue "
          << local.max_imaginary << ", most negative mass " << local.most_negative << "); use the lumped method";
      throw NumericalFailure(msg.str());
    }
    return out;
  }

 private:
  const KrawtchoukTable* kt_;
  std::size_t r_;
  std::vector<cplx> f_;
  std::vector<double> log_abs_f_;
  std::vector<cplx> phase_f_;
};

inline TypeDistribution spectral_distribution(const KrawtchoukTable& kt, const SphericalTable& st,
                                              const ModelParams& params, int N, SpectralDiagnostics* diag = nullptr) {
  return SpectralEvaluator(kt, st, params).distribution(N, diag);
}

// ---------------------------------------------------------------------------
// Monte Carlo.

struct Empirical {
  TypeDistribution frequencies;
  std::vector<std::uint64_t> counts;
  std::uint64_t trials = 0;
};

// Trial t draws from its own mt19937_64 seeded by (seed, t), so results do
// not depend on how trials are scheduled.
inline Empirical simulate(const ModelParams& params, const HomogeneousSpace& space, int N, std::uint64_t trials,
                          std::uint64_t seed) {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (N < 0) throw ParameterError("N must be >= 0");
  if (params.m != space.m()) throw ParameterError("model m differs from the generator valency");
  auto types = std::make_shared<const CompositionSet>(static_cast<int>(space.s()), params.n);
  Empirical out{{types, std::vector<double>(types->size(), 0.0)}, std::vector<std::uint64_t>(types->size(), 0), trials};
  const double hold = 1.0 - params.mp();
  std::vector<int> coords(static_cast<std::size_t>(params.n));
  std::vector<int> type(space.s());
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> ball(0, params.n - 1);
    std::uniform_int_distribution<int> direction(0, params.m - 1);
    std::fill(coords.begin(), coords.end(), 0);
    for (int step = 0; step < N; ++step) {
      if (unit(rng) < hold) continue;
      auto& c = coords[static_cast<std::size_t>(ball(rng))];
      c = space.neighbors(c)[static_cast<std::size_t>(direction(rng))];
    }
    std::fill(type.begin(), type.end(), 0);
    for (int c : coords) ++type[static_cast<std::size_t>(space.class_of(c))];
    ++out.counts[types->rank(type)];
  }
  for (std::size_t idx = 0; idx < types->size(); ++idx)
    out.frequencies.mass[idx] = static_cast<double>(out.counts[idx]) / static_cast<double>(trials);
  return out;
}

}  // namespace ehrenfest
