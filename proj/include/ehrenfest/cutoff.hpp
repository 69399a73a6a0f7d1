#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ehrenfest/composition.hpp"
#include "ehrenfest/error.hpp"
#include "ehrenfest/gelfand.hpp"
#include "ehrenfest/krawtchouk.hpp"
#include "ehrenfest/model.hpp"
#include "ehrenfest/numeric.hpp"
#include "ehrenfest/urn_chain.hpp"

namespace ehrenfest {

// Which hypotheses of the cutoff bounds hold for a model.
struct Assumptions {
  bool all_real = false;
  double M = 0.0;
  bool M_below_one = false;
  double mp = 0.0;
  bool mp_ok = false;  // 0 < mp <= 1/2

  bool schedule_defined() const { return all_real && M_below_one && mp > 0.0; }
  bool all_hold() const { return all_real && M_below_one && mp_ok; }
};

inline Assumptions check_assumptions(const SphericalTable& st, const ModelParams& params) {
  Assumptions a;
  a.all_real = st.all_real;
  a.M = st.M;
  a.M_below_one = st.all_real && st.M < 1.0;
  a.mp = params.mp();
  a.mp_ok = params.within_bound_regime();
  return a;
}

// t_mix(c) = floor(n / (2 mp (1 - M)) * (log(n (r - 1)) + c)), clamped at 0.
struct CutoffSchedule {
  int n = 0;
  std::size_t r = 0;
  double mp = 0.0;
  double M = 0.0;

  static CutoffSchedule make(const SphericalTable& st, const ModelParams& params) {
    if (!st.all_real) throw ParameterError("cutoff schedule needs real spherical functions");
    if (!(st.M < 1.0)) throw ParameterError("cutoff schedule needs M < 1");
    if (!(params.mp() > 0.0)) throw ParameterError("cutoff schedule needs mp > 0");
    return {params.n, st.r, params.mp(), st.M};
  }

  double scale() const { return n / (2.0 * mp * (1.0 - M)); }
  double log_term() const { return std::log(static_cast<double>(n) * static_cast<double>(r - 1)); }
  int t_mix(double c) const {
    const double t = std::floor(scale() * (log_term() + c));
    return t < 0.0 ? 0 : static_cast<int>(t);
  }
};

inline double upper_bound_value(double c) { return 0.25 * (std::exp(std::exp(-c)) - 1.0); }

// (1/4) sum_{k != (n,0,...,0)} d_k |f(k)|^{2N}, accumulated in log space.
inline double ub_lemma_sum(const CompositionSet& comps, const SphericalTable& st, const ModelParams& params, int N) {
  std::vector<double> logs;
  logs.reserve(comps.size());
  for (std::size_t idx = 1; idx < comps.size(); ++idx) {
    const double af = std::abs(fourier_coefficient(st, params.m, params.p, comps.at(idx)));
    const double ld = log_dimension(comps[idx], st.dims);
    if (N == 0) {
      logs.push_back(ld);
    } else if (af > 0.0) {
      logs.push_back(ld + 2.0 * N * std::log(af));
    }
  }
  if (logs.empty()) return 0.0;
  return 0.25 * std::exp(log_sum_exp(logs));
}

inline double ub_lemma_sum(const KrawtchoukTable& kt, const SphericalTable& st, const ModelParams& params, int N) {
  return ub_lemma_sum(*kt.comps, st, params, N);
}

// ---------------------------------------------------------------------------
// The Q statistic Q(x) = (1/n) sum_i omega_{i*}(x_i).

// omega_{i*}^2 = sum_j a_j omega_j, with i* the index attaining M.
struct QStatistic {
  std::size_t index = 1;
  std::vector<double> a;
};

namespace detail {

// Coefficients of omega_i * conj(omega_i) in the spherical basis, from the
// orthogonality relation; residual-checked against the table.
inline std::vector<cplx> modulus_square_coefficients(const SphericalTable& st, std::size_t i) {
  const auto s = st.s;
  const auto ii = static_cast<Eigen::Index>(i);
  std::vector<cplx> a(s);
  for (std::size_t j = 0; j < s; ++j) {
    cplx acc = 0.0;
    for (std::size_t t = 0; t < s; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      acc += static_cast<double>(st.valencies[t]) * std::norm(st.omega(ii, ti)) * std::conj(st.omega(static_cast<Eigen::Index>(j), ti));
    }
    a[j] = acc * static_cast<double>(st.dims[j]) / static_cast<double>(st.r);
  }
  for (std::size_t t = 0; t < s; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    cplx rebuilt = 0.0;
    for (std::size_t j = 0; j < s; ++j) rebuilt += a[j] * st.omega(static_cast<Eigen::Index>(j), ti);
    if (std::abs(rebuilt - std::norm(st.omega(ii, ti))) > 1e-8) {
      throw NumericalFailure("linearization residual exceeds 1e-8 (spherical table inconsistent)");
    }
  }
  return a;
}

}  // namespace detail

inline QStatistic linearization(const SphericalTable& st) {
  if (!st.all_real) throw ParameterError("linearization needs real spherical functions");
  if (st.s < 2) throw ParameterError("linearization needs a nontrivial spherical function");
  QStatistic q;
  q.index = st.slowest_index();
  for (const auto& z : detail::modulus_square_coefficients(st, q.index)) q.a.push_back(z.real());
  return q;
}

struct QMoments {
  double mean = 0.0;
  double second = 0.0;
  double variance = 0.0;
};

// Closed forms for E[Q] and E[Q^2] under nu_N.
inline QMoments q_moments(const SphericalTable& st, const QStatistic& q, const ModelParams& params, int N) {
  if (!st.all_real) throw ParameterError("q_moments needs real spherical functions");
  const double n = params.n;
  const double mp = params.mp();
  const double w_star = st.at_generator(q.index).real();
  QMoments out;
  out.mean = std::pow(1.0 - (mp / n) * (1.0 - w_star), N);
  CompensatedSum second;
  second.add(q.a[0] / n);
  for (std::size_t j = 1; j < st.s; ++j)
    second.add(q.a[j] / n * std::pow(1.0 - (mp / n) * (1.0 - st.at_generator(j).real()), N));
  second.add((1.0 - 1.0 / n) * std::pow(1.0 - (2.0 * mp / n) * (1.0 - w_star), N));
  out.second = second.value();
  out.variance = out.second - out.mean * out.mean;
  return out;
}

// Q on a state of type j.
inline cplx q_value(const SphericalTable& st, std::size_t index, std::span<const int> type) {
  int n = 0;
  for (int v : type) n += v;
  cplx acc = 0.0;
  for (std::size_t t = 0; t < type.size(); ++t)
    acc += (static_cast<double>(type[t]) / n) * st.omega(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(t));
  return acc;
}

// Moments of Q under an explicit type law. The variance is E|Q|^2 - |E Q|^2.
inline QMoments exact_q_moments(const TypeDistribution& dist, const SphericalTable& st, std::size_t index) {
  CompensatedComplexSum mean;
  CompensatedSum second;
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    const cplx q = q_value(st, index, (*dist.types)[idx]);
    mean.add(dist[idx] * q);
    second.add(dist[idx] * std::norm(q));
  }
  QMoments out;
  out.mean = mean.value().real();
  out.second = second.value();
  out.variance = out.second - std::norm(mean.value());
  return out;
}

struct UniformQCheck {
  std::size_t index = 1;
  double a0 = 0.0;
  double predicted = 0.0;  // a0 / n
  cplx mean = 0.0;
  double variance = 0.0;
};

// E_pi(Q) = 0 and V_pi(Q) = a0 / n, checked against the exact uniform type
// law. For complex tables Q uses omega_1 and a0 is the constant term of
// |omega_1|^2.
inline UniformQCheck V_pi_check(const SphericalTable& st, int n, double tol = 1e-10) {
  if (st.s < 2) throw ParameterError("V_pi_check needs a nontrivial spherical function");
  UniformQCheck out;
  out.index = st.all_real ? st.slowest_index() : 1;
  out.a0 = detail::modulus_square_coefficients(st, out.index)[0].real();
  out.predicted = out.a0 / n;
  const CompositionSet types(static_cast<int>(st.s), n);
  const auto law = uniform_type_law(types, st.valencies, st.r);
  CompensatedComplexSum mean;
  CompensatedSum second;
  for (std::size_t idx = 0; idx < types.size(); ++idx) {
    const cplx q = q_value(st, out.index, types[idx]);
    mean.add(law[idx] * q);
    second.add(law[idx] * std::norm(q));
  }
  out.mean = mean.value();
  out.variance = second.value() - std::norm(out.mean);
  if (std::abs(out.mean) > tol || std::abs(out.variance - out.predicted) > tol) {
    throw ConsistencyError("uniform moments of Q disagree with E = 0, V = a0/n");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mixing curves.

enum class Method { lumped, spectral };

inline std::string to_string(Method m) { return m == Method::lumped ? "lumped" : "spectral"; }
inline Method parse_method(const std::string& text) {
  if (text == "lumped") return Method::lumped;
  if (text == "spectral") return Method::spectral;
  throw ParameterError("unknown method '" + text + "' (expected lumped or spectral)");
}

struct BoundCheck {
  double c = 0.0;
  int t_plus = 0;
  double tv_at_t_plus = 0.0;
  double ub = 0.0;
  // sqrt of the upper-bound-lemma sum at t_plus: the bound tv <= sqrt(sum).
  double lemma_bound = 0.0;
  bool pass = false;
  int t_minus = 0;
  double tv_at_t_minus = 0.0;
};

struct MixCurve {
  Method method = Method::lumped;
  std::vector<int> N;
  std::vector<double> tv;
  Assumptions assumptions;
  std::optional<CutoffSchedule> schedule;
  std::vector<BoundCheck> bounds;

  double tv_at(int n) const {
    for (std::size_t i = 0; i < N.size(); ++i)
      if (N[i] == n) return tv[i];
    throw ParameterError("N = " + std::to_string(n) + " is not on the curve");
  }

  // Largest upward step; <= 0 for a nonincreasing curve.
  double worst_increase() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < tv.size(); ++i) worst = std::max(worst, tv[i] - tv[i - 1]);
    return worst;
  }
};

// Bound tolerance on tv(t_mix(+c)) <= upper_bound_value(c).
inline constexpr double kBoundSlack = 1e-9;

struct CurveOptions {
  Method method = Method::lumped;
  std::optional<int> n_max;  // default: past the schedule's largest marker
  std::vector<double> cs{0.5, 1.0, 2.0, 3.0};
  bool with_lemma_bound = true;
};

inline MixCurve mixing_curve(const UrnModel& model, const CurveOptions& opt = {}) {
  const auto& st = model.spherical();
  MixCurve curve;
  curve.method = opt.method;
  curve.assumptions = check_assumptions(st, model.params);
  if (curve.assumptions.schedule_defined()) curve.schedule = CutoffSchedule::make(st, model.params);

  int n_max = 0;
  if (opt.n_max) {
    n_max = *opt.n_max;
  } else if (curve.schedule) {
    double c_top = 0.0;
    for (double c : opt.cs) c_top = std::max(c_top, c);
    n_max = curve.schedule->t_mix(c_top + 1.0) + 1;
  } else {
    n_max = 100 * model.params.n;
  }
  const auto uniform = model.uniform();

  if (opt.method == Method::lumped) {
    const auto kernel = model.lumped();
    auto mu = TypeDistribution::point_mass(kernel.types());
    for (int N = 0; N <= n_max; ++N) {
      curve.N.push_back(N);
      curve.tv.push_back(tv_distance(mu, uniform));
      if (N < n_max) mu = kernel.step(mu);
    }
  } else {
    const auto kt = build_table(st, model.params.n);
    const SpectralEvaluator eval(kt, st, model.params);
    for (int N = 0; N <= n_max; ++N) {
      curve.N.push_back(N);
      curve.tv.push_back(tv_distance(eval.distribution(N), uniform));
    }
  }

  if (curve.schedule) {
    const CompositionSet comps(static_cast<int>(st.s), model.params.n);
    for (double c : opt.cs) {
      BoundCheck b;
      b.c = c;
      b.ub = upper_bound_value(c);
      b.t_plus = curve.schedule->t_mix(c);
      b.t_minus = curve.schedule->t_mix(-c);
      if (b.t_plus <= n_max) {
        b.tv_at_t_plus = curve.tv_at(b.t_plus);
        b.pass = b.tv_at_t_plus <= b.ub + kBoundSlack;
      }
      if (b.t_minus <= n_max) b.tv_at_t_minus = curve.tv_at(b.t_minus);
      if (opt.with_lemma_bound) b.lemma_bound = std::sqrt(ub_lemma_sum(comps, st, model.params, b.t_plus));
      curve.bounds.push_back(b);
    }
  }
  return curve;
}

// Steps between tv first dropping to <= hi and first dropping to <= lo,
// divided by t_mix(0).
struct TransitionWindow {
  int enter = -1;
  int leave = -1;
  double normalized = std::numeric_limits<double>::quiet_NaN();
};

inline TransitionWindow transition_window(const MixCurve& curve, double hi = 0.9, double lo = 0.1) {
  TransitionWindow w;
  for (std::size_t i = 0; i < curve.tv.size(); ++i) {
    if (w.enter < 0 && curve.tv[i] <= hi) w.enter = curve.N[i];
    if (w.leave < 0 && curve.tv[i] <= lo) w.leave = curve.N[i];
  }
  if (w.enter >= 0 && w.leave >= 0 && curve.schedule) {
    w.normalized = static_cast<double>(w.leave - w.enter) / curve.schedule->t_mix(0.0);
  }
  return w;
}

}  // namespace ehrenfest
