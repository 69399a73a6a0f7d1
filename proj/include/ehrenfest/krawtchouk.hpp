#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "ehrenfest/composition.hpp"
#include "ehrenfest/gelfand.hpp"
#include "ehrenfest/numeric.hpp"

namespace ehrenfest {

// Largest Krawtchouk table (|X(s,n)|^2 complex entries) we agree to build.
inline constexpr std::size_t kMaxTableEntries = 16'000'000;
// and the most multiply-adds the recursion may spend building it.
inline constexpr double kMaxTableWork = 2e9;

// Omega_k on a state of type j by direct coefficient extraction:
// [t^k] prod_t (sum_i omega_i(D_t) t_i)^{j_t} / multinomial(n; k).
// Each factor is expanded by the multinomial theorem and the factors are
// convolved, keeping only monomials dominated by k.
inline cplx krawtchouk_value(const SphericalTable& st, const Composition& k, const Composition& j) {
  const auto s = st.s;
  if (k.size() != s || j.size() != s) throw ParameterError("composition length differs from the spherical count");
  const int n = k.total();
  if (j.total() != n) throw ParameterError("k and j must be compositions of the same n");

  using Poly = std::map<std::vector<int>, cplx>;
  Poly acc{{std::vector<int>(s, 0), cplx(1.0)}};
  for (std::size_t t = 0; t < s; ++t) {
    const int power = j[t];
    if (power == 0) continue;
    Poly factor;
    const CompositionSet terms(static_cast<int>(s), power);
    for (std::size_t idx = 0; idx < terms.size(); ++idx) {
      const auto a = terms[idx];
      bool dominated = true;
      for (std::size_t i = 0; i < s; ++i) dominated = dominated && a[i] <= k[i];
      if (!dominated) continue;
      cplx coef = std::exp(log_multinomial(power, a));
      for (std::size_t i = 0; i < s; ++i) coef *= std::pow(st.omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)), a[i]);
      factor[{a.begin(), a.end()}] = coef;
    }
    Poly next;
    for (const auto& [pa, ca] : acc) {
      for (const auto& [pb, cb] : factor) {
        std::vector<int> sum(s);
        bool ok = true;
        for (std::size_t i = 0; i < s; ++i) {
          sum[i] = pa[i] + pb[i];
          ok = ok && sum[i] <= k[i];
        }
        if (ok) next[sum] += ca * cb;
      }
    }
    acc = std::move(next);
  }
  const auto it = acc.find(k.parts);
  if (it == acc.end()) return 0.0;
  return it->second / std::exp(log_multinomial(n, k.parts));
}

// Fourier coefficient f(k) = (1 - mp) + mp sum_i (k_i/n) conj(omega_i(x0)).
inline cplx fourier_coefficient(const SphericalTable& st, double m, double p, const Composition& k) {
  const double mp = m * p;
  if (!(mp >= 0.0 && mp <= 1.0)) throw ParameterError("mp = " + std::to_string(mp) + " is outside [0, 1]");
  const int n = k.total();
  if (k.size() != st.s) throw ParameterError("composition length differs from the spherical count");
  if (n == 0) return 1.0;
  cplx avg = 0.0;
  for (std::size_t i = 0; i < st.s; ++i) avg += (static_cast<double>(k[i]) / n) * std::conj(st.at_generator(i));
  return (1.0 - mp) + mp * avg;
}

// log multinomial(n; j) + sum_t j_t log kappa_t: the number of states of type j.
inline double log_type_count(std::span<const int> j, std::span<const int> valencies) {
  int n = 0;
  for (int v : j) n += v;
  double out = log_multinomial(n, j);
  for (std::size_t t = 0; t < j.size(); ++t) out += j[t] * std::log(static_cast<double>(valencies[t]));
  return out;
}

// log multinomial(n; k) + sum_i k_i log d_i: the dimension d_k.
inline double log_dimension(std::span<const int> k, std::span<const int> dims) { return log_type_count(k, dims); }

// Omega_k(j) for all pairs of compositions, with log dimensions and log type
// counts. Row k, column j; both in canonical composition order.
struct KrawtchoukTable {
  int n = 0;
  int s = 0;
  std::shared_ptr<const CompositionSet> comps;
  Eigen::MatrixXcd values;
  std::vector<double> log_dims;
  std::vector<double> log_counts;
  bool real = false;

  std::size_t size() const { return comps->size(); }
  cplx operator()(std::size_t k, std::size_t j) const {
    return values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
  }
};

namespace detail {

// Successor ranks for the normalized product recursion: for every
// composition a of degree d and part i, rank of a + e_i in degree d + 1.
struct DegreeLadder {
  std::vector<CompositionSet> levels;
  std::vector<std::vector<std::size_t>> up;  // up[d][idx * s + i]

  DegreeLadder(int s, int n) {
    for (int d = 0; d <= n; ++d) levels.emplace_back(s, d);
    up.resize(static_cast<std::size_t>(n));
    std::vector<int> tmp(static_cast<std::size_t>(s));
    for (int d = 0; d < n; ++d) {
      const auto& lo = levels[static_cast<std::size_t>(d)];
      const auto& hi = levels[static_cast<std::size_t>(d + 1)];
      auto& u = up[static_cast<std::size_t>(d)];
      u.resize(lo.size() * static_cast<std::size_t>(s));
      for (std::size_t idx = 0; idx < lo.size(); ++idx) {
        const auto a = lo[idx];
        for (int i = 0; i < s; ++i) {
          std::copy(a.begin(), a.end(), tmp.begin());
          ++tmp[static_cast<std::size_t>(i)];
          u[idx * static_cast<std::size_t>(s) + static_cast<std::size_t>(i)] = hi.rank(tmp);
        }
      }
    }
  }
};

}  // namespace detail

// Builds the full table. Works with normalized coefficients
// c_d(a) = [t^a] P_d / multinomial(d; a), which obey
// c_{d+1}(a) = sum_i (a_i / (d+1)) omega_i(D_t) c_d(a - e_i)
// when P_{d+1} = P_d * (sum_i omega_i(D_t) t_i), so every intermediate stays
// bounded by 1 in modulus. Columns j are reached by a depth-first walk over
// nondecreasing class sequences, sharing prefixes.
inline KrawtchoukTable build_table(const SphericalTable& st, int n) {
  const int s = static_cast<int>(st.s);
  auto comps = std::make_shared<const CompositionSet>(s, n);
  const std::size_t size = comps->size();
  if (size * size > kMaxTableEntries) {
    throw GuardExceeded("Krawtchouk table for |X(" + std::to_string(s) + ", " + std::to_string(n) + ")| = " +
                        std::to_string(size) + " exceeds the memory guard; use the lumped method instead");
  }
  double work = 0.0;
  for (int d = 1; d <= n; ++d)
    work += static_cast<double>(composition_count(s, d)) * static_cast<double>(composition_count(s, d - 1)) * s;
  if (work > kMaxTableWork) {
    throw GuardExceeded("Krawtchouk table for n = " + std::to_string(n) + ", s = " + std::to_string(s) +
                        " needs about " + std::to_string(static_cast<long long>(work)) +
                        " operations; use the lumped method instead");
  }
  KrawtchoukTable kt;
  kt.n = n;
  kt.s = s;
  kt.comps = comps;
  kt.values = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  kt.real = st.all_real;
  for (std::size_t idx = 0; idx < size; ++idx) {
    kt.log_dims.push_back(log_dimension((*comps)[idx], st.dims));
    kt.log_counts.push_back(log_type_count((*comps)[idx], st.valencies));
  }

  const detail::DegreeLadder ladder(s, n);
  std::vector<Eigen::VectorXcd> stack(static_cast<std::size_t>(n + 1));
  stack[0] = Eigen::VectorXcd::Ones(1);
  std::vector<int> j(static_cast<std::size_t>(s), 0);

  auto step = [&](int d, int t) {
    const auto& lo = ladder.levels[static_cast<std::size_t>(d)];
    const auto& hi_level = ladder.levels[static_cast<std::size_t>(d + 1)];
    const auto& up = ladder.up[static_cast<std::size_t>(d)];
    const auto& src = stack[static_cast<std::size_t>(d)];
    auto& dst = stack[static_cast<std::size_t>(d + 1)];
    dst = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(hi_level.size()));
    const double inv = 1.0 / static_cast<double>(d + 1);
    for (std::size_t idx = 0; idx < lo.size(); ++idx) {
      const cplx c = src(static_cast<Eigen::Index>(idx));
      if (c == 0.0) continue;
      for (int i = 0; i < s; ++i) {
        const auto hi = up[idx * static_cast<std::size_t>(s) + static_cast<std::size_t>(i)];
        const double weight = hi_level[hi][static_cast<std::size_t>(i)] * inv;
        dst(static_cast<Eigen::Index>(hi)) += weight * c * st.omega(i, t);
      }
    }
  };

  auto walk = [&](auto&& self, int d, int t_min) -> void {
    if (d == n) {
      const auto col = static_cast<Eigen::Index>(comps->rank(j));
      kt.values.col(col) = stack[static_cast<std::size_t>(n)];
      return;
    }
    for (int t = t_min; t < s; ++t) {
      step(d, t);
      ++j[static_cast<std::size_t>(t)];
      self(self, d + 1, t);
      --j[static_cast<std::size_t>(t)];
    }
  };
  walk(walk, 0, 0);

  if (kt.real) kt.values = kt.values.real().cast<cplx>();
  return kt;
}

}  // namespace ehrenfest
