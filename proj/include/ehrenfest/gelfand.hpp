#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <limits>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ehrenfest/error.hpp"
#include "ehrenfest/group.hpp"

namespace ehrenfest {

using cplx = std::complex<double>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// The orbital matrices A_t on K/L: A_t(x, y) = 1 iff rep(x)^-1 rep(y) lies in
// the double coset D_t. They span the Hecke algebra of the pair.
struct OrbitalSet {
  std::vector<IntMatrix> matrices;

  std::size_t s() const { return matrices.size(); }
  Eigen::Index r() const { return matrices.empty() ? 0 : matrices.front().rows(); }
};

inline OrbitalSet orbitals(const HomogeneousSpace& space) {
  const auto r = static_cast<Eigen::Index>(space.r());
  OrbitalSet orb;
  orb.matrices.assign(space.s(), IntMatrix::Zero(r, r));
  for (Eigen::Index x = 0; x < r; ++x)
    for (Eigen::Index y = 0; y < r; ++y)
      orb.matrices[static_cast<std::size_t>(space.relation(static_cast<int>(x), static_cast<int>(y)))](x, y) = 1;
  return orb;
}

struct CommutationWitness {
  std::size_t t = 0, u = 0;
  Eigen::Index row = 0, col = 0;
  std::int64_t tu = 0, ut = 0;  // (A_t A_u)(row, col) and (A_u A_t)(row, col)
};

// Gelfand certificate: the orbital algebra is commutative (exact integer
// arithmetic). A failure carries the first non-commuting pair.
struct GelfandCertificate {
  bool commutative = true;
  std::optional<CommutationWitness> witness;

  explicit operator bool() const { return commutative; }
};

inline GelfandCertificate certify_gelfand(const OrbitalSet& orb) {
  GelfandCertificate cert;
  for (std::size_t t = 0; t < orb.s(); ++t) {
    for (std::size_t u = t + 1; u < orb.s(); ++u) {
      const IntMatrix tu = orb.matrices[t] * orb.matrices[u];
      const IntMatrix ut = orb.matrices[u] * orb.matrices[t];
      if (tu == ut) continue;
      for (Eigen::Index i = 0; i < tu.rows(); ++i)
        for (Eigen::Index j = 0; j < tu.cols(); ++j)
          if (tu(i, j) != ut(i, j)) {
            cert.commutative = false;
            cert.witness = CommutationWitness{t, u, i, j, tu(i, j), ut(i, j)};
            return cert;
          }
    }
  }
  return cert;
}

struct SphericalOptions {
  double grouping_tol = 1e-9;
  double residual_tol = 1e-8;
  std::uint64_t seed = 20240607;
  int max_attempts = 5;
};

// Zonal spherical functions of a Gelfand pair evaluated on the double cosets.
//
// omega(i, t) = omega_i(D_t). Index 0 is the trivial function; the rest are
// ordered by descending real part, then descending imaginary part, of
// omega_i(x0), with ties broken on successive classes. dims[i] is the
// multiplicity of the constituent V_i in C[K/L].
struct SphericalTable {
  std::size_t s = 0;
  std::size_t r = 0;
  Eigen::MatrixXcd omega;
  std::vector<int> dims;
  std::vector<int> valencies;
  int generator_class = -1;
  bool all_real = false;
  // max_{i >= 1} omega_i(x0); meaningful only when all_real.
  double M = 0.0;
  // Orthonormal basis of each common eigenspace (columns), same order as omega.
  std::vector<Eigen::MatrixXcd> eigenbases;

  int m() const { return valencies[static_cast<std::size_t>(generator_class)]; }
  cplx at_generator(std::size_t i) const { return omega(static_cast<Eigen::Index>(i), generator_class); }

  // Eigenvalue of A_t on eigenspace i.
  cplx eigenvalue(std::size_t i, std::size_t t) const {
    return omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) * static_cast<double>(valencies[t]);
  }

  Eigen::MatrixXcd projection(std::size_t i) const { return eigenbases[i] * eigenbases[i].adjoint(); }

  // Nontrivial index attaining M (first one on ties).
  std::size_t slowest_index() const {
    std::size_t best = 1;
    for (std::size_t i = 2; i < s; ++i)
      if (at_generator(i).real() > at_generator(best).real() + 1e-12) best = i;
    return best;
  }
};

namespace detail {

struct EigenGroup {
  Eigen::MatrixXcd basis;        // columns span the common eigenspace
  Eigen::VectorXcd eigenvalues;  // one per orbital
};

// One attempt at simultaneous diagonalization through a random combination.
inline std::optional<std::vector<EigenGroup>> try_simultaneous_diagonalization(
    const std::vector<Eigen::MatrixXcd>& mats, const std::vector<int>& valencies, std::mt19937_64& rng,
    const SphericalOptions& opt) {
  const Eigen::Index r = mats.front().rows();
  std::uniform_real_distribution<double> coef(0.5, 1.5);
  Eigen::MatrixXcd combo = Eigen::MatrixXcd::Zero(r, r);
  for (const auto& a : mats) combo += coef(rng) * a;

  // The orbital matrices are normal and commute, so the Schur vectors of a
  // generic combination form a common orthonormal eigenbasis.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(combo);
  if (schur.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXcd& basis = schur.matrixU();

  std::vector<EigenGroup> groups;
  std::vector<std::vector<Eigen::Index>> members;
  for (Eigen::Index c = 0; c < r; ++c) {
    const Eigen::VectorXcd v = basis.col(c);
    Eigen::VectorXcd lam(static_cast<Eigen::Index>(mats.size()));
    for (std::size_t t = 0; t < mats.size(); ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      const Eigen::VectorXcd av = mats[t] * v;
      lam(ti) = v.dot(av);
      if ((av - lam(ti) * v).cwiseAbs().maxCoeff() > opt.residual_tol) return std::nullopt;
    }
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      double dev = 0.0;
      for (std::size_t t = 0; t < mats.size(); ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        dev = std::max(dev, std::abs(groups[g].eigenvalues(ti) - lam(ti)) / valencies[t]);
      }
      if (dev < opt.grouping_tol) break;
    }
    if (g == groups.size()) {
      groups.push_back({Eigen::MatrixXcd(), lam});
      members.emplace_back();
    }
    members[g].push_back(c);
  }
  if (groups.size() != mats.size()) return std::nullopt;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& grp = groups[g];
    grp.basis.resize(r, static_cast<Eigen::Index>(members[g].size()));
    Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(mats.size()));
    for (std::size_t k = 0; k < members[g].size(); ++k) {
      const Eigen::VectorXcd v = basis.col(members[g][k]);
      grp.basis.col(static_cast<Eigen::Index>(k)) = v;
      for (std::size_t t = 0; t < mats.size(); ++t) mean(static_cast<Eigen::Index>(t)) += v.dot(mats[t] * v);
    }
    grp.eigenvalues = mean / static_cast<double>(members[g].size());
  }
  return groups;
}

// Lexicographic "greater" on a key vector with a tolerance for equality.
inline bool descending_before(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + tol) return true;
    if (a[i] < b[i] - tol) return false;
  }
  return false;
}

}  // namespace detail

// Spherical functions via the common eigenspaces of the orbital matrices:
// omega_i(D_t) = (eigenvalue of A_t on eigenspace i) / valency_t and
// d_i = dim(eigenspace i). Requires a certified Gelfand pair.
inline SphericalTable spherical_table(const OrbitalSet& orb, const DoubleCosetTable& dct,
                                      const SphericalOptions& opt = {}) {
  const std::size_t s = orb.s();
  std::vector<Eigen::MatrixXcd> mats;
  mats.reserve(s);
  for (const auto& a : orb.matrices) mats.push_back(a.cast<double>().cast<cplx>());

  std::mt19937_64 rng(opt.seed);
  std::optional<std::vector<detail::EigenGroup>> groups;
  for (int attempt = 0; attempt < opt.max_attempts && !groups; ++attempt)
    groups = detail::try_simultaneous_diagonalization(mats, dct.valencies, rng, opt);
  if (!groups) {
    throw NumericalFailure("simultaneous diagonalization failed after " + std::to_string(opt.max_attempts) +
                           " attempts: expected " + std::to_string(s) + " common eigenspaces of the " +
                           std::to_string(orb.r()) + "x" + std::to_string(orb.r()) +
                           " orbital matrices (non-Gelfand pair or degenerate spectrum)");
  }

  const auto g = static_cast<std::size_t>(dct.generator_class);
  struct Row {
    std::vector<double> key;
    detail::EigenGroup group;
  };
  std::vector<Row> rows;
  std::optional<Row> trivial;
  for (auto& grp : *groups) {
    Row row{{}, std::move(grp)};
    bool is_trivial = true;
    for (std::size_t t = 0; t < s; ++t) {
      const cplx w = row.group.eigenvalues(static_cast<Eigen::Index>(t)) / static_cast<double>(dct.valencies[t]);
      if (std::abs(w - 1.0) > opt.grouping_tol) is_trivial = false;
    }
    auto push = [&](std::size_t t) {
      const cplx w = row.group.eigenvalues(static_cast<Eigen::Index>(t)) / static_cast<double>(dct.valencies[t]);
      row.key.push_back(w.real());
      row.key.push_back(w.imag());
    };
    push(g);
    for (std::size_t t = 1; t < s; ++t)
      if (t != g) push(t);
    if (is_trivial && !trivial) {
      trivial = std::move(row);
    } else {
      rows.push_back(std::move(row));
    }
  }
  if (!trivial) throw ConsistencyError("no common eigenspace carries the trivial spherical function");
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const Row& a, const Row& b) { return detail::descending_before(a.key, b.key, opt.grouping_tol); });
  rows.insert(rows.begin(), std::move(*trivial));

  SphericalTable table;
  table.s = s;
  table.r = static_cast<std::size_t>(orb.r());
  table.valencies = dct.valencies;
  table.generator_class = dct.generator_class;
  table.omega.resize(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  table.all_real = true;
  for (std::size_t i = 0; i < s; ++i) {
    const auto& grp = rows[i].group;
    table.dims.push_back(static_cast<int>(grp.basis.cols()));
    table.eigenbases.push_back(grp.basis);
    for (std::size_t t = 0; t < s; ++t) {
      const cplx w = grp.eigenvalues(static_cast<Eigen::Index>(t)) / static_cast<double>(dct.valencies[t]);
      if (std::abs(w.imag()) >= opt.grouping_tol) table.all_real = false;
      table.omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = w;
    }
  }
  // Exact values where the theory pins them.
  for (std::size_t t = 0; t < s; ++t) table.omega(0, static_cast<Eigen::Index>(t)) = 1.0;
  for (std::size_t i = 0; i < s; ++i) table.omega(static_cast<Eigen::Index>(i), 0) = 1.0;
  if (table.all_real) {
    table.omega = table.omega.real().cast<cplx>();
    table.M = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < s; ++i) table.M = std::max(table.M, table.at_generator(i).real());
  } else {
    table.M = std::numeric_limits<double>::quiet_NaN();
  }
  return table;
}

// Largest deviation of (1/r) sum_t kappa_t omega_i(D_t) conj(omega_j(D_t))
// from delta_ij / d_i, over all pairs.
inline double orthogonality_defect(const SphericalTable& st) {
  double worst = 0.0;
  for (std::size_t i = 0; i < st.s; ++i) {
    for (std::size_t j = 0; j < st.s; ++j) {
      cplx sum = 0.0;
      for (std::size_t t = 0; t < st.s; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        sum += static_cast<double>(st.valencies[t]) * st.omega(static_cast<Eigen::Index>(i), ti) *
               std::conj(st.omega(static_cast<Eigen::Index>(j), ti));
      }
      sum /= static_cast<double>(st.r);
      const double expected = i == j ? 1.0 / st.dims[i] : 0.0;
      worst = std::max(worst, std::abs(sum - expected));
    }
  }
  return worst;
}

// Structure constants of the lumped chain: N(t, u) counts the generator
// neighbours in class u of any coset in class t.
struct IntersectionNumbers {
  std::vector<std::vector<int>> N;
  int m = 0;

  int operator()(std::size_t t, std::size_t u) const { return N[t][u]; }
  std::size_t s() const { return N.size(); }
};

inline IntersectionNumbers intersection_numbers(const HomogeneousSpace& space) {
  const auto s = space.s();
  const auto& dct = space.classes();
  IntersectionNumbers inx;
  inx.m = space.m();
  inx.N.assign(s, std::vector<int>(s, 0));
  for (std::size_t t = 0; t < s; ++t) {
    bool first = true;
    for (int x : dct.members[t]) {
      std::vector<int> row(s, 0);
      for (int y : space.neighbors(x)) ++row[static_cast<std::size_t>(space.class_of(y))];
      if (first) {
        inx.N[t] = row;
        first = false;
      } else if (row != inx.N[t]) {
        throw ConsistencyError("intersection numbers depend on the representative of class " + std::to_string(t) +
                               " (non-Gelfand or corrupted input)");
      }
    }
  }
  return inx;
}

// Convenience bundle: the whole spectral side of a pair.
struct PairAnalysis {
  OrbitalSet orbitals;
  GelfandCertificate certificate;
  std::optional<SphericalTable> spherical;
  std::optional<IntersectionNumbers> intersections;
};

inline PairAnalysis analyze_pair(const HomogeneousSpace& space, const SphericalOptions& opt = {}) {
  PairAnalysis out;
  out.orbitals = orbitals(space);
  out.certificate = certify_gelfand(out.orbitals);
  if (out.certificate) {
    out.spherical = spherical_table(out.orbitals, space.classes(), opt);
    out.intersections = intersection_numbers(space);
  }
  return out;
}

}  // namespace ehrenfest
