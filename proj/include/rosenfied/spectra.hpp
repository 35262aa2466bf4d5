#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rosenfied/equivalence.hpp"
#include "rosenfied/error.hpp"
#include "rosenfied/fiedler.hpp"
#include "rosenfied/matpoly.hpp"
#include "rosenfied/rosenbrock.hpp"

namespace rosenfied {

/// An eigenvalue (alpha, beta) of lambda X + Y counts as infinite when
/// |lambda| = |alpha/beta| exceeds this multiple of |Y|/|X|.
inline constexpr double kInfiniteCutoff = 1e8;

/// Finite eigenvalues of lambda X + Y from the generalized Schur form
/// (LAPACK zggev on the pair (-Y, X)). Throws SingularPencil when the pencil
/// is not regular.
inline Spectrum pencil_eigenvalues(const BlockPencil& p) {
  const Index size = p.x.rows();
  if (!is_regular(p.as_polynomial())) throw SingularPencil("pencil_eigenvalues: det(lambda X + Y) vanishes identically");
  Matrix a = -p.y;
  Matrix b = p.x;
  Eigen::VectorXcd alpha(size);
  Eigen::VectorXcd beta(size);
  const auto n = static_cast<lapack_int>(size);
  const lapack_int info = LAPACKE_zggev(
      LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(b.data()), n, reinterpret_cast<lapack_complex_double*>(alpha.data()),
      reinterpret_cast<lapack_complex_double*>(beta.data()), nullptr, n, nullptr, n);
  if (info != 0) throw SingularPencil("pencil_eigenvalues: zggev failed with info " + std::to_string(info));

  const double nx = p.x.norm();
  const double ny = p.y.norm();
  Spectrum out;
  out.formal_degree = static_cast<int>(size);
  for (Index k = 0; k < size; ++k) {
    if (std::abs(beta(k)) * ny * kInfiniteCutoff > std::abs(alpha(k)) * nx) out.eigenvalues.push_back(alpha(k) / beta(k));
  }
  out.effective_degree = static_cast<int>(out.eigenvalues.size());
  return out;
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

/// Minimum-cost assignment for a rows x cols cost matrix with rows <= cols
/// (Hungarian method with potentials). Returns the column of every row.
inline std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int rows = static_cast<int>(cost.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(cost.front().size());
  if (cols < rows) throw InvalidArgument("min_cost_assignment: more rows than columns");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0);
  std::vector<double> v(cols + 1, 0.0);
  std::vector<int> owner(cols + 1, 0);  // 1-based row assigned to column j
  std::vector<int> way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const int i0 = owner[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(rows, -1);
  for (int j = 1; j <= cols; ++j)
    if (owner[j] != 0) out[owner[j] - 1] = j - 1;
  return out;
}

struct MatchedPair {
  Complex pencil;
  Complex oracle;
  double distance = 0.0;
  /// tol * (1 + |oracle|) plus the diameter of the oracle cluster.
  double allowance = 0.0;

  bool within() const { return distance <= allowance; }
};

struct EigenReport {
  std::vector<Complex> pencil_eigs;
  std::vector<Complex> oracle_eigs;
  std::vector<MatchedPair> matching;
  std::vector<Complex> unmatched_pencil;
  std::vector<Complex> unmatched_oracle;
  int pencil_infinite = 0;
  int oracle_infinite = 0;
  double tol = 0.0;
  double max_matched_distance = 0.0;
  /// Largest distance / (1 + |lambda|) over the matching.
  double max_relative_distance = 0.0;

  bool passed() const {
    return unmatched_pencil.empty() && unmatched_oracle.empty() &&
           std::all_of(matching.begin(), matching.end(), [](const MatchedPair& m) { return m.within(); });
  }

  void require() const {
    if (passed()) return;
    std::string what = "spectra differ:";
    auto fmt = [](Complex z) { return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")"; };
    for (auto z : unmatched_pencil) what += " pencil-only " + fmt(z);
    for (auto z : unmatched_oracle) what += " oracle-only " + fmt(z);
    for (const auto& m : matching)
      if (!m.within()) what += " " + fmt(m.pencil) + "~" + fmt(m.oracle) + " at " + std::to_string(m.distance);
    throw SpectralMismatch(what);
  }
};

/// Oracle values closer than this (relative) form one cluster, whose
/// diameter is added to the matching allowance.
inline constexpr double kClusterLink = 1e-3;

namespace detail {

inline std::vector<double> cluster_diameters(const std::vector<Complex>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) <= kClusterLink * (1.0 + std::abs(values[i]))) parent[find(i)] = find(j);
  std::vector<double> diam(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (find(i) == find(j)) diam[i] = std::max(diam[i], std::abs(values[i] - values[j]));
  return diam;
}

}  // namespace detail

/// Matches two eigenvalue multisets by minimum total distance.
inline EigenReport match_spectra(const Spectrum& pencil, const Spectrum& oracle, double tol) {
  EigenReport report;
  report.pencil_eigs = pencil.eigenvalues;
  report.oracle_eigs = oracle.eigenvalues;
  report.pencil_infinite = pencil.infinite_count();
  report.oracle_infinite = oracle.infinite_count();
  report.tol = tol;

  const bool pencil_rows = pencil.eigenvalues.size() <= oracle.eigenvalues.size();
  const auto& rows = pencil_rows ? pencil.eigenvalues : oracle.eigenvalues;
  const auto& cols = pencil_rows ? oracle.eigenvalues : pencil.eigenvalues;
  std::vector<std::vector<double>> cost(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) cost[i][j] = std::abs(rows[i] - cols[j]);
  const std::vector<int> assignment = min_cost_assignment(cost);
  const std::vector<double> diam = detail::cluster_diameters(oracle.eigenvalues);

  std::vector<bool> taken(cols.size(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto j = static_cast<std::size_t>(assignment[i]);
    taken[j] = true;
    MatchedPair pair;
    pair.pencil = pencil_rows ? rows[i] : cols[j];
    pair.oracle = pencil_rows ? cols[j] : rows[i];
    pair.distance = cost[i][j];
    pair.allowance = tol * (1.0 + std::abs(pair.oracle)) + diam[pencil_rows ? j : i];
    report.max_matched_distance = std::max(report.max_matched_distance, pair.distance);
    report.max_relative_distance = std::max(report.max_relative_distance, pair.distance / (1.0 + std::abs(pair.oracle)));
    report.matching.push_back(pair);
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (taken[j]) continue;
    (pencil_rows ? report.unmatched_oracle : report.unmatched_pencil).push_back(cols[j]);
  }
  return report;
}

/// Finite spectrum of the pencil against the invariant zeros of S.
inline EigenReport compare_spectra(const SystemMatrix& sys, const BlockPencil& pencil, double tol) {
  return match_spectra(pencil_eigenvalues(pencil), invariant_zeros(sys), tol);
}

inline EigenReport compare_spectra(const SystemMatrix& sys, const Bijection& sigma, double tol) {
  return compare_spectra(sys, fiedler_pencil(sys, sigma), tol);
}

// ---------------------------------------------------------------------------
// Null vectors and eigenvector recovery
// ---------------------------------------------------------------------------

struct NullVector {
  Vector vector;
  double smallest = 0.0;         // smallest singular value
  double second_smallest = 0.0;  // next one up
  double largest = 0.0;

  /// Well separated from the rest of the spectrum of singular values.
  bool simple(double threshold = 1e-6) const { return second_smallest > threshold * largest; }
};

inline NullVector null_vector(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Index last = sv.size() - 1;
  NullVector out;
  out.vector = svd.matrixV().col(last);
  out.smallest = sv(last);
  out.second_smallest = last > 0 ? sv(last - 1) : sv(last);
  out.largest = sv(0);
  return out;
}

/// Two-sided Rayleigh quotient iteration for an eigenvalue of lambda X + Y.
inline Complex refine_eigenvalue(const BlockPencil& p, Complex lambda0, int iterations = 3) {
  for (int it = 0; it < iterations; ++it) {
    Eigen::JacobiSVD<Matrix> svd(p(lambda0), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Index last = svd.singularValues().size() - 1;
    const Vector u = svd.matrixU().col(last);
    const Vector v = svd.matrixV().col(last);
    const Complex denom = u.dot(p.x * v);
    if (std::abs(denom) == 0.0) break;
    const Complex step = u.dot(p(lambda0) * v) / denom;
    lambda0 -= step;
    if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lambda0))) break;
  }
  return lambda0;
}

struct RecoveredEigenvector {
  Complex lambda0;
  /// Pencil null vector, scaled with the same factor as [x0; u0].
  Vector w;
  Vector x0;
  Vector u0;
  double residual_S = 0.0;
  double residual_R = 0.0;
  /// |<w_predicted, w>| / (|w_predicted| |w|).
  double alignment = 0.0;
};

namespace detail {

inline double relative_residual(const Matrix& a, const Vector& v) {
  const double scale = a.norm() * v.norm();
  return scale > 0.0 ? (a * v).norm() / scale : 0.0;
}

inline double alignment(const Vector& a, const Vector& b) {
  const double scale = a.norm() * b.norm();
  return scale > 0.0 ? std::abs(a.dot(b)) / scale : 0.0;
}

inline Eigen::PartialPivLU<Matrix> nonpole_lu(const SystemMatrix& sys, Complex lambda0) {
  Eigen::PartialPivLU<Matrix> lu(sys.a()(lambda0));
  if (!(lu.rcond() >= kPoleRcond)) {
    throw PoleAtEigenvalue("A(lambda) is numerically singular at the eigenvalue (" + std::to_string(lambda0.real()) +
                           ", " + std::to_string(lambda0.imag()) + ")");
  }
  return lu;
}

inline void finish_recovery(const SystemMatrix& sys, RecoveredEigenvector& out) {
  const double norm = std::sqrt(out.x0.squaredNorm() + out.u0.squaredNorm());
  if (norm == 0.0) throw PoleAtEigenvalue("recovered [x0; u0] vanishes");
  out.x0 /= norm;
  out.u0 /= norm;
  out.w /= norm;
  Vector stacked(sys.n() + sys.m());
  stacked << out.x0, out.u0;
  out.residual_S = relative_residual(eval_S(sys, out.lambda0), stacked);
  out.residual_R = relative_residual(eval_R(sys, out.lambda0), out.u0);
}

}  // namespace detail

/// Null vector of C_1 predicted from u0: the A part stacks
/// lambda^{d_A-k} A(lambda)^{-1} B u0 and the D part lambda^{d_D-k} u0, k = 1..d.
inline Vector companion_first_vector(const SystemMatrix& sys, Complex lambda0, const Vector& u0) {
  const BlockLayout l = BlockLayout::of(sys);
  const Vector x = detail::nonpole_lu(sys, lambda0).solve(sys.b() * u0);
  Vector w(l.size());
  for (int k = 1; k <= l.degree_a; ++k) w.segment(l.a_offset(k), l.n) = std::pow(lambda0, l.degree_a - k) * x;
  for (int k = 1; k <= l.degree_d; ++k) w.segment(l.d_offset(k), l.m) = std::pow(lambda0, l.degree_d - k) * u0;
  return w;
}

/// Eigenvector of S and R from a null vector of the first companion form:
/// x0 sits in A-block d_A and u0 in D-block d_D.
inline RecoveredEigenvector recover_eigenvector(const SystemMatrix& sys, Complex lambda0, const Vector& v_pencil) {
  const BlockLayout l = BlockLayout::of(sys);
  if (v_pencil.size() != l.size()) throw DimensionMismatch("recover_eigenvector: vector length does not match C_1");
  detail::nonpole_lu(sys, lambda0);
  RecoveredEigenvector out;
  out.lambda0 = lambda0;
  out.w = v_pencil;
  out.x0 = v_pencil.segment(l.a_offset(l.degree_a), l.n);
  out.u0 = v_pencil.segment(l.d_offset(l.degree_d), l.m);
  detail::finish_recovery(sys, out);
  out.alignment = detail::alignment(companion_first_vector(sys, lambda0, out.u0), out.w);
  return out;
}

/// Recovery for an arbitrary Fiedler pencil through its certificate:
/// w = V(lambda0) R_c [0; s; 0] with s a null vector of S(lambda0), so s is
/// read off R_c^{-1} V(lambda0)^{-1} w.
inline RecoveredEigenvector recover_eigenvector(const SystemMatrix& sys, const EquivalenceCertificate& cert,
                                                Complex lambda0, const Vector& v_pencil) {
  const BlockLayout& l = cert.layout;
  if (v_pencil.size() != l.size()) throw DimensionMismatch("recover_eigenvector: vector length does not match the pencil");
  detail::nonpole_lu(sys, lambda0);
  const Matrix v_at = cert.v(lambda0);
  const Vector standard = cert.right_constant.partialPivLu().solve(v_at.partialPivLu().solve(v_pencil));
  const Index head = l.a_size() - l.n;
  RecoveredEigenvector out;
  out.lambda0 = lambda0;
  out.w = v_pencil;
  out.x0 = standard.segment(head, l.n);
  out.u0 = standard.segment(head + l.n, l.m);
  detail::finish_recovery(sys, out);
  Vector embedded = Vector::Zero(l.size());
  embedded.segment(head, l.n) = out.x0;
  embedded.segment(head + l.n, l.m) = out.u0;
  out.alignment = detail::alignment(v_at * (cert.right_constant * embedded), out.w);
  return out;
}

}  // namespace rosenfied
