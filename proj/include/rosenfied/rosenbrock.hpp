#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "rosenfied/error.hpp"
#include "rosenfied/matpoly.hpp"

namespace rosenfied {

/// Rosenbrock system matrix
///
///     S(lambda) = [ A(lambda)   -B       ]
///                 [ C            D(lambda) ]
///
/// with A of size n and degree d_A >= 1, D of size m and degree d_D >= 1,
/// and constant coupling matrices B (n x m) and C (m x n). The associated
/// transfer function is R(lambda) = D(lambda) + C A(lambda)^{-1} B, so that
/// det S = det A * det R.
class SystemMatrix {
 public:
  SystemMatrix(MatrixPolynomial a, Matrix b, Matrix c, MatrixPolynomial d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const Index n = a_.size();
    const Index m = d_.size();
    if (b_.rows() != n || b_.cols() != m) {
      throw DimensionMismatch("SystemMatrix: B is " + std::to_string(b_.rows()) + "x" + std::to_string(b_.cols()) +
                              ", expected " + std::to_string(n) + "x" + std::to_string(m));
    }
    if (c_.rows() != m || c_.cols() != n) {
      throw DimensionMismatch("SystemMatrix: C is " + std::to_string(c_.rows()) + "x" + std::to_string(c_.cols()) +
                              ", expected " + std::to_string(m) + "x" + std::to_string(n));
    }
    if (a_.degree() < 1 || d_.degree() < 1) {
      throw InvalidArgument("SystemMatrix: A and D need degree >= 1 (got " + std::to_string(a_.degree()) + ", " +
                            std::to_string(d_.degree()) + ")");
    }
  }

  Index n() const { return a_.size(); }
  Index m() const { return d_.size(); }
  int degree_a() const { return a_.degree(); }
  int degree_d() const { return d_.degree(); }
  int max_degree() const { return std::max(degree_a(), degree_d()); }
  int min_degree() const { return std::min(degree_a(), degree_d()); }

  const MatrixPolynomial& a() const { return a_; }
  const MatrixPolynomial& d() const { return d_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }

  /// S(lambda) as one (n+m)-square matrix polynomial.
  MatrixPolynomial as_polynomial() const {
    const int deg = max_degree();
    MatrixPolynomial s = MatrixPolynomial::zero(n() + m(), deg);
    for (int i = 0; i <= deg; ++i) {
      Matrix& c = s.coeff(i);
      c.topLeftCorner(n(), n()) = a_.coeff_or_zero(i);
      c.bottomRightCorner(m(), m()) = d_.coeff_or_zero(i);
    }
    s.coeff(0).topRightCorner(n(), m()) = -b_;
    s.coeff(0).bottomLeftCorner(m(), n()) = c_;
    return s;
  }

  /// Degree bound n*d_A + m*d_D of det S, which is also the Fiedler pencil size.
  Index formal_degree() const { return n() * degree_a() + m() * degree_d(); }

 private:
  MatrixPolynomial a_;
  Matrix b_;
  Matrix c_;
  MatrixPolynomial d_;
};

/// Finite spectrum of a regular matrix polynomial. Infinite eigenvalues are
/// only counted, as the gap between formal and effective degree.
struct Spectrum {
  std::vector<Complex> eigenvalues;
  int formal_degree = 0;
  int effective_degree = 0;

  int infinite_count() const { return formal_degree - effective_degree; }
};

inline Matrix eval_S(const SystemMatrix& sys, Complex lambda0) {
  const Index n = sys.n();
  const Index m = sys.m();
  Matrix s(n + m, n + m);
  s.topLeftCorner(n, n) = sys.a()(lambda0);
  s.topRightCorner(n, m) = -sys.b();
  s.bottomLeftCorner(m, n) = sys.c();
  s.bottomRightCorner(m, m) = sys.d()(lambda0);
  return s;
}

/// Reciprocal condition estimate below which A(lambda0) counts as singular.
inline constexpr double kPoleRcond = 1e-12;

inline Matrix eval_R(const SystemMatrix& sys, Complex lambda0) {
  Eigen::PartialPivLU<Matrix> lu(sys.a()(lambda0));
  if (!(lu.rcond() >= kPoleRcond)) {
    throw SingularAtPoint("eval_R: A(lambda) is numerically singular at lambda = (" +
                          std::to_string(lambda0.real()) + ", " + std::to_string(lambda0.imag()) + ")");
  }
  return sys.d()(lambda0) + sys.c() * lu.solve(sys.b());
}

/// Builds a Spectrum from a determinant polynomial with the given formal degree.
inline Spectrum spectrum_from_determinant(const ScalarPolynomial& det, int formal_degree) {
  Spectrum out;
  out.formal_degree = formal_degree;
  out.effective_degree = det.degree();
  out.eigenvalues = det.roots();
  return out;
}

/// Eigenvalues of S (invariant zeros) as roots of the interpolated det S.
/// Shares no code path with any pencil construction.
inline Spectrum invariant_zeros(const SystemMatrix& sys) {
  const ScalarPolynomial det = det_poly(sys.as_polynomial());
  if (det.is_zero()) throw IrregularSystem("invariant_zeros: det S(lambda) vanishes identically");
  return spectrum_from_determinant(det, static_cast<int>(sys.formal_degree()));
}

/// Numerical rank with singular values measured against the largest one.
inline Index numerical_rank(const Matrix& a, double rel_tol = 1e-12) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++rank;
  return rank;
}

/// max over `samples` random points of rank S(lambda).
inline Index normal_rank(const SystemMatrix& sys, int samples = 20, std::uint64_t seed = 0x5eed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double radius = interpolation_radius(sys.as_polynomial());
  Index best = 0;
  for (int s = 0; s < samples; ++s) {
    const Complex z(radius * unit(rng), radius * unit(rng));
    best = std::max(best, numerical_rank(eval_S(sys, z)));
  }
  return best;
}

}  // namespace rosenfied
