#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rosenfied/error.hpp"

namespace rosenfied {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Coefficients below this fraction of the largest one are treated as roundoff.
inline constexpr double kTrimTolerance = 1e-10;

// ---------------------------------------------------------------------------
// Scalar polynomials
// ---------------------------------------------------------------------------

/// Dense univariate polynomial, coefficient of z^i at index i.
class ScalarPolynomial {
 public:
  ScalarPolynomial() : coeffs_{Complex{0.0}} {}

  explicit ScalarPolynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(Complex{0.0});
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  Complex coeff(int i) const { return i <= degree() ? coeffs_[i] : Complex{0.0}; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](Complex c) { return c == Complex{0.0}; });
  }

  Complex operator()(Complex z) const {
    Complex acc{0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  double max_abs_coeff() const {
    double best = 0.0;
    for (const auto& c : coeffs_) best = std::max(best, std::abs(c));
    return best;
  }

  /// Drops leading coefficients whose magnitude is below `rel_tol` times the
  /// largest coefficient magnitude.
  ScalarPolynomial trimmed(double rel_tol = kTrimTolerance) const {
    const double cutoff = rel_tol * max_abs_coeff();
    std::vector<Complex> out = coeffs_;
    while (out.size() > 1 && std::abs(out.back()) <= cutoff) out.pop_back();
    if (out.size() == 1 && std::abs(out[0]) <= cutoff) out[0] = Complex{0.0};
    return ScalarPolynomial(std::move(out));
  }

  /// Roots with multiplicity, as eigenvalues of the companion matrix.
  /// Expects an already trimmed polynomial; the zero polynomial has no roots.
  std::vector<Complex> roots() const;

 private:
  std::vector<Complex> coeffs_;
};

namespace detail {

// Diagonal similarity scaling of a square matrix (the classic Parlett-Reinsch
// balancing sweep, base 2 so no rounding is introduced).
inline void balance(Matrix& a) {
  const Index n = a.rows();
  constexpr double radix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Index i = 0; i < n; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(a(j, i));
        row += std::abs(a(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double g = row / radix;
      double f = 1.0;
      const double s = col + row;
      while (col < g) {
        f *= radix;
        col *= radix * radix;
      }
      g = row * radix;
      while (col > g) {
        f /= radix;
        col /= radix * radix;
      }
      if ((col + row) / f < 0.95 * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace detail

inline std::vector<Complex> ScalarPolynomial::roots() const {
  const int deg = degree();
  if (deg < 1 || is_zero()) return {};
  const Complex lead = coeffs_.back();
  if (lead == Complex{0.0}) {
    throw InvalidArgument("ScalarPolynomial::roots: leading coefficient is zero; trim first");
  }
  // Exact zero roots come off first so they are reported exactly.
  int zeros = 0;
  while (zeros < deg && coeffs_[zeros] == Complex{0.0}) ++zeros;
  std::vector<Complex> out(zeros, Complex{0.0});
  const int reduced = deg - zeros;
  if (reduced == 0) return out;
  if (reduced == 1) {
    out.push_back(-coeffs_[zeros] / lead);
    return out;
  }
  Matrix companion = Matrix::Zero(reduced, reduced);
  for (int j = 0; j < reduced; ++j) companion(0, j) = -coeffs_[deg - 1 - j] / lead;
  for (int j = 1; j < reduced; ++j) companion(j, j - 1) = 1.0;
  detail::balance(companion);
  Eigen::ComplexEigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
  for (Index k = 0; k < solver.eigenvalues().size(); ++k) out.push_back(solver.eigenvalues()(k));
  return out;
}

// ---------------------------------------------------------------------------
// Matrix polynomials
// ---------------------------------------------------------------------------

/// Square matrix polynomial sum_i lambda^i * coeffs[i]. The declared degree is
/// formal: the leading coefficient may vanish.
class MatrixPolynomial {
 public:
  explicit MatrixPolynomial(std::vector<Matrix> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw InvalidArgument("MatrixPolynomial: empty coefficient list");
    const Index n = coeffs_.front().rows();
    if (n <= 0) throw DimensionMismatch("MatrixPolynomial: size must be positive");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].rows() != n || coeffs_[i].cols() != n) {
        throw DimensionMismatch("MatrixPolynomial: coefficient " + std::to_string(i) +
                                " is not " + std::to_string(n) + "x" + std::to_string(n));
      }
    }
  }

  static MatrixPolynomial constant(Matrix c) { return MatrixPolynomial({std::move(c)}); }
  static MatrixPolynomial identity(Index size) { return constant(Matrix::Identity(size, size)); }
  static MatrixPolynomial zero(Index size, int degree = 0) {
    return MatrixPolynomial(std::vector<Matrix>(degree + 1, Matrix::Zero(size, size)));
  }
  /// lambda * a + b.
  static MatrixPolynomial pencil(const Matrix& a, const Matrix& b) { return MatrixPolynomial({b, a}); }

  Index size() const { return coeffs_.front().rows(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Matrix>& coeffs() const { return coeffs_; }
  const Matrix& coeff(int i) const { return coeffs_.at(i); }
  Matrix& coeff(int i) { return coeffs_.at(i); }

  /// Coefficient of lambda^i, zero beyond the declared degree.
  Matrix coeff_or_zero(int i) const {
    return i <= degree() ? coeffs_[i] : Matrix::Zero(size(), size());
  }

  /// Horner evaluation at lambda0.
  Matrix operator()(Complex lambda0) const {
    Matrix acc = coeffs_.back();
    for (int i = degree() - 1; i >= 0; --i) acc = lambda0 * acc + coeffs_[i];
    return acc;
  }

  /// Highest index whose coefficient has an entry above `tol` in magnitude.
  int effective_degree(double tol = 0.0) const {
    for (int i = degree(); i > 0; --i) {
      if (coeffs_[i].cwiseAbs().maxCoeff() > tol) return i;
    }
    return 0;
  }

  double max_abs_coeff() const {
    double best = 0.0;
    for (const auto& c : coeffs_) best = std::max(best, c.cwiseAbs().maxCoeff());
    return best;
  }

  /// Copy with trailing coefficients that are exactly zero removed.
  MatrixPolynomial normalized() const {
    return MatrixPolynomial(std::vector<Matrix>(coeffs_.begin(), coeffs_.begin() + effective_degree() + 1));
  }

  /// Square sub-polynomial of the given extent.
  MatrixPolynomial block(Index row, Index col, Index extent) const {
    std::vector<Matrix> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.emplace_back(c.block(row, col, extent, extent));
    return MatrixPolynomial(std::move(out));
  }

  /// Rectangular slice of every coefficient.
  std::vector<Matrix> slice(Index row, Index col, Index rows, Index cols) const {
    std::vector<Matrix> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.emplace_back(c.block(row, col, rows, cols));
    return out;
  }

  MatrixPolynomial& operator+=(const MatrixPolynomial& other) {
    check_same_size(other, "+");
    if (other.degree() > degree()) coeffs_.resize(other.coeffs_.size(), Matrix::Zero(size(), size()));
    for (int i = 0; i <= other.degree(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
  }

  MatrixPolynomial& operator-=(const MatrixPolynomial& other) {
    check_same_size(other, "-");
    if (other.degree() > degree()) coeffs_.resize(other.coeffs_.size(), Matrix::Zero(size(), size()));
    for (int i = 0; i <= other.degree(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
  }

  friend MatrixPolynomial operator+(MatrixPolynomial a, const MatrixPolynomial& b) { return a += b; }
  friend MatrixPolynomial operator-(MatrixPolynomial a, const MatrixPolynomial& b) { return a -= b; }

  friend MatrixPolynomial operator-(MatrixPolynomial a) {
    for (auto& c : a.coeffs_) c = -c;
    return a;
  }

  friend MatrixPolynomial operator*(const MatrixPolynomial& a, const MatrixPolynomial& b) {
    a.check_same_size(b, "*");
    std::vector<Matrix> out(a.degree() + b.degree() + 1, Matrix::Zero(a.size(), a.size()));
    for (int i = 0; i <= a.degree(); ++i) {
      if (a.coeffs_[i].isZero(0.0)) continue;
      for (int j = 0; j <= b.degree(); ++j) {
        if (b.coeffs_[j].isZero(0.0)) continue;
        out[i + j].noalias() += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    return MatrixPolynomial(std::move(out));
  }

  friend MatrixPolynomial operator*(const Matrix& a, const MatrixPolynomial& b) {
    return MatrixPolynomial::constant(a) * b;
  }
  friend MatrixPolynomial operator*(const MatrixPolynomial& a, const Matrix& b) {
    return a * MatrixPolynomial::constant(b);
  }

  /// lambda * p.
  MatrixPolynomial times_lambda() const {
    std::vector<Matrix> out;
    out.reserve(coeffs_.size() + 1);
    out.emplace_back(Matrix::Zero(size(), size()));
    out.insert(out.end(), coeffs_.begin(), coeffs_.end());
    return MatrixPolynomial(std::move(out));
  }

  /// Largest entrywise deviation, padding the shorter polynomial with zeros.
  friend double max_abs_diff(const MatrixPolynomial& a, const MatrixPolynomial& b) {
    a.check_same_size(b, "compare");
    double worst = 0.0;
    for (int i = 0; i <= std::max(a.degree(), b.degree()); ++i) {
      worst = std::max(worst, (a.coeff_or_zero(i) - b.coeff_or_zero(i)).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  /// Exact coefficient equality; differing declared degrees are fine when the
  /// surplus coefficients are zero.
  friend bool operator==(const MatrixPolynomial& a, const MatrixPolynomial& b) {
    return a.size() == b.size() && max_abs_diff(a, b) == 0.0;
  }

 private:
  void check_same_size(const MatrixPolynomial& other, const char* op) const {
    if (size() != other.size()) {
      throw DimensionMismatch(std::string("MatrixPolynomial ") + op + ": sizes " +
                              std::to_string(size()) + " and " + std::to_string(other.size()));
    }
  }

  std::vector<Matrix> coeffs_;
};

inline Matrix evaluate(const MatrixPolynomial& p, Complex lambda0) { return p(lambda0); }

/// Degree-k Horner shift A_{d-k} + lambda A_{d-k+1} + ... + lambda^k A_d.
inline MatrixPolynomial horner_shift(const MatrixPolynomial& p, int k) {
  const int d = p.degree();
  if (k < 0 || k > d) {
    throw InvalidArgument("horner_shift: k=" + std::to_string(k) + " outside [0, " + std::to_string(d) + "]");
  }
  return MatrixPolynomial(std::vector<Matrix>(p.coeffs().begin() + (d - k), p.coeffs().end()));
}

/// Block-diagonal direct sum of square polynomials.
inline MatrixPolynomial direct_sum(const std::vector<MatrixPolynomial>& parts) {
  Index total = 0;
  int deg = 0;
  for (const auto& p : parts) {
    total += p.size();
    deg = std::max(deg, p.degree());
  }
  MatrixPolynomial out = MatrixPolynomial::zero(total, deg);
  Index offset = 0;
  for (const auto& p : parts) {
    for (int i = 0; i <= p.degree(); ++i) out.coeff(i).block(offset, offset, p.size(), p.size()) = p.coeff(i);
    offset += p.size();
  }
  return out;
}

/// Block transpose with uniform square blocks: block (i,j) moves to (j,i),
/// block contents unchanged.
inline Matrix block_transpose(const Matrix& a, Index block) {
  if (block <= 0 || a.rows() % block != 0 || a.cols() % block != 0) {
    throw DimensionMismatch("block_transpose: extent not a multiple of the block size");
  }
  const Index rb = a.rows() / block;
  const Index cb = a.cols() / block;
  Matrix out(a.cols(), a.rows());
  for (Index i = 0; i < rb; ++i)
    for (Index j = 0; j < cb; ++j) out.block(j * block, i * block, block, block) = a.block(i * block, j * block, block, block);
  return out;
}

inline MatrixPolynomial block_transpose(const MatrixPolynomial& p, Index block) {
  std::vector<Matrix> out;
  out.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) out.emplace_back(block_transpose(c, block));
  return MatrixPolynomial(std::move(out));
}

// ---------------------------------------------------------------------------
// Determinants
// ---------------------------------------------------------------------------

/// Sum over rows of the highest power with a nonzero entry in that row; an
/// upper bound for the degree of det(p).
inline int determinant_degree_bound(const MatrixPolynomial& p) {
  int bound = 0;
  for (Index row = 0; row < p.size(); ++row) {
    for (int i = p.degree(); i >= 0; --i) {
      if (!p.coeff(i).row(row).isZero(0.0)) {
        bound += i;
        break;
      }
    }
  }
  return bound;
}

inline Complex determinant(const Matrix& a) {
  if (a.rows() == 0) return Complex{1.0};
  return Eigen::PartialPivLU<Matrix>(a).determinant();
}

/// Interpolation radius used by det_poly.
inline double interpolation_radius(const MatrixPolynomial& p) {
  if (p.degree() == 0) return 1.0;
  return std::max(1.0, std::pow(p.max_abs_coeff(), 1.0 / p.degree()));
}

/// True when det p(lambda0) is numerically nonzero at one of `samples` random
/// points inside the interpolation disc.
inline bool is_regular(const MatrixPolynomial& p, int samples = 20, std::uint64_t seed = 0x5eed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double radius = interpolation_radius(p);
  for (int s = 0; s < samples; ++s) {
    const Complex z(radius * unit(rng), radius * unit(rng));
    const Matrix at = p(z);
    Eigen::JacobiSVD<Matrix> svd(at);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return true;
    if (sv(0) > 0.0 && sv(sv.size() - 1) > 1e-12 * sv(0)) return true;
  }
  return false;
}

/// Coefficients of det(p(lambda)), interpolated from determinant values at
/// roots of unity on a circle. Trailing coefficients below the relative trim
/// tolerance are dropped. A polynomial that is singular at every random
/// probe point yields the zero polynomial.
inline ScalarPolynomial det_poly(const MatrixPolynomial& p, double rel_tol = kTrimTolerance) {
  const int bound = determinant_degree_bound(p);
  if (bound == 0) {
    Complex c = determinant(p.coeff(0));
    return ScalarPolynomial({c});
  }
  const int nodes = bound + 1;
  const double radius = interpolation_radius(p);
  if (!is_regular(p)) return ScalarPolynomial();
  std::vector<Complex> values(nodes);
  for (int k = 0; k < nodes; ++k) values[k] = determinant(p(std::polar(radius, 2.0 * std::numbers::pi * k / nodes)));

  std::vector<Complex> coeffs(nodes);
  double scale = 1.0;
  for (int j = 0; j < nodes; ++j) {
    Complex acc{0.0};
    for (int k = 0; k < nodes; ++k) {
      acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(j) * k) % nodes) / nodes);
    }
    coeffs[j] = acc / (static_cast<double>(nodes) * scale);
    scale *= radius;
  }
  return ScalarPolynomial(std::move(coeffs)).trimmed(rel_tol);
}

/// Nonzero-constant determinant test.
inline bool is_unimodular(const MatrixPolynomial& p, double tol = 1e-10) {
  const ScalarPolynomial det = det_poly(p);
  return det.degree() == 0 && std::abs(det.coeff(0)) > tol;
}

}  // namespace rosenfied
