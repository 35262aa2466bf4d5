#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rosenfied/fiedler.hpp"
#include "rosenfied/matpoly.hpp"
#include "rosenfied/rosenbrock.hpp"

namespace rosenfied::testing {

// ---------------------------------------------------------------------------
// Random data
// ---------------------------------------------------------------------------

inline Matrix random_integer_matrix(std::mt19937_64& rng, Index rows, Index cols, int bound = 3) {
  std::uniform_int_distribution<int> dist(-bound, bound);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = static_cast<double>(dist(rng));
  return out;
}

inline Matrix random_normal_matrix(std::mt19937_64& rng, Index rows, Index cols, bool complex_entries = false) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = Complex(dist(rng), complex_entries ? dist(rng) : 0.0);
  return out;
}

inline MatrixPolynomial random_polynomial(std::mt19937_64& rng, Index size, int degree, bool integer) {
  std::vector<Matrix> coeffs;
  for (int i = 0; i <= degree; ++i)
    coeffs.push_back(integer ? random_integer_matrix(rng, size, size) : random_normal_matrix(rng, size, size));
  return MatrixPolynomial(std::move(coeffs));
}

/// Unfiltered random system: A may be singular, S may be irregular.
inline SystemMatrix random_system(std::mt19937_64& rng, Index n, Index m, int da, int dd, bool integer) {
  MatrixPolynomial a = random_polynomial(rng, n, da, integer);
  MatrixPolynomial d = random_polynomial(rng, m, dd, integer);
  Matrix b = integer ? random_integer_matrix(rng, n, m) : random_normal_matrix(rng, n, m);
  Matrix c = integer ? random_integer_matrix(rng, m, n) : random_normal_matrix(rng, m, n);
  return SystemMatrix(std::move(a), std::move(b), std::move(c), std::move(d));
}

inline Complex random_point(std::mt19937_64& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> unit(-radius, radius);
  return {unit(rng), unit(rng)};
}

inline Bijection random_bijection(std::mt19937_64& rng, int d) {
  std::vector<int> images(d);
  for (int j = 0; j < d; ++j) images[j] = j + 1;
  std::shuffle(images.begin(), images.end(), rng);
  return Bijection(images);
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// sum_i z^i A_i with explicit powers.
inline Matrix naive_eval(const MatrixPolynomial& p, Complex z) {
  Matrix out = Matrix::Zero(p.size(), p.size());
  for (int i = 0; i <= p.degree(); ++i) out += std::pow(z, i) * p.coeff(i);
  return out;
}

/// Laplace expansion along the first row.
inline Complex cofactor_det(const Matrix& a) {
  const Index n = a.rows();
  if (n == 0) return 1.0;
  if (n == 1) return a(0, 0);
  Complex total = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (a(0, j) == Complex{0.0}) continue;
    Matrix minor(n - 1, n - 1);
    for (Index r = 1; r < n; ++r)
      for (Index c = 0, k = 0; c < n; ++c)
        if (c != j) minor(r - 1, k++) = a(r, c);
    total += ((j % 2 == 0) ? 1.0 : -1.0) * a(0, j) * cofactor_det(minor);
  }
  return total;
}

using Coeffs = std::vector<Complex>;

inline Coeffs poly_add(const Coeffs& a, const Coeffs& b, double sign = 1.0) {
  Coeffs out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += sign * b[i];
  return out;
}

inline Coeffs poly_mul(const Coeffs& a, const Coeffs& b) {
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// det of a matrix polynomial by Laplace expansion over scalar polynomial
/// entries; exact on integer data.
inline Coeffs cofactor_det_poly(const std::vector<std::vector<Coeffs>>& e) {
  const std::size_t n = e.size();
  if (n == 1) return e[0][0];
  Coeffs total{0.0};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Coeffs>> minor(n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) minor[r - 1].push_back(e[r][c]);
    total = poly_add(total, poly_mul(e[0][j], cofactor_det_poly(minor)), j % 2 == 0 ? 1.0 : -1.0);
  }
  return total;
}

inline Coeffs cofactor_det_poly(const MatrixPolynomial& p) {
  const auto n = static_cast<std::size_t>(p.size());
  std::vector<std::vector<Coeffs>> entries(n, std::vector<Coeffs>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (int k = 0; k <= p.degree(); ++k) entries[i][j].push_back(p.coeff(k)(i, j));
  Coeffs out = cofactor_det_poly(entries);
  while (out.size() > 1 && out.back() == Complex{0.0}) out.pop_back();
  return out;
}

/// Greedy nearest-neighbour multiset distance, for oracle comparisons in
/// tests that do not exercise the library matcher.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (Complex z : a) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < b.size(); ++j)
      if (std::abs(b[j] - z) < std::abs(b[best] - z)) best = j;
    worst = std::max(worst, std::abs(b[best] - z) / (1.0 + std::abs(z)));
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Symbolic block patterns
// ---------------------------------------------------------------------------

/// Scalar system (n = m = 1) whose coefficients are distinct primes, so each
/// entry of a Fiedler product identifies the symbol that produced it.
struct PrimeSystem {
  std::map<std::string, double> values;
  SystemMatrix system;
};

inline PrimeSystem prime_system(int da, int dd) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};
  std::map<std::string, double> values;
  int next = 0;
  std::vector<Matrix> a;
  std::vector<Matrix> d;
  for (int i = 0; i <= da; ++i) {
    values["A" + std::to_string(i)] = primes[next];
    a.push_back(Matrix::Constant(1, 1, primes[next++]));
  }
  for (int i = 0; i <= dd; ++i) {
    values["D" + std::to_string(i)] = primes[next];
    d.push_back(Matrix::Constant(1, 1, primes[next++]));
  }
  values["B"] = primes[next++];
  values["C"] = primes[next++];
  values["I"] = 1.0;
  values["0"] = 0.0;
  SystemMatrix sys(MatrixPolynomial(std::move(a)), Matrix::Constant(1, 1, values["B"]), Matrix::Constant(1, 1, values["C"]),
                   MatrixPolynomial(std::move(d)));
  return {std::move(values), std::move(sys)};
}

/// Numeric matrix for a grid of tokens such as "-A2", "I", "0", "B".
inline Matrix pattern(const PrimeSystem& ps, const std::vector<std::vector<std::string>>& grid) {
  const auto n = static_cast<Index>(grid.size());
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      std::string tok = grid[i][j];
      double sign = 1.0;
      if (!tok.empty() && tok[0] == '-') {
        sign = -1.0;
        tok = tok.substr(1);
      }
      out(i, j) = sign * ps.values.at(tok);
    }
  }
  return out;
}

}  // namespace rosenfied::testing
