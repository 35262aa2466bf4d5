#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rosenfied/error.hpp"
#include "rosenfied/fiedler.hpp"
#include "rosenfied/matpoly.hpp"
#include "rosenfied/rosenbrock.hpp"

namespace rosenfied {

struct GenParams {
  Index n = 1;
  Index m = 1;
  int degree_a = 1;
  int degree_d = 1;
  /// Entries from {-integer_bound, ..., integer_bound} instead of standard
  /// normal reals.
  bool integer = false;
  int integer_bound = 3;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxRedraws = 100;

/// Random Rosenbrock system with A regular and A_{d_A} invertible. The same
/// parameters always give the same system. Throws GiveUp after kMaxRedraws
/// rejected draws.
inline SystemMatrix generate_system(const GenParams& p) {
  if (p.n < 1 || p.m < 1 || p.degree_a < 1 || p.degree_d < 1) {
    throw InvalidArgument("generate_system: n, m, d_A, d_D must all be >= 1");
  }
  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<int> small(-p.integer_bound, p.integer_bound);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) out(i, j) = p.integer ? static_cast<double>(small(rng)) : normal(rng);
    return out;
  };
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<Matrix> a;
    std::vector<Matrix> d;
    for (int i = 0; i <= p.degree_a; ++i) a.push_back(draw(p.n, p.n));
    for (int i = 0; i <= p.degree_d; ++i) d.push_back(draw(p.m, p.m));
    Matrix b = draw(p.n, p.m);
    Matrix c = draw(p.m, p.n);
    MatrixPolynomial a_poly(std::move(a));
    if (Eigen::PartialPivLU<Matrix>(a_poly.coeff(p.degree_a)).rcond() < kPoleRcond) continue;
    if (!is_regular(a_poly)) continue;
    return SystemMatrix(std::move(a_poly), std::move(b), std::move(c), MatrixPolynomial(std::move(d)));
  }
  throw GiveUp("generate_system: no admissible system after " + std::to_string(kMaxRedraws) +
               " draws (n=" + std::to_string(p.n) + ", m=" + std::to_string(p.m) + ", d_A=" +
               std::to_string(p.degree_a) + ", d_D=" + std::to_string(p.degree_d) +
               ", seed=" + std::to_string(p.seed) + ")");
}

/// `count` bijections of degree d drawn uniformly with replacement.
inline std::vector<Bijection> random_bijections(int d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> images(d);
  std::vector<Bijection> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    for (int j = 0; j < d; ++j) images[j] = j + 1;
    std::shuffle(images.begin(), images.end(), rng);
    out.emplace_back(images);
  }
  return out;
}

}  // namespace rosenfied
