#include <gtest/gtest.h>

#include "rosenfied/equivalence.hpp"
#include "rosenfied/matpoly.hpp"
#include "support.hpp"

using namespace rosenfied;
using namespace rosenfied::testing;

namespace {

Matrix scalar(Complex v) { return Matrix::Constant(1, 1, v); }

double rel_err(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST(Evaluate, ConstantPolynomial) {
  const MatrixPolynomial p = MatrixPolynomial::identity(2);
  EXPECT_EQ(evaluate(p, 5.0), Matrix(Matrix::Identity(2, 2)));
}

TEST(Evaluate, RootOfScalarLinear) {
  const MatrixPolynomial p({scalar(-2.0), scalar(1.0)});
  EXPECT_EQ(evaluate(p, 2.0)(0, 0), Complex(0.0));
}

TEST(Evaluate, MatchesPowerSum) {
  std::mt19937_64 rng(1);
  const MatrixPolynomial p = random_polynomial(rng, 3, 4, false);
  const Complex z(0.7, 0.3);
  EXPECT_LE(rel_err(evaluate(p, z), naive_eval(p, z)), 1e-12);
}

TEST(HornerShift, EndpointsAndMiddle) {
  std::mt19937_64 rng(2);
  const MatrixPolynomial p = random_polynomial(rng, 2, 2, true);
  EXPECT_EQ(horner_shift(p, 0), MatrixPolynomial::constant(p.coeff(2)));
  EXPECT_EQ(horner_shift(p, 2), p);
  EXPECT_EQ(horner_shift(p, 1), MatrixPolynomial({p.coeff(1), p.coeff(2)}));
}

TEST(HornerShift, OutOfRange) {
  const MatrixPolynomial p = MatrixPolynomial::zero(2, 3);
  EXPECT_THROW(horner_shift(p, -1), InvalidArgument);
  EXPECT_THROW(horner_shift(p, 4), InvalidArgument);
}

TEST(HornerShift, Recurrence) {
  std::mt19937_64 rng(3);
  const MatrixPolynomial p = random_polynomial(rng, 3, 5, false);
  for (int k = 0; k < p.degree(); ++k) {
    for (int s = 0; s < 20; ++s) {
      const Complex z = random_point(rng, 2.0);
      const Matrix lhs = evaluate(horner_shift(p, k + 1), z);
      const Matrix rhs = z * evaluate(horner_shift(p, k), z) + p.coeff(p.degree() - k - 1);
      EXPECT_LE(rel_err(lhs, rhs), 1e-12) << "k=" << k;
    }
  }
}

TEST(DetPoly, DiagonalExamples) {
  const ScalarPolynomial lam2 = det_poly(MatrixPolynomial::pencil(Matrix::Identity(2, 2), Matrix::Zero(2, 2)));
  ASSERT_EQ(lam2.degree(), 2);
  EXPECT_NEAR(std::abs(lam2.coeff(2) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(lam2.coeff(1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(lam2.coeff(0)), 0.0, 1e-14);

  Matrix y = Matrix::Zero(2, 2);
  y(0, 0) = -1.0;
  y(1, 1) = -2.0;
  const ScalarPolynomial q = det_poly(MatrixPolynomial::pencil(Matrix::Identity(2, 2), y));
  ASSERT_EQ(q.degree(), 2);
  EXPECT_NEAR(std::abs(q.coeff(0) - 2.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(q.coeff(1) + 3.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(q.coeff(2) - 1.0), 0.0, 1e-13);
}

TEST(DetPoly, MatchesCofactorExpansionOnIntegers) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const MatrixPolynomial p = random_polynomial(rng, 2, 2, true);
    const Coeffs exact = cofactor_det_poly(p);
    const ScalarPolynomial got = det_poly(p);
    if (exact.size() == 1 && exact[0] == Complex{0.0}) {
      EXPECT_TRUE(got.is_zero());
      continue;
    }
    ASSERT_EQ(got.degree() + 1, static_cast<int>(exact.size())) << "trial " << trial;
    for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(std::abs(got.coeff(static_cast<int>(i)) - exact[i]), 0.0, 1e-10);
  }
}

TEST(DetPoly, AgreesWithPointDeterminants) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixPolynomial p = random_polynomial(rng, 3, 3, false);
    const ScalarPolynomial det = det_poly(p);
    for (int s = 0; s < 5; ++s) {
      const Complex z = random_point(rng);
      const Complex want = cofactor_det(p(z));
      EXPECT_LE(std::abs(det(z) - want), 1e-8 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(DetPoly, IdenticallyZero) {
  EXPECT_TRUE(det_poly(MatrixPolynomial::zero(2, 2)).is_zero());
  const Matrix ones = Matrix::Ones(2, 2);
  EXPECT_TRUE(det_poly(MatrixPolynomial::pencil(ones, Matrix::Zero(2, 2))).is_zero());
}

TEST(Unimodular, Basics) {
  EXPECT_TRUE(is_unimodular(MatrixPolynomial::identity(3)));
  EXPECT_FALSE(is_unimodular(MatrixPolynomial::pencil(scalar(1.0), scalar(0.0))));
}

TEST(Unimodular, ShearFactorOfCubic) {
  std::mt19937_64 rng(6);
  const SideAuxiliary side(random_polynomial(rng, 2, 3, true));
  EXPECT_TRUE(is_unimodular(side.shear(1)));
  EXPECT_TRUE(is_unimodular(side.exchange(1)));
}

TEST(Unimodular, InvariantUnderConstantInvertibleFactor) {
  std::mt19937_64 rng(7);
  const SideAuxiliary side(random_polynomial(rng, 2, 3, false));
  const Matrix g = random_normal_matrix(rng, 6, 6);
  EXPECT_EQ(is_unimodular(side.exchange(2)), is_unimodular(g * side.exchange(2)));
  const MatrixPolynomial lam = MatrixPolynomial::pencil(Matrix::Identity(6, 6), Matrix::Zero(6, 6));
  EXPECT_EQ(is_unimodular(lam), is_unimodular(g * lam));
}

TEST(Regular, Examples) {
  EXPECT_TRUE(is_regular(MatrixPolynomial::pencil(Matrix::Identity(2, 2), Matrix::Zero(2, 2))));
  EXPECT_FALSE(is_regular(MatrixPolynomial::zero(2, 1)));
  EXPECT_FALSE(is_regular(MatrixPolynomial::pencil(Matrix::Ones(2, 2), Matrix::Zero(2, 2))));
}

TEST(ScalarRoots, KnownPolynomial) {
  // (z - 1)(z - 2)(z + 3) = z^3 - 7z + 6
  const ScalarPolynomial p({6.0, -7.0, 0.0, 1.0});
  EXPECT_LE(multiset_distance(p.roots(), {1.0, 2.0, -3.0}), 1e-12);
}

TEST(ScalarRoots, ZeroRootsAreExact) {
  const ScalarPolynomial p({0.0, 0.0, -1.0, 1.0});
  const auto r = p.roots();
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], Complex(0.0));
  EXPECT_EQ(r[1], Complex(0.0));
  EXPECT_NEAR(std::abs(r[2] - 1.0), 0.0, 1e-15);
}

TEST(MatrixPolynomial, RejectsMismatchedCoefficients) {
  EXPECT_THROW(MatrixPolynomial({Matrix::Zero(2, 2), Matrix::Zero(3, 3)}), DimensionMismatch);
  EXPECT_THROW(MatrixPolynomial(std::vector<Matrix>{}), InvalidArgument);
}

TEST(MatrixPolynomial, ProductMatchesPointwise) {
  std::mt19937_64 rng(8);
  const MatrixPolynomial p = random_polynomial(rng, 3, 2, false);
  const MatrixPolynomial q = random_polynomial(rng, 3, 3, false);
  const Complex z(0.3, -0.4);
  EXPECT_LE(rel_err((p * q)(z), p(z) * q(z)), 1e-13);
}

TEST(BlockTranspose, MovesBlocks) {
  Matrix a(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) a(i, j) = static_cast<double>(10 * i + j);
  const Matrix t = block_transpose(a, 2);
  EXPECT_EQ(Matrix(t.block(0, 2, 2, 2)), Matrix(a.block(2, 0, 2, 2)));
  EXPECT_EQ(Matrix(t.block(0, 0, 2, 2)), Matrix(a.block(0, 0, 2, 2)));
  EXPECT_EQ(block_transpose(t, 2), a);
}
