#include <gtest/gtest.h>

#include "rosenfied/equivalence.hpp"
#include "rosenfied/gen.hpp"
#include "rosenfied/spectra.hpp"
#include "support.hpp"

using namespace rosenfied;
using namespace rosenfied::testing;

namespace {

Matrix scalar(Complex v) { return Matrix::Constant(1, 1, v); }

/// n = m = 1, A = lambda, D = lambda, B = C = 1: det S = lambda^2 + 1.
SystemMatrix rotation_system() {
  return SystemMatrix(MatrixPolynomial({scalar(0.0), scalar(1.0)}), scalar(1.0), scalar(1.0),
                      MatrixPolynomial({scalar(0.0), scalar(1.0)}));
}

BlockPencil bare_pencil(const Matrix& x, const Matrix& y) { return {x, y, {x.rows(), 0, 1, 0}, std::nullopt}; }

SystemMatrix gaussian_system(std::uint64_t seed, Index n, Index m, int da, int dd) {
  return generate_system({.n = n, .m = m, .degree_a = da, .degree_d = dd, .integer = false, .seed = seed});
}

}  // namespace

TEST(PencilEigenvalues, Diagonal) {
  Matrix y = Matrix::Zero(2, 2);
  y(0, 0) = -1.0;
  y(1, 1) = -2.0;
  const Spectrum sp = pencil_eigenvalues(bare_pencil(Matrix::Identity(2, 2), y));
  EXPECT_EQ(sp.effective_degree, 2);
  EXPECT_LE(multiset_distance(sp.eigenvalues, {1.0, 2.0}), 1e-14);
}

TEST(PencilEigenvalues, RotationSystem) {
  const Spectrum sp = pencil_eigenvalues(fiedler_pencil(rotation_system(), Bijection({1})));
  EXPECT_LE(multiset_distance(sp.eigenvalues, {Complex(0, 1), Complex(0, -1)}), 1e-14);
}

TEST(PencilEigenvalues, SingularLeadingBlockLosesEigenvalues) {
  // A = [[lambda, 0], [0, 1]] has det A = lambda; one eigenvalue is infinite.
  Matrix a1 = Matrix::Zero(2, 2);
  a1(0, 0) = 1.0;
  Matrix a0 = Matrix::Zero(2, 2);
  a0(1, 1) = 1.0;
  const SystemMatrix sys(MatrixPolynomial({a0, a1}), Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                         MatrixPolynomial({scalar(-3.0), scalar(1.0)}));
  const Spectrum sp = pencil_eigenvalues(fiedler_pencil(sys, Bijection({1})));
  EXPECT_EQ(sp.formal_degree, 3);
  EXPECT_EQ(sp.effective_degree, 2);
  EXPECT_GT(sp.infinite_count(), 0);
  EXPECT_LE(multiset_distance(sp.eigenvalues, {0.0, 3.0}), 1e-12);
}

TEST(PencilEigenvalues, SingularPencilThrows) {
  EXPECT_THROW(pencil_eigenvalues(bare_pencil(Matrix::Ones(2, 2), Matrix::Zero(2, 2))), SingularPencil);
}

TEST(Assignment, PicksMinimumCost) {
  const std::vector<std::vector<double>> cost = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  EXPECT_EQ(min_cost_assignment(cost), (std::vector<int>{1, 0, 2}));
}

TEST(Assignment, Rectangular) {
  const std::vector<std::vector<double>> cost = {{9, 1, 9}, {9, 9, 1}};
  EXPECT_EQ(min_cost_assignment(cost), (std::vector<int>{1, 2}));
}

TEST(Matching, CountsUnmatched) {
  Spectrum a{{1.0, 2.0, 3.0}, 3, 3};
  Spectrum b{{1.0, 2.0}, 3, 2};
  const EigenReport r = match_spectra(a, b, 1e-6);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.unmatched_pencil.size(), 1u);
  EXPECT_THROW(r.require(), SpectralMismatch);
}

TEST(Matching, ClusterWidensAllowance) {
  // A double root split by perturbation: each copy is 1e-5 off but the
  // oracle copies are themselves 2e-5 apart.
  Spectrum pencil{{Complex(1.0 + 1e-5), Complex(1.0 - 1e-5)}, 2, 2};
  Spectrum oracle{{Complex(1.0, 1e-5), Complex(1.0, -1e-5)}, 2, 2};
  EXPECT_TRUE(match_spectra(pencil, oracle, 1e-6).passed());
  Spectrum far{{Complex(1.1), Complex(0.9)}, 2, 2};
  EXPECT_FALSE(match_spectra(far, oracle, 1e-6).passed());
}

TEST(CompareSpectra, DecoupledIsUnionOfParts) {
  std::mt19937_64 rng(51);
  SystemMatrix sys = random_system(rng, 2, 2, 2, 3, false);
  sys = SystemMatrix(sys.a(), Matrix::Zero(2, 2), Matrix::Zero(2, 2), sys.d());
  std::vector<Complex> want = det_poly(sys.a()).roots();
  for (Complex z : det_poly(sys.d()).roots()) want.push_back(z);
  const Spectrum sp = pencil_eigenvalues(fiedler_pencil(sys, Bijection({2, 1, 3})));
  EXPECT_LE(multiset_distance(sp.eigenvalues, want), 1e-8);
}

TEST(CompareSpectra, AllOrderingsDegreeThree) {
  std::mt19937_64 rng(52);
  const SystemMatrix sys = random_system(rng, 2, 2, 3, 2, true);
  std::vector<Complex> first;
  for (const auto& sigma : Bijection::all(3)) {
    const EigenReport r = compare_spectra(sys, sigma, 1e-6);
    EXPECT_TRUE(r.passed()) << "max rel " << r.max_relative_distance;
    if (first.empty()) first = r.pencil_eigs;
    EXPECT_LE(multiset_distance(r.pencil_eigs, first), 1e-6);
  }
}

TEST(CompareSpectra, CompanionFormsAgree) {
  const SystemMatrix sys = gaussian_system(53, 3, 2, 2, 4);
  const EigenReport a = compare_spectra(sys, companion_first(sys), 1e-6);
  const EigenReport b = compare_spectra(sys, companion_second(sys), 1e-6);
  EXPECT_TRUE(a.passed());
  EXPECT_TRUE(b.passed());
  EXPECT_LE(multiset_distance(a.pencil_eigs, b.pencil_eigs), 1e-6);
}

TEST(CompareSpectra, GaussianRandomOrderings) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SystemMatrix sys = gaussian_system(seed, 2, 3, 3, 5);
    for (const auto& sigma : random_bijections(5, 3, seed)) EXPECT_TRUE(compare_spectra(sys, sigma, 1e-6).passed());
  }
}

TEST(NullVector, SimpleDetection) {
  Matrix a = Matrix::Identity(3, 3);
  a(2, 2) = 0.0;
  const NullVector nv = null_vector(a);
  EXPECT_TRUE(nv.simple());
  EXPECT_EQ(nv.smallest, 0.0);
  a(1, 1) = 0.0;
  EXPECT_FALSE(null_vector(a).simple());
}

TEST(Recovery, RotationSystemAtI) {
  const SystemMatrix sys = rotation_system();
  const BlockPencil c1 = companion_first(sys);
  const Complex i(0.0, 1.0);
  const NullVector nv = null_vector(c1(i));
  const RecoveredEigenvector r = recover_eigenvector(sys, i, nv.vector);
  EXPECT_LE(r.residual_S, 1e-10);
  EXPECT_LE(r.residual_R, 1e-10);
  EXPECT_LE(std::abs(eval_R(sys, i)(0, 0)), 1e-15);
}

TEST(Recovery, DecoupledRootOfDOnly) {
  // A = lambda - 1, D = lambda - 2, no coupling: at lambda = 2 only D is singular.
  const SystemMatrix sys(MatrixPolynomial({scalar(-1.0), scalar(1.0)}), scalar(0.0), scalar(0.0),
                         MatrixPolynomial({scalar(-2.0), scalar(1.0)}));
  const NullVector nv = null_vector(companion_first(sys)(2.0));
  const RecoveredEigenvector r = recover_eigenvector(sys, 2.0, nv.vector);
  EXPECT_LE(r.x0.norm(), 1e-14);
  EXPECT_NEAR(r.u0.norm(), 1.0, 1e-14);
}

TEST(Recovery, PoleThrows) {
  // A = lambda, D = lambda, B = 0, C = 1: lambda = 0 is a root of det A.
  const SystemMatrix sys(MatrixPolynomial({scalar(0.0), scalar(1.0)}), scalar(0.0), scalar(1.0),
                         MatrixPolynomial({scalar(0.0), scalar(1.0)}));
  const NullVector nv = null_vector(companion_first(sys)(0.0));
  EXPECT_THROW(recover_eigenvector(sys, 0.0, nv.vector), PoleAtEigenvalue);
}

TEST(Recovery, RandomSimpleEigenvalues) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SystemMatrix sys = gaussian_system(100 + seed, 2, 2, 3, 2);
    const BlockPencil c1 = companion_first(sys);
    for (Complex lambda : pencil_eigenvalues(c1).eigenvalues) {
      const Complex refined = refine_eigenvalue(c1, lambda);
      const NullVector nv = null_vector(c1(refined));
      if (!nv.simple()) continue;
      const RecoveredEigenvector r = recover_eigenvector(sys, refined, nv.vector);
      EXPECT_LE(r.residual_S, 1e-8);
      EXPECT_GE(r.alignment, 1.0 - 1e-8);
    }
  }
}

TEST(Recovery, ThroughCertificate) {
  const SystemMatrix sys = gaussian_system(200, 2, 1, 2, 3);
  const Bijection sigma({2, 3, 1});
  CertifyOptions opt;
  opt.tol = 1e-10;
  const EquivalenceCertificate cert = certify(sys, sigma, opt);
  const BlockPencil p = fiedler_pencil(sys, sigma);
  int recovered = 0;
  for (Complex lambda : pencil_eigenvalues(p).eigenvalues) {
    const Complex refined = refine_eigenvalue(p, lambda);
    const NullVector nv = null_vector(p(refined));
    if (!nv.simple()) continue;
    const RecoveredEigenvector r = recover_eigenvector(sys, cert, refined, nv.vector);
    EXPECT_LE(r.residual_S, 1e-8);
    EXPECT_GE(r.alignment, 1.0 - 1e-8);
    ++recovered;
  }
  EXPECT_GT(recovered, 0);
}

TEST(Recovery, ResidualOrderOfMagnitude) {
  const SystemMatrix sys = gaussian_system(300, 2, 2, 2, 2);
  const BlockPencil c1 = companion_first(sys);
  for (Complex lambda : pencil_eigenvalues(c1).eigenvalues) {
    const Complex refined = refine_eigenvalue(c1, lambda);
    const NullVector nv = null_vector(c1(refined));
    if (!nv.simple()) continue;
    const RecoveredEigenvector r = recover_eigenvector(sys, refined, nv.vector);
    EXPECT_LE(r.residual_R, 1e-6);
  }
}
