#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rosenfied/error.hpp"
#include "rosenfied/fiedler.hpp"
#include "rosenfied/matpoly.hpp"
#include "rosenfied/rosenbrock.hpp"

namespace rosenfied {

// ---------------------------------------------------------------------------
// Auxiliary matrix polynomials
// ---------------------------------------------------------------------------

namespace detail {

/// Adds `value` into the square block of `target` at (row, col).
inline void add_block(MatrixPolynomial& target, Index row, Index col, const MatrixPolynomial& value) {
  if (value.degree() > target.degree()) throw InvalidArgument("add_block: target degree too small");
  for (int k = 0; k <= value.degree(); ++k) target.coeff(k).block(row, col, value.size(), value.size()) += value.coeff(k);
}

inline MatrixPolynomial lambda_power(const MatrixPolynomial& p, int power) {
  MatrixPolynomial out = p;
  for (int k = 0; k < power; ++k) out = out.times_lambda();
  return out;
}

}  // namespace detail

/// Auxiliary polynomials of one side (A with blocks of size n, or D with
/// blocks of size m), indexed 1..p-1 for shear/exchange/correction and 1..p
/// for the leading family. Block positions are 1-based.
///
///   shear(i)      I + lambda*E_{i,i+1}                    (unimodular)
///   exchange(i)   I with [[0, I], [I, P_i]] on blocks i, i+1 (unimodular)
///   correction(i) [[0, lambda P_{i-1}], [lambda I, lambda^2 P_{i-1}]] on blocks i, i+1
///   leading(i)    diag(0_{(i-1)s}, P_{i-1}, I_{(p-i)s})
///
/// with P_k the degree-k Horner shift.
class SideAuxiliary {
 public:
  explicit SideAuxiliary(const MatrixPolynomial& poly) : degree_(poly.degree()), block_(poly.size()) {
    const int p = degree_;
    const Index s = block_;
    const Index size = p * s;
    const Matrix id = Matrix::Identity(s, s);
    for (int i = 1; i < p; ++i) {
      const Index at = (i - 1) * s;
      MatrixPolynomial q = MatrixPolynomial::zero(size, 1);
      q.coeff(0).setIdentity();
      q.coeff(1).block(at, at + s, s, s) = id;
      shear_.push_back(std::move(q));

      const MatrixPolynomial shift = horner_shift(poly, i);
      MatrixPolynomial r = MatrixPolynomial::zero(size, i);
      r.coeff(0).setIdentity();
      r.coeff(0).block(at, at, 2 * s, 2 * s).setZero();
      r.coeff(0).block(at, at + s, s, s) = id;
      r.coeff(0).block(at + s, at, s, s) = id;
      detail::add_block(r, at + s, at + s, shift);
      exchange_.push_back(std::move(r));

      const MatrixPolynomial prev = horner_shift(poly, i - 1);
      MatrixPolynomial t = MatrixPolynomial::zero(size, i + 1);
      detail::add_block(t, at, at + s, prev.times_lambda());
      t.coeff(1).block(at + s, at, s, s) = id;
      detail::add_block(t, at + s, at + s, detail::lambda_power(prev, 2));
      correction_.push_back(std::move(t));
    }
    for (int i = 1; i <= p; ++i) {
      const Index at = (i - 1) * s;
      MatrixPolynomial lead = MatrixPolynomial::zero(size, i - 1);
      detail::add_block(lead, at, at, horner_shift(poly, i - 1));
      lead.coeff(0).bottomRightCorner((p - i) * s, (p - i) * s).setIdentity();
      leading_.push_back(std::move(lead));
    }
  }

  int degree() const { return degree_; }
  Index block() const { return block_; }
  Index size() const { return degree_ * block_; }

  const MatrixPolynomial& shear(int i) const { return shear_.at(check(i, degree_ - 1)); }
  const MatrixPolynomial& exchange(int i) const { return exchange_.at(check(i, degree_ - 1)); }
  const MatrixPolynomial& correction(int i) const { return correction_.at(check(i, degree_ - 1)); }
  const MatrixPolynomial& leading(int i) const { return leading_.at(check(i, degree_)); }

 private:
  static std::size_t check(int i, int top) {
    if (i < 1 || i > top) throw InvalidArgument("auxiliary index " + std::to_string(i) + " outside [1, " + std::to_string(top) + "]");
    return static_cast<std::size_t>(i - 1);
  }

  int degree_;
  Index block_;
  std::vector<MatrixPolynomial> shear_;
  std::vector<MatrixPolynomial> exchange_;
  std::vector<MatrixPolynomial> correction_;
  std::vector<MatrixPolynomial> leading_;
};

/// System-level auxiliary polynomials, block-diagonal across the A/D split.
///
/// A side of degree p < d only joins the reduction once the system step
/// reaches its own range: at system step i it uses its local index
/// i - (d - p), and until that index is positive it contributes identity
/// shear/exchange, zero correction and its Fiedler leading factor.
class AuxiliaryFamily {
 public:
  explicit AuxiliaryFamily(const SystemMatrix& sys)
      : layout_(BlockLayout::of(sys)), a_side_(sys.a()), d_side_(sys.d()) {}

  const BlockLayout& layout() const { return layout_; }
  int degree() const { return layout_.degree(); }
  const SideAuxiliary& a_side() const { return a_side_; }
  const SideAuxiliary& d_side() const { return d_side_; }

  MatrixPolynomial shear(int i) const {
    check_step(i);
    return combine(i, [](const SideAuxiliary& s, int k) {
      return k >= 1 ? s.shear(k) : MatrixPolynomial::identity(s.size());
    });
  }
  MatrixPolynomial exchange(int i) const {
    check_step(i);
    return combine(i, [](const SideAuxiliary& s, int k) {
      return k >= 1 ? s.exchange(k) : MatrixPolynomial::identity(s.size());
    });
  }
  MatrixPolynomial correction(int i) const {
    check_step(i);
    return combine(i, [](const SideAuxiliary& s, int k) {
      return k >= 1 ? s.correction(k) : MatrixPolynomial::zero(s.size());
    });
  }
  /// Leading family, 1 <= i <= d; leading(1) equals the system factor d.
  MatrixPolynomial leading(int i) const {
    if (i < 1 || i > degree()) throw InvalidArgument("leading: index " + std::to_string(i) + " outside [1, d]");
    return combine(i, [](const SideAuxiliary& s, int k) { return s.leading(std::max(1, k)); });
  }

 private:
  void check_step(int i) const {
    if (i < 1 || i >= degree()) throw InvalidArgument("auxiliary step " + std::to_string(i) + " outside [1, d-1]");
  }

  template <class Pick>
  MatrixPolynomial combine(int i, Pick pick) const {
    const int d = degree();
    return direct_sum({pick(a_side_, i - (d - a_side_.degree())), pick(d_side_, i - (d - d_side_.degree()))});
  }

  BlockLayout layout_;
  SideAuxiliary a_side_;
  SideAuxiliary d_side_;
};

inline AuxiliaryFamily build_auxiliary(const SystemMatrix& sys) { return AuxiliaryFamily(sys); }

/// Rosenbrock block transpose of a polynomial that is block-diagonal across
/// the A/D split.
inline MatrixPolynomial rosenbrock_transpose(const MatrixPolynomial& p, const BlockLayout& l) {
  for (const auto& c : p.coeffs()) {
    if (!c.topRightCorner(l.a_size(), l.d_size()).isZero(0.0) || !c.bottomLeftCorner(l.d_size(), l.a_size()).isZero(0.0)) {
      throw StructureMismatch("rosenbrock_transpose: polynomial couples the A and D parts");
    }
  }
  return direct_sum({block_transpose(p.block(0, 0, l.a_size()), l.n),
                     block_transpose(p.block(l.a_size(), l.a_size(), l.d_size()), l.m)});
}

/// True when every coefficient vanishes off the A/D diagonal blocks.
inline bool is_system_block_diagonal(const MatrixPolynomial& p, const BlockLayout& l) {
  return std::all_of(p.coeffs().begin(), p.coeffs().end(), [&](const Matrix& c) {
    return c.topRightCorner(l.a_size(), l.d_size()).isZero(0.0) && c.bottomLeftCorner(l.d_size(), l.a_size()).isZero(0.0);
  });
}

// ---------------------------------------------------------------------------
// Relation checks
// ---------------------------------------------------------------------------

struct RelationFailure {
  std::string relation;
  int i = 0;
  int j = -1;  // factor index for the absorption relations, else -1
  double deviation = 0.0;
};

struct RelationReport {
  int checked = 0;
  double max_deviation = 0.0;
  std::vector<RelationFailure> failures;

  bool ok() const { return failures.empty(); }

  void require() const {
    if (ok()) return;
    const auto& f = failures.front();
    throw RelationViolation("relation " + f.relation + " fails at i=" + std::to_string(f.i) +
                            (f.j >= 0 ? ", j=" + std::to_string(f.j) : std::string()) +
                            ", max deviation " + std::to_string(f.deviation));
  }
};

/// Coefficient comparison of the shear/exchange identities for i = 1..d-1:
///   (a) Q^B (lambda D_i) R = lambda D_{i+1} + T,  Q^B (M_{d-i-1} M_{d-i}) R = M_{d-i-1} + T
///   (b) R^B (lambda D_i) Q = lambda D_{i+1} + T^B, R^B (M_{d-i} M_{d-i-1}) Q = M_{d-i-1} + T^B
///   (c) T M_j = M_j T = T and the same for T^B, j <= d-i-2
/// plus R^B = R. A relation fails when its deviation exceeds `tol`.
inline RelationReport check_aux_relations(const AuxiliaryFamily& fam, const FiedlerMatrixSet& ms, double tol = 0.0) {
  RelationReport report;
  const BlockLayout& l = fam.layout();
  const int d = fam.degree();
  auto record = [&](const char* name, int i, int j, const MatrixPolynomial& lhs, const MatrixPolynomial& rhs) {
    const double dev = max_abs_diff(lhs, rhs);
    ++report.checked;
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol) report.failures.push_back({name, i, j, dev});
  };
  for (int i = 1; i < d; ++i) {
    const MatrixPolynomial q = fam.shear(i);
    const MatrixPolynomial r = fam.exchange(i);
    const MatrixPolynomial t = fam.correction(i);
    const MatrixPolynomial qb = rosenbrock_transpose(q, l);
    const MatrixPolynomial rb = rosenbrock_transpose(r, l);
    const MatrixPolynomial tb = rosenbrock_transpose(t, l);
    const MatrixPolynomial lead = fam.leading(i).times_lambda();
    const MatrixPolynomial next = fam.leading(i + 1).times_lambda();
    const Matrix& lo = ms.system[d - i - 1];
    const Matrix& hi = ms.system[d - i];
    const MatrixPolynomial lo_poly = MatrixPolynomial::constant(lo);

    record("R^B=R", i, -1, rb, r);
    record("a.leading", i, -1, qb * lead * r, next + t);
    record("a.factors", i, -1, qb * (lo * hi) * r, lo_poly + t);
    record("b.leading", i, -1, rb * lead * q, next + tb);
    record("b.factors", i, -1, rb * (hi * lo) * q, lo_poly + tb);
    for (int j = 0; j <= d - i - 2; ++j) {
      const Matrix& mj = ms.system[j];
      record("c.right", i, j, t * mj, t);
      record("c.left", i, j, mj * t, t);
      record("c.right.B", i, j, tb * mj, tb);
      record("c.left.B", i, j, mj * tb, tb);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reduction chain
// ---------------------------------------------------------------------------

/// Product of the system factors with index <= d - j, in sigma order.
inline Matrix partial_product(const FiedlerMatrixSet& ms, const Bijection& sigma, int j) {
  const int d = ms.degree();
  if (j < 1 || j > d) throw InvalidArgument("partial_product: stage " + std::to_string(j) + " outside [1, d]");
  const Index size = ms.layout.size();
  Matrix prod = Matrix::Identity(size, size);
  for (int k : sigma.factor_order())
    if (k <= d - j) prod = prod * ms.system[k];
  return prod;
}

/// Stage-j pencil lambda D_j - M_sigma^(j); stage 1 is the Fiedler pencil itself.
inline MatrixPolynomial stage_pencil(const AuxiliaryFamily& fam, const FiedlerMatrixSet& ms, const Bijection& sigma,
                                     int j) {
  return fam.leading(j).times_lambda() - MatrixPolynomial::constant(partial_product(ms, sigma, j));
}

enum class StepKind { consecution, inversion };

inline const char* to_string(StepKind k) { return k == StepKind::consecution ? "consecution" : "inversion"; }

struct ReductionStep {
  int index = 0;
  StepKind kind = StepKind::consecution;
  MatrixPolynomial left = MatrixPolynomial::identity(1);
  MatrixPolynomial right = MatrixPolynomial::identity(1);
  MatrixPolynomial result = MatrixPolynomial::identity(1);
  double residual = 0.0;
};

/// Step i of the reduction: stage i -> stage i+1, via Q^B (.) R when sigma
/// has a consecution at d-i-1 and R^B (.) Q otherwise. Throws StepMismatch
/// when the result is more than `tol` away from the directly built stage.
inline ReductionStep reduce_step(const MatrixPolynomial& stage, const AuxiliaryFamily& fam, const FiedlerMatrixSet& ms,
                                 const Bijection& sigma, int i, double tol = 0.0) {
  const int d = fam.degree();
  if (sigma.degree() != d) throw DegreeMismatch("reduce_step: bijection degree does not match the system");
  if (i < 1 || i >= d) throw InvalidArgument("reduce_step: step " + std::to_string(i) + " outside [1, d-1]");
  const BlockLayout& l = fam.layout();
  ReductionStep step;
  step.index = i;
  step.kind = sigma.has_consecution(d - i - 1) ? StepKind::consecution : StepKind::inversion;
  if (step.kind == StepKind::consecution) {
    step.left = rosenbrock_transpose(fam.shear(i), l);
    step.right = fam.exchange(i);
  } else {
    step.left = rosenbrock_transpose(fam.exchange(i), l);
    step.right = fam.shear(i);
  }
  step.result = step.left * stage * step.right;
  step.residual = max_abs_diff(step.result, stage_pencil(fam, ms, sigma, i + 1));
  if (step.residual > tol) {
    throw StepMismatch("reduce_step " + std::to_string(i) + " (" + to_string(step.kind) + "): deviation " +
                       std::to_string(step.residual) + " from the stage-" + std::to_string(i + 1) + " pencil");
  }
  return step;
}

/// U = U_0 ... U_{d-2} and V = V_{d-2} ... V_0, with U_i, V_i the left and
/// right factors that the reduction applies at step d-i-1.
inline std::pair<MatrixPolynomial, MatrixPolynomial> build_UV(const SystemMatrix& sys, const Bijection& sigma) {
  const AuxiliaryFamily fam(sys);
  const BlockLayout& l = fam.layout();
  const int d = fam.degree();
  if (sigma.degree() != d) throw DegreeMismatch("build_UV: bijection degree does not match the system");
  MatrixPolynomial u = MatrixPolynomial::identity(l.size());
  MatrixPolynomial v = MatrixPolynomial::identity(l.size());
  for (int i = 0; i + 1 < d; ++i) {
    const int k = d - i - 1;
    if (sigma.has_consecution(i)) {
      u = u * rosenbrock_transpose(fam.shear(k), l);
      v = fam.exchange(k) * v;
    } else {
      u = u * rosenbrock_transpose(fam.exchange(k), l);
      v = fam.shear(k) * v;
    }
  }
  return {u, v};
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

/// Constant factors carrying the final stage diag(-I, A) (+) diag(-I, D) with
/// its coupling blocks to I (+) S (+) I: flip the sign of the -I blocks, then
/// move D-block d_D to the front of the D part.
inline std::pair<Matrix, Matrix> standard_form_transforms(const BlockLayout& l) {
  const Index size = l.size();
  const Index a_tail = l.a_size() - l.n;
  const Index d_tail = l.d_size() - l.m;
  Matrix sign = Matrix::Identity(size, size);
  sign.topLeftCorner(a_tail, a_tail) *= -1.0;
  sign.block(l.a_size(), l.a_size(), d_tail, d_tail) *= -1.0;
  Matrix perm = Matrix::Zero(size, size);
  perm.topLeftCorner(l.a_size(), l.a_size()).setIdentity();
  perm.block(l.a_size(), l.a_size() + d_tail, l.m, l.m).setIdentity();
  perm.block(l.a_size() + l.m, l.a_size(), d_tail, d_tail).setIdentity();
  return {perm * sign, perm.transpose()};
}

struct EquivalenceCertificate {
  std::vector<int> sigma;
  BlockLayout layout;
  std::vector<ReductionStep> steps;
  MatrixPolynomial final_form = MatrixPolynomial::identity(1);
  MatrixPolynomial u = MatrixPolynomial::identity(1);
  MatrixPolynomial v = MatrixPolynomial::identity(1);
  /// Constant left/right transforms taking final_form to I (+) S (+) I.
  Matrix left_constant;
  Matrix right_constant;
  /// max |U L V - final_form| over coefficients.
  double uv_residual = 0.0;
  /// max |left * final_form * right - I (+) S (+) I| over coefficients.
  double standard_form_residual = 0.0;
  bool factors_block_diagonal = false;
  Complex det_u{0.0};
  Complex det_v{0.0};
  bool u_unimodular = false;
  bool v_unimodular = false;
  /// Relative standard deviation of det L_sigma / det S over sample points.
  double det_ratio_spread = 0.0;
  Complex det_ratio{0.0};

  double max_step_residual() const {
    double worst = 0.0;
    for (const auto& s : steps) worst = std::max(worst, s.residual);
    return worst;
  }
};

struct CertifyOptions {
  /// Per-coefficient tolerance of every exact comparison; 0 on integer data.
  double tol = 0.0;
  /// Bound on the relative spread of det L_sigma / det S.
  double ratio_tol = 1e-8;
  double unimodular_tol = 1e-10;
  int samples = 20;
  std::uint64_t seed = 0x5eed;
  BuildOptions build;
};

namespace detail {

/// I_{(d_A-1)n} (+) S(lambda) (+) I_{(d_D-1)m}.
inline MatrixPolynomial identity_plus_system(const SystemMatrix& sys) {
  std::vector<MatrixPolynomial> parts;
  if (sys.degree_a() > 1) parts.push_back(MatrixPolynomial::identity((sys.degree_a() - 1) * sys.n()));
  parts.push_back(sys.as_polynomial());
  if (sys.degree_d() > 1) parts.push_back(MatrixPolynomial::identity((sys.degree_d() - 1) * sys.m()));
  return direct_sum(parts);
}

/// Mean and relative standard deviation of f(z)/g(z) over random points.
template <class F, class G>
std::pair<Complex, double> ratio_spread(F f, G g, double radius, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Complex> ratios;
  for (int s = 0; s < samples; ++s) {
    const Complex z(radius * unit(rng), radius * unit(rng));
    const Complex den = g(z);
    if (std::abs(den) == 0.0) continue;
    ratios.push_back(f(z) / den);
  }
  if (ratios.empty()) return {Complex{0.0}, INFINITY};
  Complex mean{0.0};
  for (auto r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  double var = 0.0;
  for (auto r : ratios) var += std::norm(r - mean);
  var /= static_cast<double>(ratios.size());
  const double spread = std::abs(mean) > 0.0 ? std::sqrt(var) / std::abs(mean) : INFINITY;
  return {mean, spread};
}

}  // namespace detail

/// Runs the whole reduction for L_sigma and checks every stage. Throws
/// CertificationFailure naming the first stage that fails.
inline EquivalenceCertificate certify(const SystemMatrix& sys, const Bijection& sigma, const CertifyOptions& opt = {}) {
  const int d = sys.max_degree();
  if (sigma.degree() != d) throw CertificationFailure("input", "bijection degree does not match max(d_A, d_D)");
  const FiedlerMatrixSet ms = build_MM(sys, opt.build);
  const AuxiliaryFamily fam(sys);
  const BlockLayout& l = fam.layout();

  EquivalenceCertificate cert;
  cert.sigma = sigma.images();
  cert.layout = l;

  const BlockPencil pencil = fiedler_pencil(ms, sigma);
  const MatrixPolynomial start = pencil.as_polynomial();
  MatrixPolynomial stage = start;
  cert.factors_block_diagonal = true;
  for (int i = 1; i < d; ++i) {
    try {
      cert.steps.push_back(reduce_step(stage, fam, ms, sigma, i, opt.tol));
    } catch (const StepMismatch& e) {
      throw CertificationFailure("step " + std::to_string(i), e.what());
    }
    const auto& step = cert.steps.back();
    cert.factors_block_diagonal = cert.factors_block_diagonal && is_system_block_diagonal(step.left, l) &&
                                  is_system_block_diagonal(step.right, l);
    stage = step.result;
  }
  cert.final_form = stage;
  if (!cert.factors_block_diagonal) throw CertificationFailure("factors", "a step factor couples the A and D parts");

  auto [u, v] = build_UV(sys, sigma);
  cert.u = std::move(u);
  cert.v = std::move(v);
  cert.uv_residual = max_abs_diff(cert.u * start * cert.v, cert.final_form);
  if (cert.uv_residual > opt.tol) {
    throw CertificationFailure("U L V", "deviation " + std::to_string(cert.uv_residual) + " from the final stage");
  }
  if (!is_system_block_diagonal(cert.u, l) || !is_system_block_diagonal(cert.v, l)) {
    throw CertificationFailure("U L V", "U or V couples the A and D parts");
  }

  const ScalarPolynomial det_u = det_poly(cert.u);
  const ScalarPolynomial det_v = det_poly(cert.v);
  cert.det_u = det_u.coeff(0);
  cert.det_v = det_v.coeff(0);
  cert.u_unimodular = det_u.degree() == 0 && std::abs(cert.det_u) > opt.unimodular_tol;
  cert.v_unimodular = det_v.degree() == 0 && std::abs(cert.det_v) > opt.unimodular_tol;
  if (!cert.u_unimodular || !cert.v_unimodular) {
    throw CertificationFailure("unimodularity", std::string(cert.u_unimodular ? "V" : "U") +
                                                    " has a non-constant or vanishing determinant");
  }

  auto [left, right] = standard_form_transforms(l);
  cert.left_constant = std::move(left);
  cert.right_constant = std::move(right);
  cert.standard_form_residual =
      max_abs_diff(cert.left_constant * cert.final_form * cert.right_constant, detail::identity_plus_system(sys));
  if (cert.standard_form_residual > opt.tol) {
    throw CertificationFailure("standard form", "deviation " + std::to_string(cert.standard_form_residual) +
                                                    " from I (+) S (+) I");
  }

  const double radius = interpolation_radius(sys.as_polynomial());
  auto [ratio, spread] = detail::ratio_spread([&](Complex z) { return determinant(pencil(z)); },
                                              [&](Complex z) { return determinant(eval_S(sys, z)); }, radius,
                                              opt.samples, opt.seed);
  cert.det_ratio = ratio;
  cert.det_ratio_spread = spread;
  if (!(spread <= opt.ratio_tol)) {
    throw CertificationFailure("determinant ratio", "relative spread " + std::to_string(spread));
  }
  return cert;
}

}  // namespace rosenfied
