#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rosenfied/error.hpp"
#include "rosenfied/matpoly.hpp"
#include "rosenfied/rosenbrock.hpp"

namespace rosenfied {

// ---------------------------------------------------------------------------
// Bijections and their consecution-inversion structure
// ---------------------------------------------------------------------------

/// Bijection sigma : {0..d-1} -> {1..d}. sigma(j) is the position of factor
/// j in the Fiedler product, so the product reads M_{sigma^-1(1)} ... M_{sigma^-1(d)}.
class Bijection {
 public:
  explicit Bijection(std::vector<int> images) : images_(std::move(images)) {
    const int d = degree();
    if (d < 1) throw InvalidArgument("Bijection: empty image list");
    std::vector<bool> seen(d + 1, false);
    for (int v : images_) {
      if (v < 1 || v > d || seen[v]) {
        throw InvalidArgument("Bijection: images must be a permutation of 1.." + std::to_string(d));
      }
      seen[v] = true;
    }
  }

  /// sigma = (d, d-1, ..., 1): product M_{d-1} ... M_0, the first companion form.
  static Bijection descending(int d) {
    std::vector<int> images(d);
    for (int j = 0; j < d; ++j) images[j] = d - j;
    return Bijection(std::move(images));
  }

  /// sigma = (1, ..., d): product M_0 ... M_{d-1}, the second companion form.
  static Bijection ascending(int d) {
    std::vector<int> images(d);
    std::iota(images.begin(), images.end(), 1);
    return Bijection(std::move(images));
  }

  /// All d! bijections in lexicographic order of their image lists.
  static std::vector<Bijection> all(int d) {
    std::vector<int> images(d);
    std::iota(images.begin(), images.end(), 1);
    std::vector<Bijection> out;
    do {
      out.emplace_back(images);
    } while (std::next_permutation(images.begin(), images.end()));
    return out;
  }

  int degree() const { return static_cast<int>(images_.size()); }
  int image(int j) const { return images_.at(j); }
  const std::vector<int>& images() const { return images_; }

  /// Factor indices in product order: sigma^-1(1), ..., sigma^-1(d).
  std::vector<int> factor_order() const {
    std::vector<int> order(degree());
    for (int j = 0; j < degree(); ++j) order[images_[j] - 1] = j;
    return order;
  }

  bool has_consecution(int j) const {
    if (j < 0 || j + 1 >= degree()) throw InvalidArgument("Bijection::has_consecution: j out of range");
    return images_[j] < images_[j + 1];
  }

  /// sigma'(j) = d + 1 - sigma(j): the product in reverse order.
  Bijection reversed() const {
    std::vector<int> images(images_);
    for (int& v : images) v = degree() + 1 - v;
    return Bijection(std::move(images));
  }

  friend bool operator==(const Bijection&, const Bijection&) = default;

 private:
  std::vector<int> images_;
};

/// Consecution-inversion structure sequence (c_1, i_1, ..., c_l, i_l).
/// Only c_1 and the final i_l may be zero.
struct Ciss {
  std::vector<std::pair<int, int>> runs;

  int leading_consecutions() const { return runs.front().first; }
  int leading_inversions() const { return runs.front().second; }

  int consecutions() const {
    int total = 0;
    for (const auto& [c, i] : runs) total += c;
    return total;
  }
  int inversions() const {
    int total = 0;
    for (const auto& [c, i] : runs) total += i;
    return total;
  }

  /// Flattened (c_1, i_1, c_2, i_2, ...).
  std::vector<int> flat() const {
    std::vector<int> out;
    for (const auto& [c, i] : runs) {
      out.push_back(c);
      out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const Ciss&, const Ciss&) = default;
};

inline Ciss ciss(const Bijection& sigma) {
  Ciss out;
  int c = 0;
  int i = 0;
  for (int j = 0; j + 1 < sigma.degree(); ++j) {
    if (sigma.has_consecution(j)) {
      if (i > 0) {
        out.runs.emplace_back(c, i);
        c = 0;
        i = 0;
      }
      ++c;
    } else {
      ++i;
    }
  }
  out.runs.emplace_back(c, i);
  return out;
}

// ---------------------------------------------------------------------------
// Block layout and pencils
// ---------------------------------------------------------------------------

/// 1-based block coordinate.
struct BlockPos {
  int row = 0;
  int col = 0;

  friend bool operator==(const BlockPos&, const BlockPos&) = default;
};

/// d_A blocks of size n followed by d_D blocks of size m.
struct BlockLayout {
  Index n = 0;
  Index m = 0;
  int degree_a = 0;
  int degree_d = 0;

  static BlockLayout of(const SystemMatrix& sys) { return {sys.n(), sys.m(), sys.degree_a(), sys.degree_d()}; }

  Index a_size() const { return n * degree_a; }
  Index d_size() const { return m * degree_d; }
  Index size() const { return a_size() + d_size(); }
  int degree() const { return std::max(degree_a, degree_d); }

  /// Offsets of 1-based A-block k and D-block k.
  Index a_offset(int k) const { return (k - 1) * n; }
  Index d_offset(int k) const { return a_size() + (k - 1) * m; }

  friend bool operator==(const BlockLayout&, const BlockLayout&) = default;
};

/// Where the single B block and the single C block sit in a Rosenbrock
/// linearization: B in (A-row, D-col), C in (D-row, A-col), 1-based.
struct CouplingCorners {
  BlockPos b;
  BlockPos c;

  friend bool operator==(const CouplingCorners&, const CouplingCorners&) = default;
};

/// Pencil lambda X + Y on a BlockLayout.
struct BlockPencil {
  Matrix x;
  Matrix y;
  BlockLayout layout;
  std::optional<CouplingCorners> corners;

  Matrix operator()(Complex lambda0) const { return lambda0 * x + y; }
  MatrixPolynomial as_polynomial() const { return MatrixPolynomial::pencil(x, y); }

  auto a_part(const Matrix& z) const { return z.topLeftCorner(layout.a_size(), layout.a_size()); }
  auto d_part(const Matrix& z) const { return z.bottomRightCorner(layout.d_size(), layout.d_size()); }

  friend bool operator==(const BlockPencil& p, const BlockPencil& q) {
    return p.layout == q.layout && p.x == q.x && p.y == q.y;
  }
};

namespace detail {

inline auto a_block(Matrix& z, const BlockLayout& l, int i, int j) {
  return z.block(l.a_offset(i), l.a_offset(j), l.n, l.n);
}
inline auto d_block(Matrix& z, const BlockLayout& l, int i, int j) {
  return z.block(l.d_offset(i), l.d_offset(j), l.m, l.m);
}
/// Block in A-row i and D-column j (where B lives).
inline auto b_block(Matrix& z, const BlockLayout& l, int i, int j) {
  return z.block(l.a_offset(i), l.d_offset(j), l.n, l.m);
}
/// Block in D-row k and A-column l (where C lives).
inline auto c_block(Matrix& z, const BlockLayout& l, int k, int j) {
  return z.block(l.d_offset(k), l.a_offset(j), l.m, l.n);
}
inline Matrix b_block(const Matrix& z, const BlockLayout& l, int i, int j) {
  return z.block(l.a_offset(i), l.d_offset(j), l.n, l.m);
}
inline Matrix c_block(const Matrix& z, const BlockLayout& l, int k, int j) {
  return z.block(l.d_offset(k), l.a_offset(j), l.m, l.n);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fiedler matrices
// ---------------------------------------------------------------------------

/// Fiedler matrices F_0..F_p of a degree-p polynomial with s-square
/// coefficients, each of size p*s:
///   F_p = diag(P_p, I), F_0 = diag(I, -P_0), and for 1 <= i <= p-1 the pivot
///   [[-P_i, I], [I, 0]] on 0-based blocks (p-i-1, p-i), identity elsewhere.
inline std::vector<Matrix> fiedler_factors(const MatrixPolynomial& poly) {
  const int p = poly.degree();
  const Index s = poly.size();
  if (p < 1) throw InvalidArgument("fiedler_factors: degree must be >= 1");
  const Index size = p * s;
  std::vector<Matrix> out(p + 1, Matrix::Identity(size, size));
  out[p].topLeftCorner(s, s) = poly.coeff(p);
  out[0].bottomRightCorner(s, s) = -poly.coeff(0);
  for (int i = 1; i < p; ++i) {
    const Index at = (p - i - 1) * s;
    Matrix& f = out[i];
    f.block(at, at, s, s) = -poly.coeff(i);
    f.block(at, at + s, s, s).setIdentity();
    f.block(at + s, at, s, s).setIdentity();
    f.block(at + s, at + s, s, s).setZero();
  }
  return out;
}

/// Fiedler matrices M_0..M_{d_A} of A(lambda).
inline std::vector<Matrix> build_M(const MatrixPolynomial& a) { return fiedler_factors(a); }
/// Fiedler matrices N_0..N_{d_D} of D(lambda).
inline std::vector<Matrix> build_N(const MatrixPolynomial& d) { return fiedler_factors(d); }

/// Factor k of a side of degree p in a product over {0..d-1}: indices at or
/// beyond p are identity padding.
inline Matrix padded_factor(const std::vector<Matrix>& factors, int k) {
  const int p = static_cast<int>(factors.size()) - 1;
  if (k < p) return factors[k];
  const Index size = factors.front().rows();
  return Matrix::Identity(size, size);
}

/// Product of one side's factors in the order given by sigma.
inline Matrix side_product(const std::vector<Matrix>& factors, const Bijection& sigma) {
  const Index size = factors.front().rows();
  Matrix prod = Matrix::Identity(size, size);
  for (int k : sigma.factor_order()) prod = prod * padded_factor(factors, k);
  return prod;
}

struct BuildOptions {
  /// Negative control: builds the lambda^0 system factor with +C instead of -C.
  bool corrupt_c_sign = false;
};

/// The Fiedler matrices of a Rosenbrock system.
struct FiedlerMatrixSet {
  BlockLayout layout;
  std::vector<Matrix> a_factors;  // M_0..M_{d_A}
  std::vector<Matrix> d_factors;  // N_0..N_{d_D}
  std::vector<Matrix> system;     // system factors 0..d

  int degree() const { return layout.degree(); }
  int min_degree() const { return std::min(layout.degree_a, layout.degree_d); }
  const Matrix& leading() const { return system.back(); }
};

/// System Fiedler matrices: factor 0 couples M_0 and N_0 through +B in block
/// (d_A, d_D) and -C in block (d_D, d_A); factor d is diag(M_{d_A}, N_{d_D});
/// the rest are diag(M_i, N_i) with identity padding on the lower-degree side.
inline FiedlerMatrixSet build_MM(const SystemMatrix& sys, const BuildOptions& options = {}) {
  FiedlerMatrixSet ms;
  ms.layout = BlockLayout::of(sys);
  ms.a_factors = build_M(sys.a());
  ms.d_factors = build_N(sys.d());
  const BlockLayout& l = ms.layout;
  const int d = l.degree();
  const Index na = l.a_size();
  const Index nd = l.d_size();

  auto diagonal = [&](const Matrix& a_part, const Matrix& d_part) {
    Matrix out = Matrix::Zero(l.size(), l.size());
    out.topLeftCorner(na, na) = a_part;
    out.bottomRightCorner(nd, nd) = d_part;
    return out;
  };

  ms.system.reserve(d + 1);
  Matrix first = diagonal(ms.a_factors[0], ms.d_factors[0]);
  detail::b_block(first, l, l.degree_a, l.degree_d) = sys.b();
  detail::c_block(first, l, l.degree_d, l.degree_a) = options.corrupt_c_sign ? Matrix(sys.c()) : Matrix(-sys.c());
  ms.system.push_back(std::move(first));
  for (int k = 1; k < d; ++k) {
    ms.system.push_back(diagonal(padded_factor(ms.a_factors, k), padded_factor(ms.d_factors, k)));
  }
  ms.system.push_back(diagonal(ms.a_factors.back(), ms.d_factors.back()));
  return ms;
}

/// Product of the system factors in sigma order, by explicit multiplication.
inline Matrix assemble_product(const FiedlerMatrixSet& ms, const Bijection& sigma) {
  if (sigma.degree() != ms.degree()) {
    throw DegreeMismatch("assemble_product: bijection degree " + std::to_string(sigma.degree()) +
                         " but system degree " + std::to_string(ms.degree()));
  }
  const Index size = ms.layout.size();
  Matrix prod = Matrix::Identity(size, size);
  for (int k : sigma.factor_order()) prod = prod * ms.system[k];
  return prod;
}

/// Coupling-block positions implied by CISS(sigma). The leading run length
/// moves B and C one block per factor, but a side of degree p has only p-1
/// non-identity factors to move through.
inline CouplingCorners predicted_corners(const BlockLayout& l, const Ciss& structure) {
  const int c1 = structure.leading_consecutions();
  const int i1 = structure.leading_inversions();
  auto shift_a = [&](int s) { return l.degree_a - std::min(s, l.degree_a - 1); };
  auto shift_d = [&](int s) { return l.degree_d - std::min(s, l.degree_d - 1); };
  if (c1 > 0) return {{l.degree_a, shift_d(c1)}, {l.degree_d, shift_a(c1)}};
  return {{shift_a(i1), l.degree_d}, {shift_d(i1), l.degree_a}};
}

/// Fiedler pencil lambda*M_d - M_sigma.
inline BlockPencil fiedler_pencil(const FiedlerMatrixSet& ms, const Bijection& sigma) {
  return {ms.leading(), -assemble_product(ms, sigma), ms.layout, predicted_corners(ms.layout, ciss(sigma))};
}

inline BlockPencil fiedler_pencil(const SystemMatrix& sys, const Bijection& sigma) {
  return fiedler_pencil(build_MM(sys), sigma);
}

namespace detail {

inline Matrix companion_leading(const SystemMatrix& sys, const BlockLayout& l) {
  Matrix x = Matrix::Identity(l.size(), l.size());
  a_block(x, l, 1, 1) = sys.a().coeff(l.degree_a);
  d_block(x, l, 1, 1) = sys.d().coeff(l.degree_d);
  return x;
}

}  // namespace detail

/// First companion form, written out block by block (no Fiedler products).
inline BlockPencil companion_first(const SystemMatrix& sys) {
  const BlockLayout l = BlockLayout::of(sys);
  const int pa = l.degree_a;
  const int pd = l.degree_d;
  Matrix y = Matrix::Zero(l.size(), l.size());
  for (int k = 1; k <= pa; ++k) detail::a_block(y, l, 1, k) = sys.a().coeff(pa - k);
  for (int k = 1; k < pa; ++k) detail::a_block(y, l, k + 1, k) = -Matrix::Identity(l.n, l.n);
  for (int k = 1; k <= pd; ++k) detail::d_block(y, l, 1, k) = sys.d().coeff(pd - k);
  for (int k = 1; k < pd; ++k) detail::d_block(y, l, k + 1, k) = -Matrix::Identity(l.m, l.m);
  detail::b_block(y, l, 1, pd) = -sys.b();
  detail::c_block(y, l, 1, pa) = sys.c();
  return {detail::companion_leading(sys, l), std::move(y), l, CouplingCorners{{1, pd}, {1, pa}}};
}

/// Second companion form lambda*M_d - M_0 M_1 ... M_{d-1}, written out directly.
inline BlockPencil companion_second(const SystemMatrix& sys) {
  const BlockLayout l = BlockLayout::of(sys);
  const int pa = l.degree_a;
  const int pd = l.degree_d;
  Matrix y = Matrix::Zero(l.size(), l.size());
  for (int k = 1; k <= pa; ++k) detail::a_block(y, l, k, 1) = sys.a().coeff(pa - k);
  for (int k = 1; k < pa; ++k) detail::a_block(y, l, k, k + 1) = -Matrix::Identity(l.n, l.n);
  for (int k = 1; k <= pd; ++k) detail::d_block(y, l, k, 1) = sys.d().coeff(pd - k);
  for (int k = 1; k < pd; ++k) detail::d_block(y, l, k, k + 1) = -Matrix::Identity(l.m, l.m);
  detail::b_block(y, l, pa, 1) = -sys.b();
  detail::c_block(y, l, pd, 1) = sys.c();
  return {detail::companion_leading(sys, l), std::move(y), l, CouplingCorners{{pa, 1}, {pd, 1}}};
}

/// Builds M_sigma without multiplying matrices.
///
/// Starts from the system factor 0 in a frame with one block per side. Step
/// k = 1..d-1 brings in factor k: it is prepended when sigma has an inversion
/// at k-1 and appended on a consecution (it commutes with every factor below
/// k-1, so either end is reachable). Each side whose degree exceeds k gains a
/// leading block. Every step only copies blocks; the pivot contributes -P_k
/// and an identity next to the copied rows or columns.
inline Matrix assemble_algorithmic(const SystemMatrix& sys, const Bijection& sigma) {
  const int d = sys.max_degree();
  if (sigma.degree() != d) {
    throw DegreeMismatch("assemble_algorithmic: bijection degree " + std::to_string(sigma.degree()) +
                         " but max(d_A, d_D) = " + std::to_string(d));
  }
  const Index n = sys.n();
  const Index m = sys.m();
  const int pa = sys.degree_a();
  const int pd = sys.degree_d();

  int ka = 1;
  int kd = 1;
  Matrix w(n + m, n + m);
  w.topLeftCorner(n, n) = -sys.a().coeff(0);
  w.topRightCorner(n, m) = sys.b();
  w.bottomLeftCorner(m, n) = -sys.c();
  w.bottomRightCorner(m, m) = -sys.d().coeff(0);

  for (int k = 1; k < d; ++k) {
    const bool grow_a = k < pa;
    const bool grow_d = k < pd;
    const bool append = sigma.has_consecution(k - 1);
    const int next_ka = ka + (grow_a ? 1 : 0);
    const int next_kd = kd + (grow_d ? 1 : 0);

    // Old block b (A blocks first, then D blocks) -> new block index. On the
    // side the pivot multiplies (rows when prepending, columns when
    // appending) the old leading block keeps its slot.
    auto remap = [&](int b, bool pivot_side) {
      if (b < ka) return (grow_a && pivot_side && b == 0) ? 0 : b + (grow_a ? 1 : 0);
      const int local = b - ka;
      return next_ka + ((grow_d && pivot_side && local == 0) ? 0 : local + (grow_d ? 1 : 0));
    };
    auto old_offset = [&](int b) { return b < ka ? b * n : ka * n + (b - ka) * m; };
    auto new_offset = [&](int b) { return b < next_ka ? b * n : next_ka * n + (b - next_ka) * m; };
    auto extent = [&](int b, int split) { return b < split ? n : m; };

    Matrix next = Matrix::Zero(next_ka * n + next_kd * m, next_ka * n + next_kd * m);
    for (int rb = 0; rb < ka + kd; ++rb) {
      for (int cb = 0; cb < ka + kd; ++cb) {
        const int nr = remap(rb, !append);
        const int nc = remap(cb, append);
        next.block(new_offset(nr), new_offset(nc), extent(nr, next_ka), extent(nc, next_ka)) =
            w.block(old_offset(rb), old_offset(cb), extent(rb, ka), extent(cb, ka));
      }
    }
    if (grow_a) {
      next.block(0, 0, n, n) = -sys.a().coeff(k);
      if (append) {
        next.block(0, n, n, n).setIdentity();
      } else {
        next.block(n, 0, n, n).setIdentity();
      }
    }
    if (grow_d) {
      const Index at = next_ka * n;
      next.block(at, at, m, m) = -sys.d().coeff(k);
      if (append) {
        next.block(at, at + m, m, m).setIdentity();
      } else {
        next.block(at + m, at, m, m).setIdentity();
      }
    }
    w = std::move(next);
    ka = next_ka;
    kd = next_kd;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Coupling-corner structure
// ---------------------------------------------------------------------------

struct CornerReport {
  int c1 = 0;
  int i1_leading = 0;
  CouplingCorners predicted;
  bool coupling_match = false;
  bool a_part_match = false;
  bool d_part_match = false;
  /// Offending blocks, e.g. "C(2,3)" or "A-part".
  std::vector<std::string> mismatches;

  bool exact_match() const { return coupling_match && a_part_match && d_part_match; }

  void require() const {
    if (exact_match()) return;
    std::string what = "coupling corners disagree with CISS prediction at";
    for (const auto& s : mismatches) what += " " + s;
    throw StructureMismatch(what);
  }
};

/// Compares lambda*M_d - M_sigma built from `ms` against the block positions
/// predicted from CISS(sigma), and its diagonal parts against the Fiedler
/// pencils of A and D alone.
inline CornerReport corner_structure(const SystemMatrix& sys, const FiedlerMatrixSet& ms, const Bijection& sigma) {
  const BlockLayout& l = ms.layout;
  const Ciss structure = ciss(sigma);
  CornerReport report;
  report.c1 = structure.leading_consecutions();
  report.i1_leading = structure.leading_inversions();
  report.predicted = predicted_corners(l, structure);

  const BlockPencil pencil = fiedler_pencil(ms, sigma);
  report.coupling_match = true;
  for (int i = 1; i <= l.degree_a; ++i) {
    for (int j = 1; j <= l.degree_d; ++j) {
      const bool at_b = BlockPos{i, j} == report.predicted.b;
      const Matrix expected = at_b ? Matrix(-sys.b()) : Matrix::Zero(l.n, l.m);
      if (detail::b_block(pencil.y, l, i, j) != expected || !detail::b_block(pencil.x, l, i, j).isZero(0.0)) {
        report.coupling_match = false;
        report.mismatches.push_back("B(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  for (int k = 1; k <= l.degree_d; ++k) {
    for (int j = 1; j <= l.degree_a; ++j) {
      const bool at_c = BlockPos{k, j} == report.predicted.c;
      const Matrix expected = at_c ? Matrix(sys.c()) : Matrix::Zero(l.m, l.n);
      if (detail::c_block(pencil.y, l, k, j) != expected || !detail::c_block(pencil.x, l, k, j).isZero(0.0)) {
        report.coupling_match = false;
        report.mismatches.push_back("C(" + std::to_string(k) + "," + std::to_string(j) + ")");
      }
    }
  }
  const Matrix a_sigma = side_product(ms.a_factors, sigma);
  const Matrix d_sigma = side_product(ms.d_factors, sigma);
  report.a_part_match = pencil.a_part(pencil.x) == ms.a_factors.back() && pencil.a_part(pencil.y) == -a_sigma;
  report.d_part_match = pencil.d_part(pencil.x) == ms.d_factors.back() && pencil.d_part(pencil.y) == -d_sigma;
  if (!report.a_part_match) report.mismatches.emplace_back("A-part");
  if (!report.d_part_match) report.mismatches.emplace_back("D-part");
  return report;
}

inline CornerReport corner_structure(const SystemMatrix& sys, const Bijection& sigma) {
  return corner_structure(sys, build_MM(sys), sigma);
}

// ---------------------------------------------------------------------------
// Rosenbrock block transpose
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix rosenbrock_transpose(const Matrix& z, const BlockLayout& l, const CouplingCorners& corners) {
  Matrix out = Matrix::Zero(l.size(), l.size());
  out.topLeftCorner(l.a_size(), l.a_size()) = block_transpose(Matrix(z.topLeftCorner(l.a_size(), l.a_size())), l.n);
  out.bottomRightCorner(l.d_size(), l.d_size()) =
      block_transpose(Matrix(z.bottomRightCorner(l.d_size(), l.d_size())), l.m);
  for (int i = 1; i <= l.degree_a; ++i) {
    for (int j = 1; j <= l.degree_d; ++j) {
      if (BlockPos{i, j} != corners.b && !b_block(z, l, i, j).isZero(0.0)) {
        throw StructureMismatch("block_transpose: unexpected coupling block B(" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
      }
      if (BlockPos{j, i} != corners.c && !c_block(z, l, j, i).isZero(0.0)) {
        throw StructureMismatch("block_transpose: unexpected coupling block C(" + std::to_string(j) + "," +
                                std::to_string(i) + ")");
      }
    }
  }
  // -(e_i e_j^T) (x) B with C at (k, l) becomes -(e_l e_k^T) (x) B and (e_j e_i^T) (x) C.
  b_block(out, l, corners.c.col, corners.c.row) = b_block(z, l, corners.b.row, corners.b.col);
  c_block(out, l, corners.b.col, corners.b.row) = c_block(z, l, corners.c.row, corners.c.col);
  return out;
}

}  // namespace detail

/// Rosenbrock block transpose: the A and D parts are block-transposed and
/// the B/C corner positions trade places. Needs corner metadata.
inline BlockPencil block_transpose(const BlockPencil& p) {
  if (!p.corners) throw InvalidArgument("block_transpose: pencil carries no coupling-corner metadata");
  const CouplingCorners& k = *p.corners;
  CouplingCorners swapped{{k.c.col, k.c.row}, {k.b.col, k.b.row}};
  return {detail::rosenbrock_transpose(p.x, p.layout, k), detail::rosenbrock_transpose(p.y, p.layout, k), p.layout,
          swapped};
}

// ---------------------------------------------------------------------------
// Factor identities
// ---------------------------------------------------------------------------

/// Largest entry of M_i M_j - M_j M_i over 0 <= i, j <= d-1 with |i - j| > 1.
inline double commutativity_defect(const FiedlerMatrixSet& ms) {
  double worst = 0.0;
  const int d = ms.degree();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 2; j < d; ++j) {
      const Matrix diff = ms.system[i] * ms.system[j] - ms.system[j] * ms.system[i];
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

/// Largest | |det M_i| - 1 | over 1 <= i <= d-1.
inline double invertibility_defect(const FiedlerMatrixSet& ms) {
  double worst = 0.0;
  for (int i = 1; i < ms.degree(); ++i) worst = std::max(worst, std::abs(std::abs(determinant(ms.system[i])) - 1.0));
  return worst;
}

}  // namespace rosenfied
