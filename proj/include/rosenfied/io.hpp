#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rosenfied/equivalence.hpp"
#include "rosenfied/error.hpp"
#include "rosenfied/fiedler.hpp"
#include "rosenfied/matpoly.hpp"
#include "rosenfied/rosenbrock.hpp"
#include "rosenfied/spectra.hpp"

namespace rosenfied {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool is_flat(const json& j) {
  if (!j.is_array()) return true;
  for (const auto& e : j)
    if (e.is_structured() && !(e.is_array() && std::none_of(e.begin(), e.end(), [](const json& x) { return x.is_structured(); })))
      return false;
  return true;
}

inline void write_json(std::string& out, const json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  switch (j.type()) {
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Scalars, [re, im] pairs and matrix rows stay on one line.
      const bool inline_array = is_flat(j);
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += inline_array ? ", " : ",";
        if (!inline_array) out += "\n" + pad;
        write_json(out, e, indent, level + 1);
        first = false;
      }
      if (!inline_array) out += "\n" + close_pad;
      out += ']';
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        out += "\n" + pad + json(key).dump() + ": ";
        write_json(out, value, indent, level + 1);
        first = false;
      }
      out += "\n" + close_pad + '}';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Pretty JSON with every float written to 17 significant digits, so values
/// read back bit-identical.
inline std::string dump(const json& j, int indent = 2) {
  std::string out;
  detail::write_json(out, j, indent, 0);
  out += '\n';
  return out;
}

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const std::vector<Complex>& zs) {
  json out = json::array();
  for (auto z : zs) out.push_back(to_json(z));
  return out;
}

inline json to_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(to_json(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline json to_json(const MatrixPolynomial& p) {
  json out = json::array();
  for (const auto& c : p.coeffs()) out.push_back(to_json(c));
  return out;
}

inline json to_json(const Ciss& c) { return c.flat(); }

inline json to_json(const BlockLayout& l) {
  return {{"n", l.n}, {"m", l.m}, {"d_A", l.degree_a}, {"d_D", l.degree_d}, {"size", l.size()}};
}

inline json to_json(const SystemMatrix& sys, const std::optional<Bijection>& sigma = std::nullopt) {
  json out = {{"n", sys.n()},
              {"m", sys.m()},
              {"A", to_json(sys.a())},
              {"B", to_json(sys.b())},
              {"C", to_json(sys.c())},
              {"D", to_json(sys.d())}};
  if (sigma) out["sigma"] = sigma->images();
  return out;
}

inline json to_json(const CornerReport& r) {
  return {{"c1", r.c1},
          {"i1_leading", r.i1_leading},
          {"B_block", {r.predicted.b.row, r.predicted.b.col}},
          {"C_block", {r.predicted.c.row, r.predicted.c.col}},
          {"coupling_match", r.coupling_match},
          {"A_part_match", r.a_part_match},
          {"D_part_match", r.d_part_match},
          {"mismatches", r.mismatches},
          {"exact_match", r.exact_match()}};
}

inline json to_json(const RelationReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    json entry = {{"relation", f.relation}, {"i", f.i}, {"deviation", f.deviation}};
    if (f.j >= 0) entry["j"] = f.j;
    failures.push_back(std::move(entry));
  }
  return {{"passed", r.ok()}, {"checked", r.checked}, {"max_deviation", r.max_deviation}, {"failures", failures}};
}

inline json to_json(const EquivalenceCertificate& c) {
  json steps = json::array();
  for (const auto& s : c.steps) {
    steps.push_back({{"index", s.index},
                     {"kind", to_string(s.kind)},
                     {"left", s.kind == StepKind::consecution ? "shear^B" : "exchange^B"},
                     {"right", s.kind == StepKind::consecution ? "exchange" : "shear"},
                     {"residual", s.residual}});
  }
  return {{"sigma", c.sigma},
          {"steps", steps},
          {"uv_residual", c.uv_residual},
          {"standard_form_residual", c.standard_form_residual},
          {"factors_block_diagonal", c.factors_block_diagonal},
          {"det_U", to_json(c.det_u)},
          {"det_V", to_json(c.det_v)},
          {"U_unimodular", c.u_unimodular},
          {"V_unimodular", c.v_unimodular},
          {"det_ratio", to_json(c.det_ratio)},
          {"det_ratio_spread", c.det_ratio_spread}};
}

inline json to_json(const EigenReport& r) {
  json matching = json::array();
  for (const auto& m : r.matching) {
    matching.push_back({{"pencil", to_json(m.pencil)},
                        {"oracle", to_json(m.oracle)},
                        {"distance", m.distance},
                        {"allowance", m.allowance}});
  }
  return {{"passed", r.passed()},
          {"tol", r.tol},
          {"pencil_count", r.pencil_eigs.size()},
          {"oracle_count", r.oracle_eigs.size()},
          {"pencil_infinite", r.pencil_infinite},
          {"oracle_infinite", r.oracle_infinite},
          {"max_matched_distance", r.max_matched_distance},
          {"max_relative_distance", r.max_relative_distance},
          {"unmatched_pencil", to_json(r.unmatched_pencil)},
          {"unmatched_oracle", to_json(r.unmatched_oracle)},
          {"matching", matching}};
}

inline json to_json(const RecoveredEigenvector& r) {
  return {{"lambda0", to_json(r.lambda0)}, {"x0", to_json(r.x0)},
          {"u0", to_json(r.u0)},           {"residual_S", r.residual_S},
          {"residual_R", r.residual_R},    {"alignment", r.alignment}};
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

struct SystemFile {
  SystemMatrix system;
  std::optional<Bijection> sigma;
};

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline Complex read_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError(path, "expected [re, im] or a number");
}

inline Matrix read_matrix(const json& j, const std::string& path, Index rows, Index cols) {
  if (!j.is_array()) throw SchemaError(path, "expected a list of rows");
  if (static_cast<Index>(j.size()) != rows) {
    throw DimensionMismatch(path + ": " + std::to_string(j.size()) + " rows, expected " + std::to_string(rows));
  }
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) throw SchemaError(row_path, "expected a list of entries");
    if (static_cast<Index>(row.size()) != cols) {
      throw DimensionMismatch(row_path + ": " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (Index k = 0; k < cols; ++k)
      out(i, k) = read_complex(row[static_cast<std::size_t>(k)], row_path + "[" + std::to_string(k) + "]");
  }
  return out;
}

inline MatrixPolynomial read_polynomial(const json& j, const std::string& path, Index size) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty list of coefficient matrices");
  if (j.size() < 2) throw SchemaError(path, "degree must be >= 1 (need at least two coefficients)");
  std::vector<Matrix> coeffs;
  for (std::size_t i = 0; i < j.size(); ++i) coeffs.push_back(read_matrix(j[i], path + "[" + std::to_string(i) + "]", size, size));
  return MatrixPolynomial(std::move(coeffs));
}

inline Index read_dimension(const json& j, const std::string& key) {
  const json& v = field(j, key, "");
  if (!v.is_number_integer() || v.get<long long>() < 1) throw SchemaError(key, "expected a positive integer");
  return static_cast<Index>(v.get<long long>());
}

}  // namespace detail

/// Bijection from a list of images; any failure is reported against `path`.
inline Bijection read_sigma(const json& j, const std::string& path, int degree) {
  if (!j.is_array()) throw SchemaError(path, "expected a list of integers");
  std::vector<int> images;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected an integer");
    images.push_back(j[i].get<int>());
  }
  if (static_cast<int>(images.size()) != degree) {
    throw SchemaError(path, "length " + std::to_string(images.size()) + ", expected max(d_A, d_D) = " + std::to_string(degree));
  }
  try {
    return Bijection(std::move(images));
  } catch (const InvalidArgument& e) {
    throw SchemaError(path, e.what());
  }
}

/// Parses a system document. Layout problems raise SchemaError; sizes that
/// disagree with n and m raise DimensionMismatch.
inline SystemFile read_system(const json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  const Index n = detail::read_dimension(j, "n");
  const Index m = detail::read_dimension(j, "m");
  MatrixPolynomial a = detail::read_polynomial(detail::field(j, "A", ""), "A", n);
  Matrix b = detail::read_matrix(detail::field(j, "B", ""), "B", n, m);
  Matrix c = detail::read_matrix(detail::field(j, "C", ""), "C", m, n);
  MatrixPolynomial d = detail::read_polynomial(detail::field(j, "D", ""), "D", m);
  SystemMatrix sys(std::move(a), std::move(b), std::move(c), std::move(d));
  std::optional<Bijection> sigma;
  if (auto it = j.find("sigma"); it != j.end() && !it->is_null()) sigma = read_sigma(*it, "sigma", sys.max_degree());
  return {std::move(sys), std::move(sigma)};
}

inline SystemFile read_system(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON: ") + e.what());
  }
  return read_system(j);
}

/// True when every entry of the system has integer real and imaginary parts.
inline bool has_integer_entries(const SystemMatrix& sys) {
  auto integral = [](const Matrix& a) {
    return a.unaryExpr([](Complex z) {
              return Complex(z.real() == std::round(z.real()) && z.imag() == std::round(z.imag()) ? 1.0 : 0.0);
            }).real().minCoeff() > 0.0;
  };
  for (const auto& c : sys.a().coeffs())
    if (!integral(c)) return false;
  for (const auto& c : sys.d().coeffs())
    if (!integral(c)) return false;
  return integral(sys.b()) && integral(sys.c());
}

}  // namespace rosenfied
