#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "rosenfied/equivalence.hpp"
#include "rosenfied/error.hpp"
#include "rosenfied/fiedler.hpp"
#include "rosenfied/gen.hpp"
#include "rosenfied/io.hpp"
#include "rosenfied/spectra.hpp"

namespace rosenfied {

struct RunConfig {
  std::uint64_t seed = 0;
  double tol_spectral = 1e-6;
  double tol_residual = 1e-8;
  int samples = 20;
  /// Exact structural comparisons (zero tolerance) instead of kFloatTolerance.
  bool integer_mode = false;
  /// Negative control: corrupt the sign of C in the system factor 0.
  bool inject_typo = false;
};

/// Absolute coefficient tolerance of structural comparisons on float data.
inline constexpr double kFloatTolerance = 1e-10;

/// Default spectral tolerance, overridden by ROSENFIED_TOL when set.
/// Throws InvalidArgument on a malformed or non-positive value.
inline double default_tolerance() {
  const char* env = std::getenv("ROSENFIED_TOL");
  if (env == nullptr || *env == '\0') return RunConfig{}.tol_spectral;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0)) throw InvalidArgument(std::string("ROSENFIED_TOL is not a positive number: ") + env);
  return v;
}

inline double structural_tolerance(const RunConfig& cfg) { return cfg.integer_mode ? 0.0 : kFloatTolerance; }

inline json config_json(const RunConfig& cfg) {
  return {{"seed", cfg.seed},
          {"tol_spectral", cfg.tol_spectral},
          {"tol_residual", cfg.tol_residual},
          {"tol_structural", structural_tolerance(cfg)},
          {"samples", cfg.samples},
          {"integer_mode", cfg.integer_mode},
          {"inject_typo", cfg.inject_typo}};
}

struct Outcome {
  json report;
  bool passed = false;
};

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

inline Outcome run_build(const SystemMatrix& sys, const Bijection& sigma, const RunConfig& cfg) {
  const FiedlerMatrixSet ms = build_MM(sys, {cfg.inject_typo});
  const BlockPencil pencil = fiedler_pencil(ms, sigma);
  const CornerReport corner = corner_structure(sys, ms, sigma);
  Outcome out;
  out.passed = corner.exact_match();
  out.report = {{"command", "build"},
                {"layout", to_json(ms.layout)},
                {"sigma", sigma.images()},
                {"ciss", to_json(ciss(sigma))},
                {"X", to_json(pencil.x)},
                {"Y", to_json(pencil.y)},
                {"M_sigma", to_json(Matrix(-pencil.y))},
                {"corner", to_json(corner)}};
  return out;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace detail {

inline json failed_check(const std::exception& e) { return {{"passed", false}, {"error", e.what()}}; }

}  // namespace detail

/// Every structural, algebraic and spectral check for each bijection.
inline Outcome run_verify(const SystemMatrix& sys, const std::vector<Bijection>& sigmas, const RunConfig& cfg) {
  const double tol = structural_tolerance(cfg);
  const FiedlerMatrixSet ms = build_MM(sys, {cfg.inject_typo});
  const FiedlerMatrixSet clean = build_MM(sys);
  bool all = true;

  json global;
  const double comm = commutativity_defect(ms);
  const double inv = invertibility_defect(ms);
  global["commutativity"] = {{"passed", comm <= tol}, {"max_deviation", comm}};
  global["invertibility"] = {{"passed", inv <= 1e-8}, {"max_deviation", inv}};
  all = all && comm <= tol && inv <= 1e-8;
  try {
    const RelationReport rel = check_aux_relations(AuxiliaryFamily(sys), ms, tol);
    global["aux_relations"] = to_json(rel);
    all = all && rel.ok();
  } catch (const Error& e) {
    global["aux_relations"] = detail::failed_check(e);
    all = false;
  }

  json per_sigma = json::array();
  for (const auto& sigma : sigmas) {
    json entry = {{"sigma", sigma.images()}, {"ciss", to_json(ciss(sigma))}};
    bool ok = true;

    // The operation-free assembly is a property of the clean factors.
    const bool same = assemble_algorithmic(sys, sigma) == assemble_product(clean, sigma);
    entry["algorithmic_equals_product"] = same;
    ok = ok && same;

    const CornerReport corner = corner_structure(sys, ms, sigma);
    entry["corner"] = to_json(corner);
    ok = ok && corner.exact_match();

    CertifyOptions copt;
    copt.tol = tol;
    copt.samples = cfg.samples;
    copt.seed = cfg.seed;
    copt.build.corrupt_c_sign = cfg.inject_typo;
    try {
      json cert = to_json(certify(sys, sigma, copt));
      cert["passed"] = true;
      entry["certificate"] = std::move(cert);
    } catch (const CertificationFailure& e) {
      entry["certificate"] = {{"passed", false}, {"stage", e.stage()}, {"error", e.what()}};
      ok = false;
    } catch (const Error& e) {
      entry["certificate"] = detail::failed_check(e);
      ok = false;
    }

    try {
      const EigenReport eig = compare_spectra(sys, fiedler_pencil(ms, sigma), cfg.tol_spectral);
      entry["spectra"] = {{"passed", eig.passed()},
                          {"pencil_count", eig.pencil_eigs.size()},
                          {"oracle_count", eig.oracle_eigs.size()},
                          {"max_relative_distance", eig.max_relative_distance}};
      ok = ok && eig.passed();
    } catch (const Error& e) {
      entry["spectra"] = detail::failed_check(e);
      ok = false;
    }
    entry["passed"] = ok;
    all = all && ok;
    per_sigma.push_back(std::move(entry));
  }

  Outcome out;
  out.passed = all;
  out.report = {{"command", "verify"},
                {"layout", to_json(ms.layout)},
                {"config", config_json(cfg)},
                {"checks", global},
                {"sigmas", per_sigma},
                {"all_passed", all}};
  return out;
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

/// Spectral comparison plus eigenvector recovery at every simple eigenvalue:
/// directly for the first companion form, through the certificate otherwise.
inline Outcome run_spectra(const SystemMatrix& sys, const Bijection& sigma, const RunConfig& cfg) {
  const FiedlerMatrixSet ms = build_MM(sys, {cfg.inject_typo});
  const BlockPencil pencil = fiedler_pencil(ms, sigma);
  const EigenReport eig = compare_spectra(sys, pencil, cfg.tol_spectral);
  const bool first_form = sigma == Bijection::descending(sigma.degree());

  std::optional<EquivalenceCertificate> cert;
  std::string cert_error;
  if (!first_form) {
    CertifyOptions copt;
    copt.tol = structural_tolerance(cfg);
    copt.samples = cfg.samples;
    copt.seed = cfg.seed;
    copt.build.corrupt_c_sign = cfg.inject_typo;
    try {
      cert = certify(sys, sigma, copt);
    } catch (const Error& e) {
      cert_error = e.what();
    }
  }

  bool vectors_ok = first_form || cert.has_value();
  json vectors = json::array();
  if (first_form || cert) {
    const Spectrum finite = pencil_eigenvalues(pencil);
    for (Complex lambda : finite.eigenvalues) {
      const Complex refined = refine_eigenvalue(pencil, lambda);
      const NullVector nv = null_vector(pencil(refined));
      if (!nv.simple()) {
        vectors.push_back({{"lambda0", to_json(refined)}, {"skipped", "not simple"}});
        continue;
      }
      try {
        const RecoveredEigenvector r =
            first_form ? recover_eigenvector(sys, refined, nv.vector) : recover_eigenvector(sys, *cert, refined, nv.vector);
        json entry = to_json(r);
        const bool ok = r.residual_S <= cfg.tol_residual;
        entry["passed"] = ok;
        vectors_ok = vectors_ok && ok;
        vectors.push_back(std::move(entry));
      } catch (const PoleAtEigenvalue&) {
        vectors.push_back({{"lambda0", to_json(refined)}, {"skipped", "pole of R"}});
      }
    }
  }

  Outcome out;
  out.passed = eig.passed() && vectors_ok;
  out.report = {{"command", "spectra"},
                {"layout", to_json(ms.layout)},
                {"config", config_json(cfg)},
                {"sigma", sigma.images()},
                {"recovery", first_form ? "first companion form" : "certificate"},
                {"spectra", to_json(eig)},
                {"eigenvectors", vectors}};
  if (!cert_error.empty()) out.report["certificate_error"] = cert_error;
  out.report["passed"] = out.passed;
  return out;
}

}  // namespace rosenfied
