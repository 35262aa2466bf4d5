// rosenfied: build, verify and inspect Fiedler pencils of Rosenbrock systems.
//
// Exit codes: 0 ok, 1 a check failed (report still written), 2 schema
// violation, 3 dimension mismatch, 4 other library error, 5 generation gave
// up, 64 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rosenfied/pipeline.hpp"

namespace {

using namespace rosenfied;

enum Exit : int {
  kOk = 0,
  kCheckFailed = 1,
  kSchema = 2,
  kDimension = 3,
  kLibrary = 4,
  kGiveUp = 5,
  kUsage = 64,
};

struct Args {
  std::string file;
  std::vector<int> sigma;
  bool all_sigma = false;
  int random = 0;
  std::uint64_t seed = 0;
  bool integer = false;
  double tol = 0.0;
  std::string out;
  bool inject_typo = false;
  long long n = 0, m = 0, da = 0, dd = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const json& report, const std::string& path) {
  const std::string text = dump(report);
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open --out path " + path);
  f << text;
}

SystemFile load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return read_system(ss.str());
}

RunConfig make_config(const Args& a, const SystemMatrix* sys) {
  RunConfig cfg;
  cfg.seed = a.seed;
  try {
    cfg.tol_spectral = a.tol > 0.0 ? a.tol : default_tolerance();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  cfg.integer_mode = a.integer || (sys != nullptr && has_integer_entries(*sys));
  cfg.inject_typo = a.inject_typo;
  return cfg;
}

Bijection single_sigma(const Args& a, const SystemFile& sf) {
  const int d = sf.system.max_degree();
  if (!a.sigma.empty()) return read_sigma(json(a.sigma), "--sigma", d);
  if (sf.sigma) return *sf.sigma;
  return Bijection::descending(d);
}

std::vector<Bijection> verify_sigmas(const Args& a, const SystemFile& sf) {
  const int d = sf.system.max_degree();
  if (a.all_sigma) {
    if (d > 5) throw UsageError("--all-sigma is limited to d <= 5 (d = " + std::to_string(d) + "); use --random K");
    return Bijection::all(d);
  }
  if (a.random > 0) return random_bijections(d, a.random, a.seed);
  return {single_sigma(a, sf)};
}

int finish(const Outcome& o, const Args& a) {
  emit(o.report, a.out);
  return o.passed ? kOk : kCheckFailed;
}

int error_report(int code, const std::string& kind, const std::string& message, const std::string& path = "") {
  json err = {{"error", kind}, {"message", message}};
  if (!path.empty()) err["path"] = path;
  std::cout << dump(err);
  std::cerr << "rosenfied: " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fiedler pencils of Rosenbrock system matrices"};
  app.require_subcommand(1);
  Args a;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", a.out, "Write the JSON report to this path instead of stdout");
    sub->add_flag("--inject-typo", a.inject_typo, "Test only: flip the sign of C in system factor 0");
  };
  auto add_sigma = [&](CLI::App* sub) {
    sub->add_option("--sigma", a.sigma, "Bijection as images sigma(0),...,sigma(d-1), e.g. 1,3,2")->delimiter(',');
  };

  CLI::App* build = app.add_subcommand("build", "Dump X, Y, CISS and the corner-structure report of one pencil");
  build->add_option("file", a.file, "System JSON file")->required();
  add_sigma(build);
  add_common(build);

  CLI::App* verify = app.add_subcommand("verify", "Run every check for one or more bijections");
  verify->add_option("file", a.file, "System JSON file")->required();
  add_sigma(verify);
  auto* all_opt = verify->add_flag("--all-sigma", a.all_sigma, "All d! bijections (d <= 5)");
  auto* rnd_opt = verify->add_option("--random", a.random, "K random bijections")->check(CLI::PositiveNumber);
  all_opt->excludes(rnd_opt);
  verify->add_option("--seed", a.seed, "Seed for --random");
  verify->add_option("--tol", a.tol, "Spectral tolerance")->check(CLI::PositiveNumber);
  verify->add_flag("--integer", a.integer, "Exact structural comparisons");
  add_common(verify);

  CLI::App* gen = app.add_subcommand("gen", "Generate a random system");
  gen->add_option("n", a.n, "State dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("m", a.m, "Output dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("dA", a.da, "Degree of A")->required()->check(CLI::PositiveNumber);
  gen->add_option("dD", a.dd, "Degree of D")->required()->check(CLI::PositiveNumber);
  gen->add_flag("--integer", a.integer, "Entries from {-3..3}");
  gen->add_option("--seed", a.seed, "Random seed");
  gen->add_option("--out", a.out, "Write the system to this path instead of stdout");

  CLI::App* spectra = app.add_subcommand("spectra", "Compare pencil eigenvalues with the invariant zeros");
  spectra->add_option("file", a.file, "System JSON file")->required();
  add_sigma(spectra);
  spectra->add_option("--tol", a.tol, "Spectral tolerance")->check(CLI::PositiveNumber);
  add_common(spectra);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed()) {
      GenParams p{.n = a.n, .m = a.m, .degree_a = static_cast<int>(a.da), .degree_d = static_cast<int>(a.dd), .integer = a.integer, .seed = a.seed};
      emit(to_json(generate_system(p)), a.out);
      return kOk;
    }
    const SystemFile sf = load(a.file);
    const RunConfig cfg = make_config(a, &sf.system);
    if (build->parsed()) return finish(run_build(sf.system, single_sigma(a, sf), cfg), a);
    if (verify->parsed()) return finish(run_verify(sf.system, verify_sigmas(a, sf), cfg), a);
    return finish(run_spectra(sf.system, single_sigma(a, sf), cfg), a);
  } catch (const UsageError& e) {
    return error_report(kUsage, "usage", e.what());
  } catch (const SchemaError& e) {
    return error_report(kSchema, "schema", e.what(), e.path());
  } catch (const DimensionMismatch& e) {
    return error_report(kDimension, "dimension", e.what());
  } catch (const GiveUp& e) {
    return error_report(kGiveUp, "give-up", e.what());
  } catch (const Error& e) {
    return error_report(kLibrary, "library", e.what());
  }
}
