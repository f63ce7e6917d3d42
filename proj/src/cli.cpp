#include "incl/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "incl/suites.hpp"

namespace incl {

namespace {

struct Options {
  RunConfig config;
  std::string out_path;
  std::vector<std::string> tol_overrides;
  bool timing = false;
  bool seed_given = false;
  std::string matrix_text;
  std::string matrix_file;
  std::string field_csv, field_jsonl, integrability_csv, liminf_csv, tau_csv;
};

// Thrown for problems the user can fix on the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void apply_tolerances(Options& o) {
  for (const std::string& item : o.tol_overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError("--tol value for '" + name + "' is not a number");
    }
    try {
      o.config.tolerances.set(name, value);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
}

void resolve_seed(Options& o) {
  if (o.seed_given) return;
  const char* env = std::getenv("INCL_VERIFY_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') throw UsageError("INCL_VERIFY_SEED is not an unsigned integer");
  o.config.seed = v;
}

SquareMatrix load_matrix(const Options& o) {
  std::string text = o.matrix_text;
  if (!o.matrix_file.empty()) {
    std::ifstream in(o.matrix_file);
    if (!in) throw UsageError("cannot read " + o.matrix_file);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (text.empty()) throw UsageError("analyze-matrix needs --matrix or --matrix-file");
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("matrix JSON: ") + e.what());
  }
  try {
    return matrix_from_json(j);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  body(f);
}

void emit(const Options& o, const Report& report, std::ostream& out) {
  auto body = [&](std::ostream& s) {
    if (o.config.format == "csv") {
      write_report_csv(s, report);
    } else {
      write_report_json(s, report);
    }
  };
  if (o.out_path.empty()) {
    body(out);
  } else {
    write_file(o.out_path, body);
  }
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t s) { o.config.seed = s, o.seed_given = true; },
      "RNG seed (default: $INCL_VERIFY_SEED, else 1)");
  cmd->add_option("--samples", o.config.samples, "Sample count")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out_path, "Write the report here instead of stdout");
  cmd->add_option("--format", o.config.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->default_str("json");
  cmd->add_option("--tol", o.tol_overrides, "Tolerance override name=value (repeatable)");
  cmd->add_flag("--timing", o.timing, "Include wall time in the report (breaks byte-identity)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Numerical checks for differential inclusions in matrix cones", "incl-verify"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze-matrix", "Spectrum, distortions, margin and cone verdict of a matrix");
  add_common(analyze, o);
  analyze->add_option("--matrix", o.matrix_text, "Row-major JSON, e.g. [[1,0],[0,1]]");
  analyze->add_option("--matrix-file", o.matrix_file, "File holding the matrix JSON");
  analyze->add_option("--delta", o.config.delta, "Cone parameter in [-1, 1] (default 0)");
  analyze->add_option("--K", o.config.K, "Distortion cap K >= 1");
  analyze->add_flag("--certify", o.config.certify, "Certified margin with a rigorous error bound");

  std::string lemma;
  auto* verify = app.add_subcommand("verify", "Seeded property suite for one lemma");
  add_common(verify, o);
  verify->add_option("lemma", lemma, "Lemma id")->required()->check(CLI::IsMember(lemma_ids()));
  verify->add_option("--n", o.config.n, "Dimension 2..6");

  std::string example;
  auto* ex = app.add_subcommand("example", "Full claim set of one example mapping");
  add_common(ex, o);
  ex->add_option("id", example, "Example id")->required()->check(CLI::IsMember(example_ids()));
  ex->add_option("--n", o.config.n, "Dimension (ball)");
  ex->add_option("--k", o.config.k, "Dilatation (case1)");
  ex->add_option("--eps", o.config.eps, "Parameter (case2, ball)");
  ex->add_option("--lambda", o.config.lambda, "Regularization weight for the liminf table (case1)");
  ex->add_option("--field-csv", o.field_csv, "Dump the sampled field as CSV");
  ex->add_option("--field-jsonl", o.field_jsonl, "Dump the sampled field as JSON lines");
  ex->add_option("--integrability-csv", o.integrability_csv, "Dump the critical integrability table (ball)");
  ex->add_option("--liminf-csv", o.liminf_csv, "Dump the liminf table (case1, ball)");

  auto* sweep = app.add_subcommand("sweep-tau", "Threshold table of the corollary delta over tau");
  add_common(sweep, o);
  sweep->add_option("--K", o.config.K, "Single K (default: 1.5, 2.25, 4, 10)");
  sweep->add_option("--tau-csv", o.tau_csv, "Dump the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    resolve_seed(o);
    apply_tolerances(o);
    const auto start = std::chrono::steady_clock::now();
    Report report;
    if (analyze->parsed()) {
      o.config.command = "analyze-matrix";
      const SquareMatrix a = load_matrix(o);
      report = run_analyze_matrix(o.config, a);
    } else if (verify->parsed()) {
      o.config.command = "verify";
      o.config.target = lemma;
      report = run_verify(o.config);
    } else if (ex->parsed()) {
      o.config.command = "example";
      o.config.target = example;
      ExampleRun run = run_example(o.config);
      if (!o.field_csv.empty()) write_file(o.field_csv, [&](std::ostream& s) { write_field_csv(s, run.field); });
      if (!o.field_jsonl.empty()) write_file(o.field_jsonl, [&](std::ostream& s) { write_field_jsonl(s, run.field); });
      if (!o.integrability_csv.empty()) {
        if (run.integrability.empty()) throw UsageError("example " + example + " has no integrability table");
        write_file(o.integrability_csv, [&](std::ostream& s) { write_integrability_csv(s, run.integrability); });
      }
      if (!o.liminf_csv.empty()) {
        if (run.liminf.empty()) throw UsageError("example " + example + " has no liminf table");
        write_file(o.liminf_csv, [&](std::ostream& s) { write_liminf_csv(s, run.liminf); });
      }
      report = std::move(run.report);
    } else {
      o.config.command = "sweep-tau";
      TauSweep s = run_sweep_tau(o.config);
      if (!o.tau_csv.empty()) write_file(o.tau_csv, [&](std::ostream& f) { write_tau_csv(f, s.rows); });
      report = std::move(s.report);
    }
    if (o.timing) {
      report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(o, report, out);
    return report.exit_code();
  } catch (const UsageError& e) {
    err << "incl-verify: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "incl-verify: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace incl
