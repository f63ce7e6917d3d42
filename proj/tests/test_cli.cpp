#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "incl/cli.hpp"
#include "incl/report.hpp"

using namespace incl;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "incl-verify");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "incl_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

// Compares against tests/golden/<name>; INCL_UPDATE_GOLDEN=1 rewrites it.
void expect_golden(const std::string& name, const std::string& text) {
  const fs::path p = fs::path(INCL_GOLDEN_DIR) / name;
  const char* update = std::getenv("INCL_UPDATE_GOLDEN");
  if (update && std::string(update) == "1") {
    std::ofstream(p) << text;
    return;
  }
  ASSERT_TRUE(fs::exists(p)) << "missing golden file " << p << " (rerun with INCL_UPDATE_GOLDEN=1)";
  EXPECT_EQ(slurp(p), text) << name;
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value)
      setenv("INCL_VERIFY_SEED", value, 1);
    else
      unsetenv("INCL_VERIFY_SEED");
  }
  ~EnvGuard() { unsetenv("INCL_VERIFY_SEED"); }
};

}  // namespace

TEST(ExitCodes, PassFailUsageDomain) {
  EnvGuard env(nullptr);
  EXPECT_EQ(run({"verify", "revtri", "--samples", "200"}).code, kExitPass);
  EXPECT_EQ(run({"--help"}).code, kExitPass);
  EXPECT_EQ(run({"--version"}).code, kExitPass);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "no-such-lemma"}).code, kExitUsage);
  EXPECT_EQ(run({"example", "nope"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "revtri", "--samples", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "revtri", "--tol", "revtri"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "revtri", "--tol", "bogus=1"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "revtri", "--tol", "revtri=abc"}).code, kExitUsage);
  EXPECT_EQ(run({"analyze-matrix"}).code, kExitUsage);
  EXPECT_EQ(run({"analyze-matrix", "--matrix", "[[1,2],[3"}).code, kExitUsage);
  EXPECT_EQ(run({"analyze-matrix", "--matrix", "[[1,2,3],[4,5,6]]"}).code, kExitUsage);
  EXPECT_EQ(run({"analyze-matrix", "--matrix-file", "/nonexistent/m.json"}).code, kExitUsage);
  // Domain errors: parameters the example cannot take.
  EXPECT_EQ(run({"example", "case1", "--k", "0.9", "--samples", "100"}).code, kExitDomain);
  EXPECT_EQ(run({"example", "case2", "--eps", "1.5", "--samples", "100"}).code, kExitDomain);
  EXPECT_EQ(run({"analyze-matrix", "--matrix", "[[0,1],[1,0]]", "--K", "4"}).code, kExitDomain);
}

TEST(ExitCodes, FailingChecksGiveOne) {
  EnvGuard env(nullptr);
  // A finite-difference step far too coarse makes the derivative check fail.
  const CliRun r = run({"example", "power52", "--samples", "200", "--tol", "fd_step=0.3"});
  EXPECT_EQ(r.code, kExitFail) << r.out << r.err;
  EXPECT_GE(r.json()["summary"]["fail"].get<int>(), 1);
}

TEST(Config, SeedEchoAndEnvironmentFallback) {
  {
    EnvGuard env(nullptr);
    EXPECT_EQ(run({"verify", "revtri", "--samples", "50"}).json()["config"]["seed"], 1);
    EXPECT_EQ(run({"verify", "revtri", "--samples", "50", "--seed", "42"}).json()["config"]["seed"], 42);
  }
  {
    EnvGuard env("77");
    EXPECT_EQ(run({"verify", "revtri", "--samples", "50"}).json()["config"]["seed"], 77);
    EXPECT_EQ(run({"verify", "revtri", "--samples", "50", "--seed", "5"}).json()["config"]["seed"], 5);
  }
  {
    EnvGuard env("x1");
    EXPECT_EQ(run({"verify", "revtri", "--samples", "50"}).code, kExitUsage);
  }
}

TEST(Config, ToleranceOverridesAreEchoed) {
  EnvGuard env(nullptr);
  const Json j = run({"verify", "revtri", "--samples", "50", "--tol", "revtri=1e-9"}).json();
  EXPECT_EQ(j["tolerances"]["revtri"].get<double>(), 1e-9);
  EXPECT_EQ(j["config"]["samples"], 50);
  EXPECT_EQ(j["config"]["target"], "revtri");
}

TEST(Output, CsvFormatAndOutFile) {
  EnvGuard env(nullptr);
  const CliRun csv = run({"verify", "revtri", "--samples", "50", "--format", "csv"});
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "name,status,slack,paper_anchor");
  const fs::path p = scratch("report.json");
  fs::remove(p);
  const CliRun to_file = run({"verify", "revtri", "--samples", "50", "--out", p.string()});
  EXPECT_EQ(to_file.code, 0);
  EXPECT_TRUE(to_file.out.empty());
  EXPECT_EQ(slurp(p), run({"verify", "revtri", "--samples", "50"}).out);
  EXPECT_EQ(run({"verify", "revtri", "--format", "xml"}).code, kExitUsage);
}

TEST(Output, DataDumps) {
  EnvGuard env(nullptr);
  const fs::path field = scratch("field.csv"), integ = scratch("integ.csv"), tau = scratch("tau.csv");
  const CliRun a = run({"example", "ball", "--n", "2", "--samples", "400", "--field-csv", field.string(),
                     "--integrability-csv", integ.string()});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(slurp(field).substr(0, 26), "x,y,f1,f2,region,margin,KO");
  EXPECT_EQ(slurp(integ).substr(0, 13), "h,I,increment");
  const CliRun t = run({"sweep-tau", "--K", "4", "--tau-csv", tau.string()});
  EXPECT_EQ(t.code, 0);
  const std::string text = slurp(tau);
  EXPECT_EQ(text.substr(0, text.find('\n')), "K,tau,delta,above_threshold");
  // case2 has no integrability table.
  EXPECT_EQ(run({"example", "case2", "--samples", "100", "--integrability-csv", integ.string()}).code, kExitUsage);
}

TEST(Determinism, ReRunsAreByteIdentical) {
  EnvGuard env(nullptr);
  const std::vector<std::vector<std::string>> commands{
      {"verify", "dcom", "--samples", "2000", "--seed", "3"},
      {"verify", "shift-bounds", "--n", "3", "--samples", "200"},
      {"example", "case1", "--samples", "2000"},
      {"example", "power52", "--samples", "500"},
      {"sweep-tau"},
      {"analyze-matrix", "--matrix", "[[1,2],[-1,3]]", "--certify"},
  };
  for (const auto& c : commands) {
    const CliRun a = run(c), b = run(c);
    EXPECT_EQ(a.code, 0) << c[0] << ' ' << c[1] << '\n' << a.err;
    EXPECT_EQ(a.out, b.out) << c[0] << ' ' << c[1];
  }
  // Different seeds give different samples.
  EXPECT_NE(run({"verify", "revtri", "--samples", "100", "--seed", "1"}).out,
            run({"verify", "revtri", "--samples", "100", "--seed", "2"}).out);
}

TEST(Golden, SweepTau) {
  EnvGuard env(nullptr);
  expect_golden("sweep_tau_K4.json", run({"sweep-tau", "--K", "4"}).out);
}

TEST(Golden, ReverseTriangle) {
  EnvGuard env(nullptr);
  expect_golden("revtri_seed3.json", run({"verify", "revtri", "--samples", "200", "--seed", "3"}).out);
}

TEST(Golden, AnalyzeRotation) {
  EnvGuard env(nullptr);
  expect_golden("analyze_rotation.csv",
                run({"analyze-matrix", "--matrix", "[[0,-2],[1,0]]", "--delta", "-0.5", "--format", "csv"}).out);
}
