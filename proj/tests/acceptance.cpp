// Acceptance run: one PASS/FAIL line per criterion. Each criterion drives the
// CLI end to end and reads the JSON report; a few add direct library checks
// as independent oracles. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "incl/cli.hpp"
#include "incl/degree.hpp"
#include "incl/planar.hpp"
#include "incl/report.hpp"

using namespace incl;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
  double seconds = 0.0;
  Json report;
};

std::map<std::string, std::string> first_outputs;

Outcome run(const std::string& line) {
  std::vector<std::string> args{"incl-verify"};
  std::istringstream in(line);
  for (std::string a; in >> a;) args.push_back(a);
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  o.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.out = out.str();
  o.err = err.str();
  try {
    o.report = Json::parse(o.out);
  } catch (const std::exception&) {
    o.report = Json::object();
  }
  first_outputs.emplace(line, o.out);
  return o;
}

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!why_.empty()) why_ += "; ";
      why_ += what;
    }
  }

  // Every named record exists and passed.
  void records(const Outcome& o, const std::string& cmd, const std::vector<std::string>& names) {
    require(o.code == kExitPass, cmd + " exited " + std::to_string(o.code) + " " + o.err);
    for (const auto& n : names) {
      const Json* r = find(o, n);
      if (!r) {
        require(false, cmd + ": missing " + n);
      } else {
        require((*r)["status"] == "pass", cmd + ": " + n + " is " + (*r)["status"].get<std::string>());
      }
    }
  }

  static const Json* find(const Outcome& o, const std::string& name) {
    if (!o.report.contains("records")) return nullptr;
    for (const auto& r : o.report["records"])
      if (r["name"] == name) return &r;
    return nullptr;
  }

  bool finish() const {
    std::printf("%s  %s%s%s\n", pass_ ? "PASS" : "FAIL", title_.c_str(), pass_ ? "" : "  -- ", why_.c_str());
    std::fflush(stdout);
    return pass_;
  }

 private:
  std::string title_;
  bool pass_ = true;
  std::string why_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool equivalence_suite() {
  Criterion c("1 equivalence suite: 1e5 triples, zero disagreements, runtime < 60 s");
  const std::string cmd = "verify dcom --samples 100000 --seed 7";
  const Outcome o = run(cmd);
  c.records(o, cmd, {"dcom.sector_vs_closed_form", "dcom.sector_vs_membership", "dcom.sector_vs_sweep"});
  for (const char* n : {"dcom.sector_vs_closed_form", "dcom.sector_vs_membership", "dcom.sector_vs_sweep"}) {
    if (const Json* r = Criterion::find(o, n)) {
      c.require((*r)["details"]["disagreements"] == 0, std::string(n) + " disagreements");
      c.require((*r)["details"]["compared"].get<long>() >= 90000, std::string(n) + " compared too few");
    }
  }
  c.require(o.report["tolerances"]["dcom_band"] == 1e-6, "band is not 1e-6");
  c.require(o.seconds < 60.0, "runtime " + fmt(o.seconds) + " s");
  return c.finish();
}

bool shift_bounds() {
  Criterion c("2 shift bounds: n = 2, 3 at 1e4 matrices, slack >= -1e-9, det > 0, runtime < 120 s");
  double total = 0.0;
  for (int n : {2, 3}) {
    const std::string cmd = "verify shift-bounds --n " + std::to_string(n) + " --samples 10000";
    const Outcome o = run(cmd);
    total += o.seconds;
    c.records(o, cmd,
              {"shift_bounds.outer_distortion", "shift_bounds.inverse_norm", "shift_bounds.sandwich",
               "shift_bounds.det_positive"});
    for (const char* n : {"shift_bounds.outer_distortion", "shift_bounds.inverse_norm", "shift_bounds.sandwich"}) {
      if (const Json* r = Criterion::find(o, n)) {
        c.require((*r)["slack"].is_number() && (*r)["slack"].get<double>() >= -1e-9, std::string(n) + " slack");
        c.require((*r)["details"]["matrices"] == 10000, std::string(n) + " matrix count");
        c.require((*r)["details"]["lambdas"].size() == 5, std::string(n) + " lambda grid");
      }
    }
    if (const Json* r = Criterion::find(o, "shift_bounds.det_positive"))
      c.require((*r)["details"]["disagreements"] == 0, "det positivity below 100%");
  }
  c.require(total < 120.0, "runtime " + fmt(total) + " s");
  return c.finish();
}

bool sharpness() {
  Criterion c("3 sharpness constants: tau exact to 1e-12, crossing at tau_K within one grid step");
  const std::string cmd = "sweep-tau";
  const Outcome o = run(cmd);
  c.records(o, cmd,
            {"sweep_tau.exact_values", "sweep_tau.crossing_K1.5", "sweep_tau.crossing_K2.25", "sweep_tau.crossing_K4",
             "sweep_tau.crossing_K10"});
  // Direct oracle.
  c.require(std::abs(tau_for_K(1.0) - 1.0) <= 1e-12, "tau(1)");
  c.require(std::abs(tau_for_K(4.0) - 0.8) <= 1e-12, "tau(4)");
  for (double K : {1.5, 2.25, 4.0, 10.0}) {
    const double k = k_from_K(K), tK = tau_for_K(K), step = 1.0 / 199.0;
    int changes = 0;
    double left = 0.0, right = 0.0;
    bool prev = corollary_delta(0.0, k) > -1.0;
    for (int i = 1; i < 200; ++i) {
      const double t = i * step;
      const bool above = corollary_delta(t, k) > -1.0;
      if (above != prev) ++changes, left = t - step, right = t;
      prev = above;
    }
    c.require(changes == 1 && left < tK && tK <= right, "crossing for K = " + fmt(K));
  }
  return c.finish();
}

bool case1() {
  Criterion c("4 fold map k = 0.6: identities at 1e5 points, evenness, winding 2, collision, runtime < 30 s");
  const std::string cmd = "example case1 --k 0.6 --samples 100000";
  const Outcome o = run(cmd);
  c.records(o, cmd,
            {"case1.beltrami_identity", "case1.re_fz_lower_bound", "case1.evenness", "case1.winding_r0.5",
             "case1.winding_r0.05", "case1.collision_z_minus_z"});
  if (const Json* r = Criterion::find(o, "case1.beltrami_identity")) {
    const Json& f = (*r)["details"]["field"];
    c.require(f["points"].get<long>() - f["excluded"].get<long>() >= 100000, "fewer than 1e5 points");
  }
  c.require(o.report["tolerances"]["fold_identity"] == 1e-12, "identity tolerance");
  c.require(o.report["tolerances"]["inequality"] == 1e-9, "inequality tolerance");
  c.require(o.seconds < 30.0, "runtime " + fmt(o.seconds) + " s");
  return c.finish();
}

bool case2() {
  Criterion c("5 sector map eps in {0.25, 0.5, 0.9}: continuity, k bound, real part bound, index 2");
  for (const char* eps : {"0.25", "0.5", "0.9"}) {
    const std::string cmd = std::string("example case2 --eps ") + eps;
    c.records(run(cmd), cmd,
              {"case2.interface_clause_agreement", "case2.quasiregular", "case2.re_fz_lower_bound",
               "case2.index_origin"});
  }
  return c.finish();
}

bool ball() {
  Criterion c("6 ball map n = 2, 3, eps = 0.4: Jacobian, margin floor at 1e4 points, integrability, collisions");
  for (int n : {2, 3}) {
    const std::string cmd = "example ball --n " + std::to_string(n) + " --eps 0.4 --samples 10000";
    const Outcome o = run(cmd);
    c.records(o, cmd,
              {"ball.jacobian_closed_form", "ball.derivatives_vs_finite_differences", "ball.margin_floor",
               "ball.integrability_subcritical", "ball.integrability_critical", "ball.axis_collision",
               "ball.collision_search"});
    if (const Json* r = Criterion::find(o, "ball.margin_floor")) {
      const Json& f = (*r)["details"]["field"];
      c.require(f["points"].get<long>() - f["excluded"].get<long>() >= 10000, "fewer than 1e4 points");
      c.require(f["min_margin"].is_number() && f["min_margin"].get<double>() >= -0.4 - 1e-6, "margin floor");
    }
    if (const Json* r = Criterion::find(o, "ball.integrability_subcritical")) {
      const Json& d = (*r)["details"];
      c.require(std::abs(d["q"].get<double>() - (n - 1.5)) < 1e-15, "subcritical q");
      c.require(d["last_h"] == std::ldexp(1.0, -20), "last cutoff");
      c.require(d["last_increment"].get<double>() < 1e-3, "last increment");
    }
  }
  // Direct oracle for the critical table.
  for (int n : {2, 3}) {
    for (const auto& row : radial_integrability(n, n - 1.0, dyadic_cutoffs(20)))
      c.require(std::abs(row.increment - std::log(2.0)) <= 1e-12, "log 2 increment");
  }
  return c.finish();
}

bool power() {
  Criterion c("7 z^(5/2): ratio negative inside (2pi/5, pi/2), positive below, sign change within one step");
  const std::string cmd = "example power52";
  c.records(run(cmd), cmd,
            {"power52.ratio_negative_inside", "power52.ratio_positive_below", "power52.sign_change_localized"});
  // Direct oracle on the pair (e^{i theta}, e^{-i theta}).
  const auto f = power_half_plane();
  const double t0 = 2.0 * std::numbers::pi / 5.0, half = std::numbers::pi / 2.0;
  auto ratio = [&](double th) {
    const Point a{std::cos(th), std::sin(th)}, b{std::cos(th), -std::sin(th)};
    return monotonicity_check(*f, a, b, 0.0).ratio;
  };
  for (int i = 1; i <= 100; ++i) {
    const double th = t0 + (half - t0) * i / 101.0;
    c.require(ratio(th) < 0.0, "ratio not negative at " + fmt(th));
  }
  for (int i = 0; i < 100; ++i) {
    const double th = 0.1 + (t0 - 0.01 - 0.1) * i / 99.0;
    c.require(ratio(th) > 0.0, "ratio not positive at " + fmt(th));
  }
  return c.finish();
}

bool regularization() {
  Criterion c("8 regularized fold map: liminf bounds for lambda = 0.1, 1; winding 2 at lambda = 0, 1 at lambda = 10");
  const std::string cmd = "example case1 --k 0.6 --samples 100000";
  const Outcome o = run(cmd);
  c.records(o, cmd,
            {"case1.liminf_lambda_0.1", "case1.liminf_lambda_1", "case1.winding_lambda_0", "case1.winding_lambda_10"});
  for (const char* n : {"case1.liminf_lambda_0.1", "case1.liminf_lambda_1"}) {
    if (const Json* r = Criterion::find(o, n)) {
      const Json& d = (*r)["details"];
      const double lambda = d["lambda"].get<double>(), floor = d["margin_floor"].get<double>();
      const double bound = lambda * std::sqrt(1.0 - std::pow(std::min(floor, 0.0), 2)) / 2.0 - 1e-6;
      std::vector<double> radii;
      for (const auto& row : d["rows"]) {
        radii.push_back(row["r"].get<double>());
        c.require(row["min_ratio"].get<double>() >= bound, std::string(n) + " ratio below bound");
      }
      c.require(radii == std::vector<double>{0.1, 0.01, 0.001}, std::string(n) + " radii");
    }
  }
  if (const Json* r = Criterion::find(o, "case1.winding_lambda_0")) c.require((*r)["details"]["winding"] == 2, "w0");
  if (const Json* r = Criterion::find(o, "case1.winding_lambda_10")) c.require((*r)["details"]["winding"] == 1, "w10");
  return c.finish();
}

bool determinism() {
  Criterion c("9 determinism: every command rerun gives byte-identical JSON");
  const auto firsts = first_outputs;
  for (const auto& [cmd, text] : firsts) {
    c.require(!text.empty(), cmd + " produced nothing");
    c.require(run(cmd).out == text, cmd + " differs on rerun");
  }
  for (const char* cmd : {"verify revtri --samples 2000", "verify courant-fischer --samples 500",
                          "verify cone-nesting --n 3 --samples 500", "analyze-matrix --matrix [[1,2],[-1,3]] --certify"}) {
    const std::string a = run(cmd).out, b = run(cmd).out;
    c.require(!a.empty() && a == b, std::string(cmd) + " differs on rerun");
  }
  return c.finish();
}

}  // namespace

int main() {
  // Reports depend on the seed only through the command line here.
  unsetenv("INCL_VERIFY_SEED");
  bool ok = true;
  ok &= equivalence_suite();
  ok &= shift_bounds();
  ok &= sharpness();
  ok &= case1();
  ok &= case2();
  ok &= ball();
  ok &= power();
  ok &= regularization();
  ok &= determinism();
  std::printf("%s\n", ok ? "all criteria PASS" : "some criteria FAIL");
  return ok ? 0 : 1;
}
