#include "incl/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "incl/error.hpp"

namespace incl {

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::Inconclusive:
      return "inconclusive";
  }
  return "fail";
}

const std::map<std::string, std::string>& anchor_table() {
  static const std::map<std::string, std::string> table = {
      {"cone", "<A xi, xi> >= delta |A xi| |xi| for all xi"},
      {"distortion", "K_O = sigma_1^n / (sigma_1 ... sigma_n), K_I = (sigma_1 ... sigma_n) / sigma_n^n"},
      {"negative_eigenvalue", "A in M_n(delta) with delta > -1 has no negative real eigenvalue"},
      {"shift_distortion", "K_O(A^lambda) <= C(delta,n) K_O(A), C(delta,n) = (2/sqrt(1-(delta^0)^2))^(n-1)"},
      {"shift_inverse", "||(A^lambda)^-1|| <= 1 / (lambda sqrt(1-(delta^0)^2))"},
      {"shift_sandwich", "sqrt(1-(delta^0)^2) max(sigma_j, lambda) <= sigma_j(A^lambda) <= 2 max(sigma_j, lambda)"},
      {"shift_det", "det(A + lambda I) > 0"},
      {"reverse_triangle", "|u + v| >= sqrt(1-delta^2) max(|u|, |v|) when <u,v> >= delta |u||v|"},
      {"courant_fischer", "sigma_j = min-max of |A xi| (Courant-Fischer)"},
      {"cone_nesting", "M_n(delta_1) subset M_n(delta_2) if delta_1 > delta_2"},
      {"dcom_sector", "|arg f_z| + arcsin |f_zbar / f_z| <= arccos delta"},
      {"dcom_closed_form",
       "|f_zbar| + delta |im f_z| <= sqrt(1-delta^2) re f_z, or |f_zbar| <= |f_z| <= re f_z / sqrt(1-delta^2)"},
      {"dcom_nonnegative", "for delta >= 0 the second alternative can be removed"},
      {"dcom_symmetry", "the sector condition depends only on |arg f_z| and |f_zbar / f_z|"},
      {"tau", "tau_K = 2 sqrt(K) / (K + 1) = sqrt(1 - k^2), K = (1 + k) / (1 - k)"},
      {"corollary", "delta = cos(pi - arccos tau + arcsin k); re f_z >= -tau |f_z| with tau < tau_K"},
      {"beltrami", "|f_zbar| <= k |f_z|, K = (1 + k) / (1 - k)"},
      {"fold_identity", "|f_zbar| = k |f_z| and |re f_z| <= sqrt(1-k^2) |f_z| away from the axes"},
      {"lower_real_part", "re f_z >= -sqrt(1-k^2) |f_z| a.e. in C"},
      {"symmetry", "f(z) = conj(f(conj z)) and f(z) = f(-z)"},
      {"continuity", "the clauses agree on the interfaces"},
      {"degree", "local degree mu(y, f, G)"},
      {"index", "i(x, f) = mu(f(x), f, G); i(x, f) != +-1 on the branch set"},
      {"collision", "N(f, E) = #{f^-1(y) cap E}"},
      {"derivative", "Df agrees with difference quotients off the interfaces"},
      {"jacobian_positive", "J(x, f) > 0 for almost every x"},
      {"ball_cone", "Df in M_n(-eps) off the axis"},
      {"ball_collapse", "f(x) = 0 whenever s(x) = 0 and x_n arbitrary"},
      {"integrability", "int (K_O)^q <= C_n int s^-q < infinity for q < n - 1"},
      {"monotonicity", "<f(a) - f(b), a - b> >= delta |f(a) - f(b)| |a - b|"},
      {"liminf", "liminf |f^lambda(x) - f^lambda(a)| / |x - a| >= lambda sqrt(1-(delta^0)^2) / 2"},
      {"homotopy", "mu(0, f^lambda, B(0,r)) = mu(0, f^Lambda, B(0,r))"},
  };
  return table;
}

const std::string& anchor(std::string_view key) {
  const auto& t = anchor_table();
  const auto it = t.find(std::string(key));
  if (it == t.end()) throw Error(Errc::BadParam, "unknown anchor key: " + std::string(key));
  return it->second;
}

Tolerances::Tolerances()
    : values_{
          {"collision", 1e-10},         {"continuity", 1e-9},         {"courant_fischer", 1e-3},
          {"dcom_band", 1e-6},          {"fd_relative", 1e-4},        {"fd_step", 1e-6},
          {"fold_identity", 1e-12},     {"inequality", 1e-9},         {"interface_exclusion", 1e-3},
          {"liminf", 1e-6},             {"log2_increment", 1e-12},    {"margin_floor", 1e-6},
          {"membership_band", 1e-9},    {"revtri", 1e-12},            {"shift_slack", 1e-9},
          {"subcritical_increment", 1e-3}, {"tau_exact", 1e-12},
      } {}

double Tolerances::get(std::string_view name) const {
  for (const auto& [k, v] : values_)
    if (k == name) return v;
  throw Error(Errc::BadParam, "unknown tolerance: " + std::string(name));
}

void Tolerances::set(std::string_view name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw Error(Errc::BadParam, "tolerances must be positive");
  for (auto& [k, v] : values_) {
    if (k == name) {
      v = value;
      return;
    }
  }
  throw Error(Errc::BadParam, "unknown tolerance: " + std::string(name));
}

std::vector<std::string> Tolerances::names() const {
  std::vector<std::string> out;
  for (const auto& kv : values_) out.push_back(kv.first);
  return out;
}

Json Tolerances::to_json() const {
  Json j = Json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json RunConfig::to_json() const {
  Json j = Json::object();
  j["command"] = command;
  j["target"] = target.empty() ? Json(nullptr) : Json(target);
  j["seed"] = seed;
  j["samples"] = optional_json(samples);
  j["n"] = optional_json(n);
  j["delta"] = optional_json(delta);
  j["k"] = optional_json(k);
  j["K"] = optional_json(K);
  j["eps"] = optional_json(eps);
  j["lambda"] = optional_json(lambda);
  j["certify"] = certify;
  j["format"] = format;
  return j;
}

CheckRecord make_record(std::string name, std::string_view anchor_key, bool pass, double slack) {
  CheckRecord r;
  r.name = std::move(name);
  r.paper_anchor = anchor(anchor_key);
  r.status = pass ? Status::Pass : Status::Fail;
  r.slack = slack;
  return r;
}

bool Report::any_fail() const {
  return std::any_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.status == Status::Fail; });
}

Json Report::to_json() const {
  std::vector<const CheckRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CheckRecord* a, const CheckRecord* b) { return a->name < b->name; });
  Json recs = Json::array();
  long pass = 0, fail = 0, inconclusive = 0;
  for (const CheckRecord* r : sorted) {
    Json j = Json::object();
    j["name"] = r->name;
    j["paper_anchor"] = r->paper_anchor;
    j["status"] = std::string(to_string(r->status));
    j["slack"] = json_number(r->slack);
    j["counterexample"] = r->counterexample;
    j["details"] = r->details;
    recs.push_back(std::move(j));
    (r->status == Status::Pass ? pass : r->status == Status::Fail ? fail : inconclusive) += 1;
  }
  Json j = Json::object();
  j["schema"] = kReportSchema;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["config"] = config.to_json();
  j["tolerances"] = config.tolerances.to_json();
  j["summary"] = Json{{"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}};
  j["records"] = std::move(recs);
  if (!tables.empty()) j["tables"] = tables;
  if (wall_seconds) j["wall_seconds"] = *wall_seconds;
  return j;
}

void write_report_json(std::ostream& out, const Report& report) { out << report.to_json().dump(2) << '\n'; }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

void write_report_csv(std::ostream& out, const Report& report) {
  const Json j = report.to_json();
  out << "name,status,slack,paper_anchor\n";
  for (const auto& r : j["records"]) {
    out << csv_field(r["name"].get<std::string>()) << ',' << r["status"].get<std::string>() << ','
        << r["slack"].dump() << ',' << csv_field(r["paper_anchor"].get<std::string>()) << '\n';
  }
}

Json to_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

}  // namespace incl
