#pragma once

// Machine-readable check reports shared by the suites and the CLI.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace incl {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolName = "incl-verify";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kReportSchema = 1;

enum class Status { Pass, Fail, Inconclusive };

std::string_view to_string(Status s) noexcept;

/// Fixed table of anchor keys to the formula each check exercises. Every
/// record's `paper_anchor` is one of these values.
const std::map<std::string, std::string>& anchor_table();

/// Throws BadParam for an unknown key.
const std::string& anchor(std::string_view key);

/// Default tolerances, overridable by name and echoed into every report.
class Tolerances {
 public:
  Tolerances();

  double get(std::string_view name) const;
  /// Throws BadParam for unknown names or non-positive values.
  void set(std::string_view name, double value);
  std::vector<std::string> names() const;
  Json to_json() const;

 private:
  std::vector<std::pair<std::string, double>> values_;
};

struct RunConfig {
  std::string command;  ///< analyze-matrix, verify, example, sweep-tau
  std::string target;   ///< lemma or example id; empty otherwise
  std::uint64_t seed = 1;
  std::optional<long> samples;
  std::optional<int> n;
  std::optional<double> delta;
  std::optional<double> k;
  std::optional<double> K;
  std::optional<double> eps;
  std::optional<double> lambda;
  bool certify = false;
  std::string format = "json";
  Tolerances tolerances;

  Json to_json() const;
};

/// One check. `slack` is positive when satisfied with room to spare and
/// negative when violated; for counting checks it is minus the number of
/// violations.
struct CheckRecord {
  std::string name;
  std::string paper_anchor;
  Status status = Status::Pass;
  double slack = 0.0;
  Json counterexample;  ///< null when there is none
  Json details = Json::object();
};

CheckRecord make_record(std::string name, std::string_view anchor_key, bool pass, double slack);

struct Report {
  RunConfig config;
  std::vector<CheckRecord> records;
  Json tables = Json::object();
  std::optional<double> wall_seconds;  ///< only reported when requested

  void add(CheckRecord r) { records.push_back(std::move(r)); }
  bool any_fail() const;
  /// 0 iff no record failed.
  int exit_code() const { return any_fail() ? 1 : 0; }
  /// Records sorted by name.
  Json to_json() const;
};

/// Pretty-printed JSON followed by a newline.
void write_report_json(std::ostream& out, const Report& report);
/// `name,status,slack,paper_anchor` per record.
void write_report_csv(std::ostream& out, const Report& report);

/// JSON has no infinities or NaN; they are encoded as "inf", "-inf", "nan".
Json json_number(double v);
Json to_json(std::span<const double> v);

}  // namespace incl
