#include <gtest/gtest.h>

#include <cmath>
#include <regex>
#include <sstream>

#include "incl/error.hpp"
#include "incl/report.hpp"

using namespace incl;

TEST(Anchors, TableIsNonEmptyAndFormulaOnly) {
  const auto& t = anchor_table();
  ASSERT_GT(t.size(), 20u);
  // Anchors quote formulas; they never cite numbered statements.
  const std::regex numbered(R"((Lemma|Theorem|Corollary|Section|Eq\.|Example|Proposition)\s*\(?\d)",
                            std::regex::icase);
  for (const auto& [key, text] : t) {
    EXPECT_FALSE(text.empty()) << key;
    EXPECT_FALSE(std::regex_search(text, numbered)) << key << ": " << text;
    EXPECT_EQ(&anchor(key), &text);
  }
  EXPECT_THROW(anchor("no_such_key"), Error);
}

TEST(Tolerances, GetSetAndErrors) {
  Tolerances t;
  const auto names = t.names();
  ASSERT_FALSE(names.empty());
  for (const auto& n : names) EXPECT_GT(t.get(n), 0.0);
  t.set("collision", 1e-8);
  EXPECT_EQ(t.get("collision"), 1e-8);
  EXPECT_EQ(t.to_json()["collision"].get<double>(), 1e-8);
  EXPECT_THROW(t.get("bogus"), Error);
  EXPECT_THROW(t.set("bogus", 1.0), Error);
  EXPECT_THROW(t.set("collision", 0.0), Error);
  EXPECT_THROW(t.set("collision", -1.0), Error);
  EXPECT_THROW(t.set("collision", INFINITY), Error);
}

TEST(JsonNumbers, NonFiniteValuesAreStrings) {
  EXPECT_EQ(json_number(1.5), Json(1.5));
  EXPECT_EQ(json_number(INFINITY), Json("inf"));
  EXPECT_EQ(json_number(-INFINITY), Json("-inf"));
  EXPECT_EQ(json_number(NAN), Json("nan"));
  const std::vector<double> v{1.0, NAN};
  EXPECT_EQ(to_json(v).dump(), R"([1.0,"nan"])");
}

namespace {

Report sample_report() {
  Report r;
  r.config.command = "verify";
  r.config.target = "revtri";
  r.config.seed = 9;
  r.add(make_record("zeta", "cone", true, 0.5));
  auto bad = make_record("alpha, with comma", "reverse_triangle", false, -INFINITY);
  bad.counterexample = Json{{"u", {1, 0}}};
  r.add(bad);
  CheckRecord inc = make_record("mid", "collision", true, 0.0);
  inc.status = Status::Inconclusive;
  r.add(inc);
  return r;
}

}  // namespace

TEST(Report, SchemaOrderAndSorting) {
  const Report r = sample_report();
  const Json j = r.to_json();
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"schema", "tool", "version", "config", "tolerances", "summary",
                                            "records"}));
  EXPECT_EQ(j["schema"], kReportSchema);
  EXPECT_EQ(j["tool"], "incl-verify");
  EXPECT_EQ(j["config"]["seed"], 9);
  EXPECT_TRUE(j["config"]["samples"].is_null());
  EXPECT_EQ(j["summary"]["pass"], 1);
  EXPECT_EQ(j["summary"]["fail"], 1);
  EXPECT_EQ(j["summary"]["inconclusive"], 1);
  ASSERT_EQ(j["records"].size(), 3u);
  EXPECT_EQ(j["records"][0]["name"], "alpha, with comma");
  EXPECT_EQ(j["records"][0]["slack"], "-inf");
  EXPECT_EQ(j["records"][1]["status"], "inconclusive");
  EXPECT_EQ(j["records"][2]["name"], "zeta");
  EXPECT_TRUE(j["records"][2]["counterexample"].is_null());
  for (const auto& rec : j["records"]) {
    std::vector<std::string> rk;
    for (auto it = rec.begin(); it != rec.end(); ++it) rk.push_back(it.key());
    EXPECT_EQ(rk, (std::vector<std::string>{"name", "paper_anchor", "status", "slack", "counterexample", "details"}));
  }
  EXPECT_EQ(r.exit_code(), 1);
  EXPECT_FALSE(j.contains("wall_seconds"));
}

TEST(Report, InconclusiveDoesNotFail) {
  Report r;
  CheckRecord inc = make_record("x", "collision", true, 0.0);
  inc.status = Status::Inconclusive;
  r.add(inc);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Report, WallTimeOnlyWhenSet) {
  Report r = sample_report();
  r.wall_seconds = 1.25;
  EXPECT_EQ(r.to_json()["wall_seconds"], 1.25);
}

TEST(Report, CsvQuotesFieldsWithCommas) {
  std::ostringstream out;
  write_report_csv(out, sample_report());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "name,status,slack,paper_anchor");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("\"alpha, with comma\",fail,\"-inf\",\"|u + v|", 0), 0u) << line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("mid,inconclusive,0.0,", 0), 0u) << line;
}

TEST(Report, JsonTextEndsWithNewlineAndRoundTrips) {
  std::ostringstream out;
  write_report_json(out, sample_report());
  const std::string s = out.str();
  ASSERT_FALSE(s.empty());
  EXPECT_EQ(s.back(), '\n');
  EXPECT_EQ(Json::parse(s), sample_report().to_json());
}
