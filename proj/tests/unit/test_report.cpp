#include "app/experiments.hpp"
#include "app/report.hpp"

#include <gtest/gtest.h>

namespace hypdyn {
namespace {

std::string krylov_report() {
  auto c = parse_config("experiment = krylov\n");
  return run_experiment(c, 1).json_text;
}

TEST(Schema, IsJson) {
  const auto s = Json::parse(report_schema_text());
  EXPECT_EQ(s["properties"]["schema_version"]["const"], kSchemaVersion);
  EXPECT_EQ(s["properties"]["experiment"]["enum"].size(), experiments().size());
  for (const auto& e : experiments()) {
    bool listed = false;
    for (const auto& n : s["properties"]["experiment"]["enum"]) listed = listed || n == e.name;
    EXPECT_TRUE(listed) << e.name;
  }
}

TEST(Schema, FreshReportIsValid) { EXPECT_TRUE(validate_report_text(krylov_report()).empty()); }

TEST(Schema, TruncatedReportPointsIntoTheDocument) {
  const std::string text = krylov_report();
  const auto cut = text.find("\"checks\"");
  ASSERT_NE(cut, std::string::npos);
  const auto issues = validate_report_text(text.substr(0, cut + 30));
  ASSERT_FALSE(issues.empty());
  EXPECT_EQ(issues.front().pointer.rfind("/checks", 0), 0u) << issues.front().pointer;
}

TEST(Schema, ViolationsCarryPointers) {
  auto doc = Json::parse(krylov_report());
  auto first = [](const Json& d) {
    const auto v = validate_report(d);
    return v.empty() ? std::string("<valid>") : v.front().pointer;
  };
  auto d = doc;
  d["schema_version"] = "0.9";
  EXPECT_EQ(first(d), "/schema_version");
  EXPECT_NE(validate_report(d).front().message.find("version"), std::string::npos);
  d = doc;
  d.erase("seed");
  EXPECT_EQ(first(d), "/seed");
  d = doc;
  d["checks"][0]["pass"] = "yes";
  EXPECT_EQ(first(d), "/checks/0/pass");
  d = doc;
  d["extra"] = 1;
  EXPECT_EQ(first(d), "/extra");
  d = doc;
  d["experiment"] = "nope";
  EXPECT_EQ(first(d), "/experiment");
  d = doc;
  d["seed"] = -1;
  EXPECT_EQ(first(d), "/seed");
  d = doc;
  d["pass"] = !d["pass"].get<bool>();
  EXPECT_EQ(first(d), "/pass");
  d = doc;
  d["artifact"]["na/me"] = 1;
  EXPECT_EQ(first(d), "/artifact/na~1me");
}

TEST(Checks, Relations) {
  EXPECT_TRUE(check_le("a", 1.0, 1.0).pass);
  EXPECT_FALSE(check_lt("a", 1.0, 1.0).pass);
  EXPECT_TRUE(check_ge("a", 2.0, 1.0).pass);
  EXPECT_FALSE(check_le("a", std::nan(""), 1.0).pass);
  EXPECT_TRUE(check_json(check_le("a", std::nan(""), 1.0))["value"].is_null());
  EXPECT_TRUE(check_eq("a", 3, 3).pass);
}

TEST(Table, CsvQuoting) {
  Table t;
  t.header = {"a", "b"};
  t.rows = {{"1,2", "x\"y"}, {"3", "4"}};
  EXPECT_EQ(t.to_csv(), "a,b\n\"1,2\",\"x\"\"y\"\n3,4\n");
}

}  // namespace
}  // namespace hypdyn
