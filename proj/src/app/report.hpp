#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace hypdyn {

using Json = nlohmann::ordered_json;

constexpr const char* kArtifactName = "hypdyn";
constexpr const char* kArtifactVersion = "0.1.0";
constexpr const char* kSchemaVersion = "1.0";

// Finite doubles as numbers, everything else as null.
Json jnum(double v);

struct Check {
  std::string name;
  bool pass = false;
  Json value;
  Json threshold;
  std::string relation;  // "<=", ">=", "==", "<", ">", "is"
};

Check check_le(std::string name, double value, double threshold);
Check check_lt(std::string name, double value, double threshold);
Check check_ge(std::string name, double value, double threshold);
Check check_eq(std::string name, std::int64_t value, std::int64_t expected);
Check check_true(std::string name, bool value);

Json check_json(const Check& c);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

// Published report schema (JSON Schema, draft-07 subset).
const std::string& report_schema_text();

struct SchemaIssue {
  std::string pointer;
  std::string message;
};

// Checks `doc` against the report schema plus the rule that `pass` equals the
// conjunction of the check verdicts. Empty when valid.
std::vector<SchemaIssue> validate_report(const Json& doc);
// Parses first; a parse failure is reported at pointer "" with the byte offset.
std::vector<SchemaIssue> validate_report_text(const std::string& text);

}  // namespace hypdyn
