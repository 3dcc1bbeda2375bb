#pragma once

#include "app/config.hpp"
#include "app/report.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hypdyn {

enum class ParamType { integer, number, string, boolean };

const char* param_type_name(ParamType t);

struct ParamSpec {
  std::string name;
  ParamType type;
  std::string fallback;  // text form of the default
  std::string help;
};

// Resolved parameters: every declared name has a value.
class Params {
 public:
  Params(const std::vector<ParamSpec>& specs, const ConfigNode* given);
  std::int64_t integer(const std::string& name) const;
  double number(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  bool boolean(const std::string& name) const;
  bool given(const std::string& name) const;
  Json to_json() const;

 private:
  const ParamSpec& spec(const std::string& name) const;
  const std::vector<ParamSpec>* specs_;
  std::vector<std::string> values_;
  std::vector<bool> given_;
};

struct RunInput {
  const Params& params;
  std::optional<OperatorModel> op;  // from the `operator` block
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct ExperimentOutput {
  std::vector<Check> checks;
  Json results = Json::object();
  Table table;
};

struct ExperimentSpec {
  std::string name;
  std::string summary;
  bool stochastic = false;  // a seed is mandatory
  bool takes_operator = false;
  std::vector<ParamSpec> params;
  std::function<ExperimentOutput(const RunInput&)> run;
};

const std::vector<ExperimentSpec>& experiments();
const ExperimentSpec* find_experiment(const std::string& name);

struct RunResult {
  Json report;
  std::string json_text;
  std::string csv_text;
  bool pass = false;
};

// Validates `config` (top level: experiment, seed, params { }, operator { },
// output { }) and runs it. Config problems throw Error(config); the report
// never depends on `jobs`.
RunResult run_experiment(const ConfigNode& config, unsigned jobs);

}  // namespace hypdyn
