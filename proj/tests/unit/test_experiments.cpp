#include "app/experiments.hpp"

#include <gtest/gtest.h>

#include <map>

namespace hypdyn {
namespace {

// Small instances so every experiment runs in well under a second.
const std::map<std::string, std::string> kSmall = {
    {"orbit-coverage", "n = 3000\nnet = 100\nepsilon = 0.05\n"},
    {"coupled-orbit", "n = 3000\nnet = 60\nepsilon = 0.1\nmin_fraction = 0.8\n"},
    {"torus-closure", "tuples = 20\nrotation_n = 2000\nrotation_epsilon = 0.01\nrotation_net = 200\n"},
    {"winding-props", "seeds = 50\n"},
    {"lemma-map-demo", "m = 8\n"},
    {"sc-criterion", "n = 10,20,30,40,50\n"},
    {"combine-witnesses", "n = 10,20,30,40,50,60\n"},
    {"rplus-classify", ""},
    {"ray-obstruction", "n_max = 60\n"},
    {"su-identities", "instances = 20\nmax_dim = 8\nmax_power = 10\nrange_samples = 50\n"},
    {"krylov", ""},
    {"vandermonde", "tuples = 20\n"},
    {"direct-sum-cyclicity", "instances = 40\n"},
    {"ratio-structure", "instances = 20\nmax_dim = 8\nmax_power = 10\n"},
    {"volterra", "grids = 20,40,80\nm = 60\nn_max = 10\n"},
    {"asymptotics", "grid = 0,1,10,1000\nsweep_max = 10000\nstirling = 1000\n"},
    {"semigroup-ex1", ""},
};

ConfigNode small_config(const std::string& name, std::uint64_t seed = 3) {
  return parse_config("experiment = " + name + "\nseed = " + std::to_string(seed) + "\nparams {\n" +
                      kSmall.at(name) + "}\n");
}

std::string error_of(const std::string& text, ErrorCode code = ErrorCode::config) {
  try {
    run_experiment(parse_config(text, "cfg"), 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error for\n" << text;
  return "";
}

TEST(Experiments, RegistryCoversEveryName) {
  EXPECT_EQ(experiments().size(), kSmall.size());
  for (const auto& e : experiments()) EXPECT_TRUE(kSmall.count(e.name)) << e.name;
  EXPECT_EQ(find_experiment("nope"), nullptr);
}

class EachExperiment : public ::testing::TestWithParam<std::string> {};

TEST_P(EachExperiment, PassesAndValidatesAndIgnoresJobs) {
  const auto c = small_config(GetParam());
  const RunResult one = run_experiment(c, 1);
  EXPECT_TRUE(one.pass) << one.json_text;
  EXPECT_TRUE(validate_report(one.report).empty());
  EXPECT_TRUE(validate_report_text(one.json_text).empty());
  const RunResult four = run_experiment(c, 4);
  EXPECT_EQ(one.json_text, four.json_text);
  EXPECT_EQ(one.csv_text, four.csv_text);
  EXPECT_EQ(one.csv_text.rfind("# hypdyn 0.1.0 " + GetParam() + " seed=3 pass=true\n", 0), 0u);
  // The echoed config reproduces the report.
  auto echo = parse_config(one.report["config"].get<std::string>());
  EXPECT_EQ(run_experiment(echo, 2).json_text, one.json_text);
}

INSTANTIATE_TEST_SUITE_P(All, EachExperiment, ::testing::Values(
    "orbit-coverage", "coupled-orbit", "torus-closure", "winding-props", "lemma-map-demo", "sc-criterion",
    "combine-witnesses", "rplus-classify", "ray-obstruction", "su-identities", "krylov", "vandermonde",
    "direct-sum-cyclicity", "ratio-structure", "volterra", "asymptotics", "semigroup-ex1"),
    [](const auto& info) {
      std::string s = info.param;
      for (char& ch : s)
        if (ch == '-') ch = '_';
      return s;
    });

TEST(Experiments, SeedsChangeStochasticResults) {
  const auto a = run_experiment(small_config("su-identities", 1), 1);
  const auto b = run_experiment(small_config("su-identities", 2), 1);
  EXPECT_NE(a.report["results"].dump(), b.report["results"].dump());
}

TEST(Experiments, ConfigErrors) {
  auto m = error_of("experiment = winding-props\n");
  EXPECT_NE(m.find("seed"), std::string::npos) << m;
  m = error_of("experiment = krylov\nparams {\n  tol = 1\n  bogus = 2\n}\n");
  EXPECT_NE(m.find("line 4"), std::string::npos) << m;
  EXPECT_NE(m.find("params.bogus"), std::string::npos) << m;
  m = error_of("experiment = krylov\nparams {\n  max_powers = many\n}\n");
  EXPECT_NE(m.find("params.max_powers"), std::string::npos) << m;
  m = error_of("experiment = volterra\noperator {\n  kind = volterra\n  grid = 4\n}\n");
  EXPECT_NE(m.find("does not take an operator"), std::string::npos) << m;
  m = error_of("experiment = krylov\noutput {\n  format = xml\n}\n");
  EXPECT_NE(m.find("output.format"), std::string::npos) << m;
  m = error_of("experiment = krylov\nextra = 1\n");
  EXPECT_NE(m.find("extra"), std::string::npos) << m;
  m = error_of("experiment = krylov\nseed = -4\n");
  EXPECT_NE(m.find("seed"), std::string::npos) << m;
  m = error_of("experiment = warp\n", ErrorCode::unknown_experiment);
  EXPECT_NE(m.find("line 1"), std::string::npos) << m;
}

TEST(Experiments, EchoExcludesOutputAndJobs) {
  const auto r = run_experiment(parse_config("experiment = krylov\noperator {\n  kind = volterra\n  grid = 5\n}\noutput {\n  dir = /tmp/x\n  format = csv\n}\n"), 3);
  const std::string echo = r.report["config"];
  EXPECT_EQ(echo.find("output"), std::string::npos);
  EXPECT_EQ(echo.find("jobs"), std::string::npos);
  EXPECT_NE(echo.find("kind = volterra"), std::string::npos);
  EXPECT_EQ(r.report["parameters"]["tol"], 1e-8);
  EXPECT_EQ(r.report["parameters"]["max_powers"], -1);
}

TEST(Experiments, FailingExpectationFailsTheReport) {
  auto r = run_experiment(parse_config("experiment = krylov\nparams {\n  expect = not_cyclic\n}\n"), 1);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(validate_report(r.report).empty());
  r = run_experiment(parse_config("experiment = krylov\nparams {\n  x = 1,0,0,0,0,0\n  expect = not_cyclic\n}\n"), 1);
  EXPECT_TRUE(r.pass) << r.json_text;
  r = run_experiment(parse_config("experiment = sc-criterion\nparams {\n  c = 0.5\n  n = 10,20,30,40,50\n  expect = fail\n}\n"), 1);
  EXPECT_TRUE(r.pass) << r.json_text;
  r = run_experiment(parse_config("experiment = sc-criterion\nparams {\n  c = 0.5\n  n = 10,20,30,40,50\n}\n"), 1);
  EXPECT_FALSE(r.pass);
}

TEST(Experiments, AsymptoticsAnchors) {
  const auto r = run_experiment(parse_config("experiment = asymptotics\nparams {\n  n = 0\n  sweep = false\n}\n"), 1);
  ASSERT_TRUE(r.pass) << r.json_text;
  const auto& row = r.report["results"]["rows"][0];
  EXPECT_EQ(row["n"], 0);
  EXPECT_EQ(row["A"]["log_abs"], 0.0);  // A_0 = 1
  EXPECT_EQ(row["B"]["log_abs"], -2.0);  // B_0 = e^-2
}

TEST(Experiments, RplusSingleCase) {
  auto r = run_experiment(parse_config("experiment = rplus-classify\nparams {\n  z = -1\n  expect = not_rplus\n}\n"), 1);
  EXPECT_TRUE(r.pass) << r.json_text;
  r = run_experiment(parse_config("experiment = rplus-classify\nparams {\n  z = 0.6+0.8i\n  expect = rplus_supercyclic\n}\n"), 1);
  EXPECT_TRUE(r.pass) << r.json_text;
}

}  // namespace
}  // namespace hypdyn
