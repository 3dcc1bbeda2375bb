// hypdyn command line front end. Talks to the library only through the C API.
#include "hypdyn/hypdyn.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct ConfigDeleter {
  void operator()(hypdyn_config* c) const { hypdyn_config_free(c); }
};
struct ReportDeleter {
  void operator()(hypdyn_report* r) const { hypdyn_report_free(r); }
};
using ConfigPtr = std::unique_ptr<hypdyn_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<hypdyn_report, ReportDeleter>;

struct UsageError {
  std::string message;
};

void check(hypdyn_status s, const std::string& what) {
  if (s != HYPDYN_OK) throw UsageError{what + ": " + hypdyn_last_error()};
}

std::optional<std::string> config_value(const hypdyn_config* cfg, const char* path) {
  char* v = nullptr;
  check(hypdyn_config_get(cfg, path, &v), "config");
  if (!v) return std::nullopt;
  std::string s(v);
  hypdyn_string_free(v);
  return s;
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
  unsigned jobs = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "structured-text config file");
  app->add_option("--seed", c.seed, "seed (overrides the config)");
  app->add_option("--out-dir", c.out_dir, "output directory (default: config output.dir, then $HYPDYN_OUT_DIR, then .)");
  app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--jobs", c.jobs, "worker threads; never changes the report")->check(CLI::Range(1u, 1024u));
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError{"cannot write '" + tmp.string() + "'"};
    out << text;
    if (!out) throw UsageError{"cannot write '" + tmp.string() + "'"};
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw UsageError{"cannot move report into place at '" + path.string() + "': " + ec.message()};
}

int run(const std::string& experiment, const Common& c, const std::map<std::string, std::string>& overrides) {
  hypdyn_config* raw = nullptr;
  if (!c.config_path.empty()) check(hypdyn_config_load(c.config_path.c_str(), &raw), "config");
  else check(hypdyn_config_new(&raw), "config");
  ConfigPtr cfg(raw);

  const auto named = config_value(cfg.get(), "experiment");
  if (!experiment.empty()) {
    if (named && *named != experiment)
      throw UsageError{"config names experiment '" + *named + "' but the command is '" + experiment + "'"};
    check(hypdyn_config_set(cfg.get(), "experiment", experiment.c_str()), "config");
  } else if (!named) {
    throw UsageError{"config does not name an experiment"};
  }
  if (c.seed) check(hypdyn_config_set(cfg.get(), "seed", std::to_string(*c.seed).c_str()), "--seed");
  for (const auto& [k, v] : overrides) check(hypdyn_config_set(cfg.get(), ("params." + k).c_str(), v.c_str()), "--" + k);

  std::string format = c.format;
  if (format.empty()) format = config_value(cfg.get(), "output.format").value_or("json");
  std::string dir = c.out_dir;
  if (dir.empty()) dir = config_value(cfg.get(), "output.dir").value_or("");
  if (dir.empty()) {
    const char* env = std::getenv("HYPDYN_OUT_DIR");
    dir = env && *env ? env : ".";
  }

  hypdyn_report* rep_raw = nullptr;
  const hypdyn_status s = hypdyn_run(cfg.get(), c.jobs, &rep_raw);
  if (s != HYPDYN_OK) throw UsageError{std::string(hypdyn_status_name(s)) + ": " + hypdyn_last_error()};
  ReportPtr rep(rep_raw);

  const std::string name = config_value(cfg.get(), "experiment").value();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError{"cannot create output directory '" + dir + "': " + ec.message()};
  const fs::path path = fs::path(dir) / (name + "." + format);
  write_atomically(path, format == "csv" ? hypdyn_report_csv(rep.get()) : hypdyn_report_json(rep.get()));
  const bool pass = hypdyn_report_passed(rep.get()) != 0;
  std::cout << name << ": " << (pass ? "pass" : "FAIL") << " -> " << path.string() << "\n";
  return pass ? kPass : kFail;
}

int validate(const std::vector<std::string>& files) {
  int rc = kPass;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) {
      std::cerr << f << ": cannot read\n";
      rc = kUsage;
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    char* msg = nullptr;
    if (hypdyn_validate_report(ss.str().c_str(), &msg) == HYPDYN_OK) {
      std::cout << f << ": valid\n";
    } else {
      std::cout << f << ": invalid\n" << (msg ? msg : "");
      if (rc == kPass) rc = kFail;
    }
    hypdyn_string_free(msg);
  }
  return rc;
}

std::string flag_name(const std::string& param) {
  std::string s = param;
  for (auto& ch : s)
    if (ch == '_') ch = '-';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypdyn: desk-scale experiments in linear dynamics"};
  app.set_version_flag("--version", std::string("hypdyn ") + hypdyn_version());
  app.require_subcommand(1);

  Common common;
  std::map<std::string, std::string> overrides;

  auto* run_cmd = app.add_subcommand("run", "run the experiment named in --config");
  add_common(run_cmd, common);

  std::vector<std::string> files;
  auto* val = app.add_subcommand("validate", "check report files against the schema");
  val->add_option("files", files, "report files")->required()->check(CLI::ExistingFile);
  auto* schema = app.add_subcommand("schema", "print the report schema");
  auto* list = app.add_subcommand("list", "list experiments and their parameters");

  // One subcommand per experiment, with a flag per parameter.
  std::map<std::string, std::map<std::string, std::string>> raw_params;
  for (size_t i = 0; i < hypdyn_experiment_count(); ++i) {
    const std::string name = hypdyn_experiment_name(i);
    auto* sub = app.add_subcommand(name, hypdyn_experiment_summary(i));
    add_common(sub, common);
    auto& slot = raw_params[name];
    for (size_t k = 0; k < hypdyn_experiment_param_count(i); ++k) {
      const char *pname, *type, *fallback, *help;
      hypdyn_experiment_param(i, k, &pname, &type, &fallback, &help);
      std::string names = "--" + flag_name(pname);
      if (flag_name(pname) != pname) names += std::string(",--") + pname;
      sub->add_option(names, slot[pname], std::string(help) + " [" + type + ", default " +
                                              (*fallback ? fallback : "\"\"") + "]");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (schema->parsed()) {
      std::cout << hypdyn_report_schema() << "\n";
      return kPass;
    }
    if (list->parsed()) {
      for (size_t i = 0; i < hypdyn_experiment_count(); ++i) {
        std::cout << hypdyn_experiment_name(i) << (hypdyn_experiment_stochastic(i) ? " (seeded)" : "") << "  "
                  << hypdyn_experiment_summary(i) << "\n";
        for (size_t k = 0; k < hypdyn_experiment_param_count(i); ++k) {
          const char *pname, *type, *fallback, *help;
          hypdyn_experiment_param(i, k, &pname, &type, &fallback, &help);
          std::cout << "    --" << flag_name(pname) << " <" << type << "> = " << fallback << "  " << help << "\n";
        }
      }
      return kPass;
    }
    if (val->parsed()) return validate(files);
    if (run_cmd->parsed()) {
      if (common.config_path.empty()) throw UsageError{"run needs --config"};
      return run("", common, overrides);
    }
    for (auto* sub : app.get_subcommands()) {
      const std::string name = sub->get_name();
      for (const auto& [k, v] : raw_params[name])
        if (sub->count("--" + flag_name(k)) > 0) overrides[k] = v;
      return run(name, common, overrides);
    }
  } catch (const UsageError& e) {
    std::cerr << "hypdyn: " << e.message << "\n";
    return kUsage;
  }
  return kUsage;
}
