#include "hypdyn/hypdyn.h"

#include "app/config.hpp"
#include "app/experiments.hpp"
#include "app/report.hpp"
#include "core/asymptotics.hpp"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

struct hypdyn_config {
  hypdyn::ConfigNode root;
};

struct hypdyn_report {
  hypdyn::RunResult result;
};

struct hypdyn_operator {
  hypdyn::OperatorModel model;
  std::string description;
};

namespace {

thread_local std::string g_last_error;

hypdyn_status set_error(hypdyn_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
hypdyn_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const hypdyn::Error& e) {
    return set_error(static_cast<hypdyn_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HYPDYN_E_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HYPDYN_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(HYPDYN_E_INTERNAL, "unknown failure");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::vector<std::string> split_path(const char* path) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char* c = path; *c; ++c) {
    if (*c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += *c;
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty()) hypdyn::fail(hypdyn::ErrorCode::config, std::string("bad config path '") + path + "'");
  return parts;
}

hypdyn::CVector read_vec(const double* x, std::size_t n) {
  hypdyn::CVector v(static_cast<hypdyn::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<hypdyn::Index>(i)) = {x[2 * i], x[2 * i + 1]};
  return v;
}

void write_vec(const hypdyn::CVector& v, double* y) {
  for (hypdyn::Index i = 0; i < v.size(); ++i) {
    y[2 * i] = v(i).real();
    y[2 * i + 1] = v(i).imag();
  }
}

}  // namespace

#define HYPDYN_REQUIRE_NONNULL(p) \
  if (!(p)) return set_error(HYPDYN_E_NULL, #p " is NULL")

extern "C" {

const char* hypdyn_version(void) { return hypdyn::kArtifactVersion; }
const char* hypdyn_schema_version(void) { return hypdyn::kSchemaVersion; }

const char* hypdyn_status_name(hypdyn_status s) {
  switch (s) {
    case HYPDYN_OK: return "ok";
    case HYPDYN_E_NULL: return "null_argument";
    case HYPDYN_E_SCHEMA: return "schema_violation";
    case HYPDYN_E_RANGE: return "out_of_range";
    default:
      if (s > HYPDYN_OK && s <= HYPDYN_E_INTERNAL) return hypdyn::error_code_name(static_cast<hypdyn::ErrorCode>(s));
      return "unknown_status";
  }
}

const char* hypdyn_last_error(void) { return g_last_error.c_str(); }
void hypdyn_string_free(char* s) { std::free(s); }

hypdyn_status hypdyn_config_parse(const char* text, const char* source_name, hypdyn_config** out) {
  HYPDYN_REQUIRE_NONNULL(text);
  HYPDYN_REQUIRE_NONNULL(out);
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<hypdyn_config>();
    cfg->root = hypdyn::parse_config(text, source_name ? source_name : "config");
    *out = cfg.release();
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_config_load(const char* path, hypdyn_config** out) {
  HYPDYN_REQUIRE_NONNULL(path);
  HYPDYN_REQUIRE_NONNULL(out);
  *out = nullptr;
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) return set_error(HYPDYN_E_IO, std::string("cannot read config file '") + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    auto cfg = std::make_unique<hypdyn_config>();
    cfg->root = hypdyn::parse_config(ss.str(), path);
    *out = cfg.release();
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_config_new(hypdyn_config** out) {
  HYPDYN_REQUIRE_NONNULL(out);
  return guarded([&] {
    *out = new hypdyn_config();
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_config_set(hypdyn_config* cfg, const char* path, const char* value) {
  HYPDYN_REQUIRE_NONNULL(cfg);
  HYPDYN_REQUIRE_NONNULL(path);
  HYPDYN_REQUIRE_NONNULL(value);
  return guarded([&] {
    const auto parts = split_path(path);
    hypdyn::ConfigNode* node = &cfg->root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &node->ensure_block(parts[i]);
    if (*value == '\0') return set_error(HYPDYN_E_CONFIG, std::string("empty value for '") + path + "'");
    node->set(parts.back(), value);
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_config_get(const hypdyn_config* cfg, const char* path, char** out) {
  HYPDYN_REQUIRE_NONNULL(cfg);
  HYPDYN_REQUIRE_NONNULL(path);
  HYPDYN_REQUIRE_NONNULL(out);
  *out = nullptr;
  return guarded([&] {
    const auto parts = split_path(path);
    const hypdyn::ConfigNode* node = &cfg->root;
    for (std::size_t i = 0; i + 1 < parts.size() && node; ++i) node = node->block(parts[i]);
    if (node)
      if (const auto* e = node->find(parts.back())) *out = dup(e->value);
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_config_serialize(const hypdyn_config* cfg, char** out) {
  HYPDYN_REQUIRE_NONNULL(cfg);
  HYPDYN_REQUIRE_NONNULL(out);
  return guarded([&] {
    *out = dup(hypdyn::serialize_config(cfg->root));
    return HYPDYN_OK;
  });
}

void hypdyn_config_free(hypdyn_config* cfg) { delete cfg; }

size_t hypdyn_experiment_count(void) { return hypdyn::experiments().size(); }

const char* hypdyn_experiment_name(size_t i) {
  return i < hypdyn::experiments().size() ? hypdyn::experiments()[i].name.c_str() : nullptr;
}

const char* hypdyn_experiment_summary(size_t i) {
  return i < hypdyn::experiments().size() ? hypdyn::experiments()[i].summary.c_str() : nullptr;
}

int hypdyn_experiment_stochastic(size_t i) {
  return i < hypdyn::experiments().size() && hypdyn::experiments()[i].stochastic ? 1 : 0;
}

size_t hypdyn_experiment_param_count(size_t i) {
  return i < hypdyn::experiments().size() ? hypdyn::experiments()[i].params.size() : 0;
}

hypdyn_status hypdyn_experiment_param(size_t i, size_t k, const char** name, const char** type, const char** fallback,
                                      const char** help) {
  const auto& reg = hypdyn::experiments();
  if (i >= reg.size() || k >= reg[i].params.size()) return set_error(HYPDYN_E_RANGE, "parameter index out of range");
  const auto& p = reg[i].params[k];
  if (name) *name = p.name.c_str();
  if (type) *type = hypdyn::param_type_name(p.type);
  if (fallback) *fallback = p.fallback.c_str();
  if (help) *help = p.help.c_str();
  return HYPDYN_OK;
}

hypdyn_status hypdyn_run(const hypdyn_config* cfg, unsigned jobs, hypdyn_report** out) {
  HYPDYN_REQUIRE_NONNULL(cfg);
  HYPDYN_REQUIRE_NONNULL(out);
  *out = nullptr;
  return guarded([&] {
    auto rep = std::make_unique<hypdyn_report>();
    rep->result = hypdyn::run_experiment(cfg->root, jobs);
    *out = rep.release();
    return HYPDYN_OK;
  });
}

int hypdyn_report_passed(const hypdyn_report* rep) { return rep && rep->result.pass ? 1 : 0; }
const char* hypdyn_report_json(const hypdyn_report* rep) { return rep ? rep->result.json_text.c_str() : nullptr; }
const char* hypdyn_report_csv(const hypdyn_report* rep) { return rep ? rep->result.csv_text.c_str() : nullptr; }
void hypdyn_report_free(hypdyn_report* rep) { delete rep; }

const char* hypdyn_report_schema(void) { return hypdyn::report_schema_text().c_str(); }

hypdyn_status hypdyn_validate_report(const char* json_text, char** message) {
  HYPDYN_REQUIRE_NONNULL(json_text);
  if (message) *message = nullptr;
  return guarded([&] {
    const auto issues = hypdyn::validate_report_text(json_text);
    if (issues.empty()) return HYPDYN_OK;
    std::string msg;
    for (const auto& i : issues) msg += (i.pointer.empty() ? "(root)" : i.pointer) + ": " + i.message + "\n";
    if (message) *message = dup(msg);
    return set_error(HYPDYN_E_SCHEMA, issues.front().pointer + ": " + issues.front().message);
  });
}

hypdyn_status hypdyn_operator_parse(const char* text, hypdyn_operator** out) {
  HYPDYN_REQUIRE_NONNULL(text);
  HYPDYN_REQUIRE_NONNULL(out);
  *out = nullptr;
  return guarded([&] {
    const auto node = hypdyn::parse_config(text, "operator");
    auto model = hypdyn::operator_from_config(node);
    *out = new hypdyn_operator{model, hypdyn::describe(model)};
    return HYPDYN_OK;
  });
}

size_t hypdyn_operator_dim(const hypdyn_operator* op) { return op ? static_cast<size_t>(op->model.dim()) : 0; }
int hypdyn_operator_is_complex(const hypdyn_operator* op) {
  return op && op->model.field() == hypdyn::Field::complex ? 1 : 0;
}
const char* hypdyn_operator_describe(const hypdyn_operator* op) { return op ? op->description.c_str() : nullptr; }

hypdyn_status hypdyn_operator_apply(const hypdyn_operator* op, const double* x, double* y) {
  HYPDYN_REQUIRE_NONNULL(op);
  HYPDYN_REQUIRE_NONNULL(x);
  HYPDYN_REQUIRE_NONNULL(y);
  return guarded([&] {
    const auto v = read_vec(x, static_cast<std::size_t>(op->model.dim()));
    hypdyn::require(op->model.field() == hypdyn::Field::complex || v.imag().isZero(0.0), hypdyn::ErrorCode::field_mismatch,
                    "complex vector given to a real operator");
    write_vec(hypdyn::apply_raw(op->model, v), y);
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_operator_power(const hypdyn_operator* op, uint64_t n, const double* x, double* unit,
                                    double* lognorm) {
  HYPDYN_REQUIRE_NONNULL(op);
  HYPDYN_REQUIRE_NONNULL(x);
  HYPDYN_REQUIRE_NONNULL(unit);
  HYPDYN_REQUIRE_NONNULL(lognorm);
  return guarded([&] {
    const auto v = read_vec(x, static_cast<std::size_t>(op->model.dim()));
    const bool real = v.imag().isZero(0.0) && op->model.field() == hypdyn::Field::real;
    const auto r = hypdyn::apply_power(op->model, static_cast<hypdyn::Index>(n),
                                       hypdyn::Vector(real ? hypdyn::Field::real : hypdyn::Field::complex, v));
    write_vec(r.unit.coords(), unit);
    *lognorm = r.lognorm;
    return HYPDYN_OK;
  });
}

void hypdyn_operator_free(hypdyn_operator* op) { delete op; }

hypdyn_status hypdyn_log_binomial(int64_t n, int64_t k, double* out) {
  HYPDYN_REQUIRE_NONNULL(out);
  return guarded([&] {
    *out = hypdyn::log_binomial(n, k);
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_a_n(int64_t n, int* sign, double* log_abs) {
  HYPDYN_REQUIRE_NONNULL(sign);
  HYPDYN_REQUIRE_NONNULL(log_abs);
  return guarded([&] {
    const auto v = hypdyn::a_n(n);
    *sign = v.sign();
    *log_abs = v.log_abs();
    return HYPDYN_OK;
  });
}

hypdyn_status hypdyn_b_n(int64_t n, int* sign, double* log_abs) {
  HYPDYN_REQUIRE_NONNULL(sign);
  HYPDYN_REQUIRE_NONNULL(log_abs);
  return guarded([&] {
    const auto v = hypdyn::b_n(n);
    *sign = v.sign();
    *log_abs = v.log_abs();
    return HYPDYN_OK;
  });
}

}  // extern "C"
