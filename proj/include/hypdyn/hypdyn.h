/* hypdyn C interface. All functions return a hypdyn_status; on failure the
 * message is available from hypdyn_last_error() on the same thread. Strings
 * returned through `const char**` stay valid until the owning handle is
 * freed; strings returned through `char**` must be released with
 * hypdyn_string_free. */
#ifndef HYPDYN_H
#define HYPDYN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HYPDYN_API __declspec(dllexport)
#else
#define HYPDYN_API __attribute__((visibility("default")))
#endif

typedef enum hypdyn_status {
  HYPDYN_OK = 0,
  HYPDYN_E_DIMENSION = 1,
  HYPDYN_E_FIELD = 2,
  HYPDYN_E_INVALID_ARGUMENT = 3,
  HYPDYN_E_PRECONDITION = 4,
  HYPDYN_E_CAPACITY = 5,
  HYPDYN_E_SAMPLING = 6,
  HYPDYN_E_CONFIG = 7,
  HYPDYN_E_UNKNOWN_EXPERIMENT = 8,
  HYPDYN_E_IO = 9,
  HYPDYN_E_INTERNAL = 10,
  HYPDYN_E_NULL = 11,
  HYPDYN_E_SCHEMA = 12,
  HYPDYN_E_RANGE = 13
} hypdyn_status;

typedef struct hypdyn_config hypdyn_config;
typedef struct hypdyn_report hypdyn_report;
typedef struct hypdyn_operator hypdyn_operator;

HYPDYN_API const char* hypdyn_version(void);
HYPDYN_API const char* hypdyn_schema_version(void);
HYPDYN_API const char* hypdyn_status_name(hypdyn_status status);
HYPDYN_API const char* hypdyn_last_error(void);
HYPDYN_API void hypdyn_string_free(char* s);

/* Configs */
HYPDYN_API hypdyn_status hypdyn_config_parse(const char* text, const char* source_name, hypdyn_config** out);
HYPDYN_API hypdyn_status hypdyn_config_load(const char* path, hypdyn_config** out);
HYPDYN_API hypdyn_status hypdyn_config_new(hypdyn_config** out);
/* Dotted paths: "seed", "params.n", "output.dir". Blocks are created as
 * needed. */
HYPDYN_API hypdyn_status hypdyn_config_set(hypdyn_config* cfg, const char* path, const char* value);
/* *out is NULL when the key is absent. */
HYPDYN_API hypdyn_status hypdyn_config_get(const hypdyn_config* cfg, const char* path, char** out);
HYPDYN_API hypdyn_status hypdyn_config_serialize(const hypdyn_config* cfg, char** out);
HYPDYN_API void hypdyn_config_free(hypdyn_config* cfg);

/* Experiment registry */
HYPDYN_API size_t hypdyn_experiment_count(void);
HYPDYN_API const char* hypdyn_experiment_name(size_t index);
HYPDYN_API const char* hypdyn_experiment_summary(size_t index);
HYPDYN_API int hypdyn_experiment_stochastic(size_t index);
HYPDYN_API size_t hypdyn_experiment_param_count(size_t index);
/* Any of the out pointers may be NULL. */
HYPDYN_API hypdyn_status hypdyn_experiment_param(size_t index, size_t param, const char** name, const char** type,
                                                 const char** fallback, const char** help);

/* Runs the experiment named in the config. A failed check is not an error:
 * the call succeeds and hypdyn_report_passed returns 0. */
HYPDYN_API hypdyn_status hypdyn_run(const hypdyn_config* cfg, unsigned jobs, hypdyn_report** out);
HYPDYN_API int hypdyn_report_passed(const hypdyn_report* rep);
HYPDYN_API const char* hypdyn_report_json(const hypdyn_report* rep);
HYPDYN_API const char* hypdyn_report_csv(const hypdyn_report* rep);
HYPDYN_API void hypdyn_report_free(hypdyn_report* rep);

/* Report schema */
HYPDYN_API const char* hypdyn_report_schema(void);
/* HYPDYN_OK when valid; HYPDYN_E_SCHEMA otherwise, with "pointer: message"
 * lines in *message (may be NULL). */
HYPDYN_API hypdyn_status hypdyn_validate_report(const char* json_text, char** message);

/* Operators, from an operator block ("kind = ...") */
HYPDYN_API hypdyn_status hypdyn_operator_parse(const char* text, hypdyn_operator** out);
HYPDYN_API size_t hypdyn_operator_dim(const hypdyn_operator* op);
HYPDYN_API int hypdyn_operator_is_complex(const hypdyn_operator* op);
HYPDYN_API const char* hypdyn_operator_describe(const hypdyn_operator* op);
/* Interleaved (re, im) pairs, 2 * dim doubles each. Real operators take
 * vectors with zero imaginary parts and fail with HYPDYN_E_FIELD otherwise. */
HYPDYN_API hypdyn_status hypdyn_operator_apply(const hypdyn_operator* op, const double* x, double* y);
/* T^n x / |T^n x| into unit, ln |T^n x| into lognorm. */
HYPDYN_API hypdyn_status hypdyn_operator_power(const hypdyn_operator* op, uint64_t n, const double* x, double* unit,
                                               double* lognorm);
HYPDYN_API void hypdyn_operator_free(hypdyn_operator* op);

/* Log-domain numbers: sign in {-1, 0, 1} and ln |value|. */
HYPDYN_API hypdyn_status hypdyn_log_binomial(int64_t n, int64_t k, double* out);
HYPDYN_API hypdyn_status hypdyn_a_n(int64_t n, int* sign, double* log_abs);
HYPDYN_API hypdyn_status hypdyn_b_n(int64_t n, int* sign, double* log_abs);

#ifdef __cplusplus
}
#endif

#endif
