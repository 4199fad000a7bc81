/* C interface to the hyperbolic-time library.
 *
 * Objects are opaque handles created by hypt_*_create / returned through out
 * parameters and released with the matching hypt_*_free. Every function that
 * can fail returns a hypt_status; on failure hypt_last_error() describes the
 * problem (thread-local, valid until the next failing call on that thread).
 * Strings returned through char** are owned by the caller and released with
 * hypt_string_free. */
#ifndef HYPT_H
#define HYPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(HYPT_BUILDING_LIBRARY)
#define HYPT_API __attribute__((visibility("default")))
#else
#define HYPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hypt_status {
  HYPT_OK = 0,
  HYPT_INVALID_ARGUMENT = 1,
  HYPT_OUT_OF_RANGE = 2,
  HYPT_UNKNOWN_MAP = 3,
  HYPT_NOT_CONVERGED = 4,
  HYPT_INTERNAL = 5,
  HYPT_IO_ERROR = 6
} hypt_status;

typedef struct hypt_map hypt_map;
typedef struct hypt_trace hypt_trace;
typedef struct hypt_record hypt_record;
typedef struct hypt_report hypt_report;
typedef struct hypt_verify hypt_verify;

typedef struct hypt_params {
  double sigma;
  double delta;
  double b;
} hypt_params;

typedef struct hypt_ensemble_config {
  const char* map;
  hypt_params params;
  uint64_t orbit_length;
  uint64_t ensemble_size;
  uint64_t seed;
  unsigned workers; /* 0: all available cores */
} hypt_ensemble_config;

typedef struct hypt_integral {
  double value;
  double error_estimate;
  double extrapolated;
  int converged;
} hypt_integral;

typedef struct hypt_recurrence_summary {
  int induction_holds;
  double min_slack;
  uint64_t first_induction_violation;
  int termwise_bound_holds;
  int dominates_harmonic;
  int monotone;
  double final_sum;
  double final_ratio_to_log;
  double rational_max_rel_error; /* exact n <= 24 and certified enclosures n <= 30 */
  double quad_rel_error;         /* double vs __float128 at the last n */
} hypt_recurrence_summary;

HYPT_API const char* hypt_version(void);
HYPT_API const char* hypt_last_error(void);
HYPT_API void hypt_string_free(char* s);

/* Maps. */
HYPT_API hypt_status hypt_map_create(const char* spec, hypt_map** out);
HYPT_API void hypt_map_free(hypt_map* map);
HYPT_API hypt_status hypt_map_default_params(const hypt_map* map, hypt_params* out);
/* Checks sigma, delta and b against the map's beta; the message cites the
 * constraint that failed. */
HYPT_API hypt_status hypt_params_validate(const hypt_map* map, const hypt_params* params);
HYPT_API hypt_status hypt_map_eval(const hypt_map* map, double x, double* out);
HYPT_API hypt_status hypt_map_log_inv_deriv(const hypt_map* map, double x, double* out);

/* Orbits and detection. */
HYPT_API hypt_status hypt_trace_generate(const hypt_map* map, double x0, uint64_t steps,
                                         double delta, hypt_trace** out);
HYPT_API void hypt_trace_free(hypt_trace* trace);
HYPT_API uint64_t hypt_trace_length(const hypt_trace* trace);
/* Step at which the orbit hit the exceptional set, or -1. */
HYPT_API int64_t hypt_trace_censored_at(const hypt_trace* trace);

HYPT_API hypt_status hypt_detect(const hypt_trace* trace, const hypt_params* params,
                                 hypt_record** out);
HYPT_API void hypt_record_free(hypt_record* record);
HYPT_API uint64_t hypt_record_count(const hypt_record* record);
/* Copies up to capacity times into buffer; returns the total count. */
HYPT_API uint64_t hypt_record_times(const hypt_record* record, uint64_t* buffer,
                                    uint64_t capacity);
/* First hyperbolic time; *censored is set to 1 when none was found. */
HYPT_API uint64_t hypt_record_first(const hypt_record* record, int* censored);
HYPT_API double hypt_record_frequency(const hypt_record* record, uint64_t n);

/* Serialization; config_json is the canonical config embedded in the header
 * (may be NULL). */
HYPT_API hypt_status hypt_trace_csv(const hypt_trace* trace, const hypt_record* record,
                                    const char* command, const char* config_json, char** out);
HYPT_API hypt_status hypt_record_json(const hypt_record* record, const char* command,
                                      const char* config_json, char** out);

/* Ensembles. */
HYPT_API hypt_status hypt_ensemble_run(const hypt_ensemble_config* config, hypt_report** out);
HYPT_API void hypt_report_free(hypt_report* report);
HYPT_API hypt_status hypt_report_json(const hypt_report* report, const char* command,
                                      const char* config_json, char** out);
HYPT_API hypt_status hypt_report_histogram_csv(const hypt_report* report, const char* command,
                                               const char* config_json, char** out);
HYPT_API hypt_status hypt_report_tail_csv(const hypt_report* report, const char* command,
                                          const char* config_json, char** out);
HYPT_API hypt_status hypt_report_truncated_mean(const hypt_report* report, uint64_t cap,
                                                double* out);

/* Backward recurrence from x1. */
HYPT_API hypt_status hypt_recurrence_run(double x1, uint64_t n, hypt_recurrence_summary* out);
HYPT_API hypt_status hypt_recurrence_csv(double x1, uint64_t n, uint64_t stride,
                                         const char* command, const char* config_json,
                                         char** out);
/* Divergence table (n, S_n, H_n/16, S_n/ln n) as CSV without preamble. */
HYPT_API hypt_status hypt_recurrence_table_csv(double x1, uint64_t n, char** out);

/* Integral of |log dist_delta(x, S)|^p against normalized Lebesgue measure. */
HYPT_API hypt_status hypt_integral_log_dist(const hypt_map* map, double p, double delta,
                                            hypt_integral* out);

/* Acceptance suite. filter: comma-separated ids or name prefixes, NULL = all. */
HYPT_API hypt_status hypt_verify_run(const char* filter, uint64_t seed, unsigned workers,
                                     int perturb_detector, hypt_verify** out);
HYPT_API void hypt_verify_free(hypt_verify* results);
HYPT_API size_t hypt_verify_count(const hypt_verify* results);
HYPT_API int hypt_verify_id(const hypt_verify* results, size_t i);
HYPT_API const char* hypt_verify_name(const hypt_verify* results, size_t i);
HYPT_API int hypt_verify_passed(const hypt_verify* results, size_t i);
HYPT_API const char* hypt_verify_detail(const hypt_verify* results, size_t i);
HYPT_API double hypt_verify_seconds(const hypt_verify* results, size_t i);
/* Number of criterion names; hypt_criterion_name(i) for i < count. */
HYPT_API size_t hypt_criterion_count(void);
HYPT_API const char* hypt_criterion_name(size_t i);

/* Test hook: make the streaming detector drop its first detection. */
HYPT_API void hypt_testing_perturb_stream_detector(int enabled);

#ifdef __cplusplus
}
#endif

#endif /* HYPT_H */
