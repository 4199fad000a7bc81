#include "hypt/hypt.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "hypt/detector.hpp"
#include "hypt/ergodic_stats.hpp"
#include "hypt/error.hpp"
#include "hypt/map_models.hpp"
#include "hypt/recurrence.hpp"
#include "hypt/report_io.hpp"
#include "hypt/verify.hpp"

struct hypt_map {
  std::shared_ptr<const hypt::MapModel> model;
};
struct hypt_trace {
  hypt::OrbitTrace trace;
};
struct hypt_record {
  hypt::HyperbolicTimeRecord record;
};
struct hypt_report {
  hypt::EnsembleReport report;
  hypt::TailDiagnostic tail;
};
struct hypt_verify {
  std::vector<hypt::CriterionResult> results;
};

namespace {

thread_local std::string g_last_error;

hypt_status to_status(hypt::ErrorCode code) {
  switch (code) {
    case hypt::ErrorCode::kInvalidArgument: return HYPT_INVALID_ARGUMENT;
    case hypt::ErrorCode::kOutOfRange: return HYPT_OUT_OF_RANGE;
    case hypt::ErrorCode::kUnknownMap: return HYPT_UNKNOWN_MAP;
    case hypt::ErrorCode::kNotConverged: return HYPT_NOT_CONVERGED;
    case hypt::ErrorCode::kInternal: return HYPT_INTERNAL;
  }
  return HYPT_INTERNAL;
}

// Runs body and translates exceptions into a status plus message.
template <typename F>
hypt_status guarded(F&& body) {
  try {
    body();
    return HYPT_OK;
  } catch (const hypt::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HYPT_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HYPT_INTERNAL;
  }
}

hypt_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return HYPT_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

hypt::HyperbolicParams to_params(const hypt_params& p) { return {p.sigma, p.delta, p.b}; }

hypt::ArtifactMeta make_meta(const char* command, const char* config_json) {
  return {command != nullptr ? command : "", config_json != nullptr ? config_json : ""};
}

}  // namespace

extern "C" {

const char* hypt_version(void) {
  static const std::string v = hypt::tool_version();
  return v.c_str();
}

const char* hypt_last_error(void) { return g_last_error.c_str(); }

void hypt_string_free(char* s) { std::free(s); }

hypt_status hypt_map_create(const char* spec, hypt_map** out) {
  if (spec == nullptr || out == nullptr) return null_argument("spec/out");
  return guarded([&] { *out = new hypt_map{hypt::make_map(spec)}; });
}

void hypt_map_free(hypt_map* map) { delete map; }

hypt_status hypt_map_default_params(const hypt_map* map, hypt_params* out) {
  if (map == nullptr || out == nullptr) return null_argument("map/out");
  const auto& p = map->model->default_params();
  *out = {p.sigma, p.delta, p.b};
  return HYPT_OK;
}

hypt_status hypt_params_validate(const hypt_map* map, const hypt_params* params) {
  if (map == nullptr || params == nullptr) return null_argument("map/params");
  return guarded([&] { to_params(*params).validate_for(map->model->nondegeneracy()); });
}

hypt_status hypt_map_eval(const hypt_map* map, double x, double* out) {
  if (map == nullptr || out == nullptr) return null_argument("map/out");
  return guarded([&] { *out = map->model->eval(x); });
}

hypt_status hypt_map_log_inv_deriv(const hypt_map* map, double x, double* out) {
  if (map == nullptr || out == nullptr) return null_argument("map/out");
  return guarded([&] { *out = map->model->log_inv_deriv(x); });
}

hypt_status hypt_trace_generate(const hypt_map* map, double x0, uint64_t steps, double delta,
                                hypt_trace** out) {
  if (map == nullptr || out == nullptr) return null_argument("map/out");
  return guarded([&] {
    *out = new hypt_trace{hypt::generate_orbit(*map->model, x0, steps, delta)};
  });
}

void hypt_trace_free(hypt_trace* trace) { delete trace; }

uint64_t hypt_trace_length(const hypt_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.length();
}

int64_t hypt_trace_censored_at(const hypt_trace* trace) {
  if (trace == nullptr || !trace->trace.censored()) return -1;
  return static_cast<int64_t>(*trace->trace.censored_at);
}

hypt_status hypt_detect(const hypt_trace* trace, const hypt_params* params, hypt_record** out) {
  if (trace == nullptr || params == nullptr || out == nullptr) {
    return null_argument("trace/params/out");
  }
  return guarded([&] {
    *out = new hypt_record{hypt::hyperbolic_times_stream(trace->trace, to_params(*params))};
  });
}

void hypt_record_free(hypt_record* record) { delete record; }

uint64_t hypt_record_count(const hypt_record* record) {
  return record == nullptr ? 0 : record->record.times.size();
}

uint64_t hypt_record_times(const hypt_record* record, uint64_t* buffer, uint64_t capacity) {
  if (record == nullptr) return 0;
  const auto& t = record->record.times;
  if (buffer != nullptr) {
    for (uint64_t i = 0; i < capacity && i < t.size(); ++i) buffer[i] = t[i];
  }
  return t.size();
}

uint64_t hypt_record_first(const hypt_record* record, int* censored) {
  if (record == nullptr) return 0;
  if (censored != nullptr) *censored = record->record.first.censored ? 1 : 0;
  return record->record.first.value;
}

double hypt_record_frequency(const hypt_record* record, uint64_t n) {
  return record == nullptr ? 0.0 : record->record.frequency_at(n);
}

hypt_status hypt_trace_csv(const hypt_trace* trace, const hypt_record* record,
                           const char* command, const char* config_json, char** out) {
  if (trace == nullptr || record == nullptr || out == nullptr) {
    return null_argument("trace/record/out");
  }
  return guarded([&] {
    std::ostringstream s;
    hypt::write_trace_csv(s, trace->trace, record->record, make_meta(command, config_json));
    *out = dup_string(s.str());
  });
}

hypt_status hypt_record_json(const hypt_record* record, const char* command,
                             const char* config_json, char** out) {
  if (record == nullptr || out == nullptr) return null_argument("record/out");
  return guarded([&] {
    *out = dup_string(hypt::record_json(record->record, make_meta(command, config_json)));
  });
}

hypt_status hypt_ensemble_run(const hypt_ensemble_config* config, hypt_report** out) {
  if (config == nullptr || config->map == nullptr || out == nullptr) {
    return null_argument("config/map/out");
  }
  return guarded([&] {
    auto map = hypt::make_map(config->map);
    hypt::EnsembleConfig c;
    c.map_name = config->map;
    c.params = to_params(config->params);
    c.orbit_length = config->orbit_length;
    c.ensemble_size = config->ensemble_size;
    c.seed = config->seed;
    c.workers = config->workers;
    c.params.validate_for(map->nondegeneracy());
    auto report = std::make_unique<hypt_report>();
    report->report = hypt::run_ensemble(*map, c);
    report->tail = hypt::tail_growth_diagnostic(report->report.first_times);
    *out = report.release();
  });
}

void hypt_report_free(hypt_report* report) { delete report; }

hypt_status hypt_report_json(const hypt_report* report, const char* command,
                             const char* config_json, char** out) {
  if (report == nullptr || out == nullptr) return null_argument("report/out");
  return guarded([&] {
    *out = dup_string(
        hypt::ensemble_json(report->report, report->tail, make_meta(command, config_json)));
  });
}

hypt_status hypt_report_histogram_csv(const hypt_report* report, const char* command,
                                      const char* config_json, char** out) {
  if (report == nullptr || out == nullptr) return null_argument("report/out");
  return guarded([&] {
    std::ostringstream s;
    hypt::write_histogram_csv(s, report->report.first_times, make_meta(command, config_json));
    *out = dup_string(s.str());
  });
}

hypt_status hypt_report_tail_csv(const hypt_report* report, const char* command,
                                 const char* config_json, char** out) {
  if (report == nullptr || out == nullptr) return null_argument("report/out");
  return guarded([&] {
    std::ostringstream s;
    hypt::write_tail_csv(s, report->report.first_times, make_meta(command, config_json));
    *out = dup_string(s.str());
  });
}

hypt_status hypt_report_truncated_mean(const hypt_report* report, uint64_t cap, double* out) {
  if (report == nullptr || out == nullptr) return null_argument("report/out");
  return guarded([&] { *out = report->report.truncated_mean(cap); });
}

hypt_status hypt_recurrence_run(double x1, uint64_t n, hypt_recurrence_summary* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    hypt::require(x1 > 0.0 && x1 < 0.5, hypt::ErrorCode::kInvalidArgument,
                  "x1 must lie in (0, 1/2): the induction bound 0 <= x_n <= 1 - 1/(2n) "
                  "is proved for that range");
    const hypt::GapSequence seq = hypt::iterate_gap(1.0 - x1, n);
    const auto ind = hypt::check_induction_bound(seq);
    const auto div = hypt::partial_sum_divergence(seq);
    const auto exact = hypt::rational_spot_check(1.0 - x1, std::min<uint64_t>(n, 24),
                                                 std::min<uint64_t>(n, 30));
    const auto quad = hypt::quad_spot_check(1.0 - x1, {n});
    *out = {ind.holds ? 1 : 0,
            ind.min_slack,
            ind.first_violation,
            div.termwise_bound_holds ? 1 : 0,
            div.dominates_harmonic ? 1 : 0,
            div.monotone ? 1 : 0,
            div.final_sum,
            div.final_ratio_to_log,
            std::max(exact.max_rel_error_exact, exact.max_rel_error_enclosure),
            quad.back().rel_error};
  });
}

hypt_status hypt_recurrence_csv(double x1, uint64_t n, uint64_t stride, const char* command,
                                const char* config_json, char** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    std::ostringstream s;
    hypt::write_recurrence_csv(s, hypt::iterate_gap(1.0 - x1, n), stride,
                               make_meta(command, config_json));
    *out = dup_string(s.str());
  });
}

hypt_status hypt_recurrence_table_csv(double x1, uint64_t n, char** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const auto div = hypt::partial_sum_divergence(hypt::iterate_gap(1.0 - x1, n));
    std::ostringstream s;
    s << "n,S_n,harmonic_bound,ratio_to_log\n";
    for (const auto& row : div.table) {
      s << row.n << ',' << hypt::format_double(row.partial_sum) << ','
        << hypt::format_double(row.harmonic_bound) << ','
        << hypt::format_double(row.ratio_to_log) << '\n';
    }
    *out = dup_string(s.str());
  });
}

hypt_status hypt_integral_log_dist(const hypt_map* map, double p, double delta,
                                   hypt_integral* out) {
  if (map == nullptr || out == nullptr) return null_argument("map/out");
  return guarded([&] {
    const auto r = hypt::integral_log_dist(*map->model, p, delta);
    *out = {r.value, r.error_estimate, r.extrapolated, r.converged ? 1 : 0};
  });
}

hypt_status hypt_verify_run(const char* filter, uint64_t seed, unsigned workers,
                            int perturb_detector, hypt_verify** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    hypt::VerifyOptions options;
    options.filter = filter != nullptr ? filter : "";
    options.seed = seed;
    options.workers = workers;
    options.perturb_detector = perturb_detector != 0;
    *out = new hypt_verify{hypt::run_verification(options)};
  });
}

void hypt_verify_free(hypt_verify* results) { delete results; }

size_t hypt_verify_count(const hypt_verify* results) {
  return results == nullptr ? 0 : results->results.size();
}

int hypt_verify_id(const hypt_verify* results, size_t i) {
  return results == nullptr || i >= results->results.size() ? 0 : results->results[i].id;
}

const char* hypt_verify_name(const hypt_verify* results, size_t i) {
  if (results == nullptr || i >= results->results.size()) return "";
  return results->results[i].name.c_str();
}

int hypt_verify_passed(const hypt_verify* results, size_t i) {
  if (results == nullptr || i >= results->results.size()) return 0;
  return results->results[i].passed ? 1 : 0;
}

const char* hypt_verify_detail(const hypt_verify* results, size_t i) {
  if (results == nullptr || i >= results->results.size()) return "";
  return results->results[i].detail.c_str();
}

double hypt_verify_seconds(const hypt_verify* results, size_t i) {
  if (results == nullptr || i >= results->results.size()) return 0.0;
  return results->results[i].seconds;
}

size_t hypt_criterion_count(void) { return hypt::criterion_names().size(); }

const char* hypt_criterion_name(size_t i) {
  const auto& names = hypt::criterion_names();
  return i < names.size() ? names[i].c_str() : "";
}

void hypt_testing_perturb_stream_detector(int enabled) {
  hypt::testing::set_stream_perturbation(enabled != 0);
}

}  // extern "C"
