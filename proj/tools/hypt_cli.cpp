// Command-line front end. Links only the C API in hypt/hypt.h.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypt/hypt.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Thrown to leave a command with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) { throw Exit{kExitUsage, msg}; }

void check(hypt_status status) {
  if (status == HYPT_OK) return;
  const int code = status == HYPT_IO_ERROR ? kExitIo : kExitUsage;
  throw Exit{code, hypt_last_error()};
}

struct MapDeleter {
  void operator()(hypt_map* m) const { hypt_map_free(m); }
};
struct TraceDeleter {
  void operator()(hypt_trace* t) const { hypt_trace_free(t); }
};
struct RecordDeleter {
  void operator()(hypt_record* r) const { hypt_record_free(r); }
};
struct ReportDeleter {
  void operator()(hypt_report* r) const { hypt_report_free(r); }
};
struct VerifyDeleter {
  void operator()(hypt_verify* v) const { hypt_verify_free(v); }
};
struct StringDeleter {
  void operator()(char* s) const { hypt_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

// Flags shared by every command. Unset optionals fall back to the --config
// file, then to built-in defaults.
struct Common {
  std::optional<std::string> map;
  std::optional<double> sigma;
  std::optional<double> delta;
  std::optional<double> b;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::string config_path;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--map", c.map, "map name: circle-intermittent, doubling, quadratic(a), manneville(s)");
  cmd->add_option("--sigma", c.sigma, "sigma in (0, 1)");
  cmd->add_option("--delta", c.delta, "truncation radius delta > 0");
  cmd->add_option("--b", c.b, "distance exponent, 0 < b < min{1/2, 1/(4 beta)}");
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--out", c.out, "output path (stdout if omitted)");
  cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)");
  cmd->add_option("--config", c.config_path, "JSON config file; flags override its values");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw Exit{kExitIo, "cannot read config file " + path};
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    usage_error("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) usage_error("config file must hold a JSON object");
  return doc;
}

// Moves file values into unset flags. Unknown keys are rejected.
template <typename T>
void merge(std::optional<T>& flag, json& file, const char* key) {
  auto it = file.find(key);
  if (it == file.end()) return;
  if (!flag) {
    try {
      flag = it->get<T>();
    } catch (const json::exception&) {
      usage_error(std::string("config key '") + key + "' has the wrong type");
    }
  }
  file.erase(it);
}

void reject_leftovers(const json& file) {
  if (file.empty()) return;
  usage_error("unknown config key '" + file.begin().key() + "'");
}

void merge_common(Common& c, json& file) {
  merge(c.map, file, "map");
  merge(c.sigma, file, "sigma");
  merge(c.delta, file, "delta");
  merge(c.b, file, "b");
  merge(c.seed, file, "seed");
  merge(c.out, file, "out");
  merge(c.workers, file, "workers");
}

using MapHandle = std::unique_ptr<hypt_map, MapDeleter>;

MapHandle open_map(const std::string& name) {
  hypt_map* m = nullptr;
  check(hypt_map_create(name.c_str(), &m));
  return MapHandle(m);
}

hypt_params resolve_params(const hypt_map* map, const Common& c) {
  hypt_params p{};
  check(hypt_map_default_params(map, &p));
  if (c.sigma) p.sigma = *c.sigma;
  if (c.delta) p.delta = *c.delta;
  if (c.b) p.b = *c.b;
  if (hypt_params_validate(map, &p) != HYPT_OK) {
    usage_error(std::string("invalid parameters: ") + hypt_last_error());
  }
  return p;
}

json params_json(const hypt_params& p) {
  return {{"sigma", p.sigma}, {"delta", p.delta}, {"b", p.b}};
}

void emit(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw Exit{kExitIo, "cannot write " + *path};
}

std::string take(char* s) {
  CString owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::optional<double> x0;
  std::optional<std::uint64_t> n;
  std::optional<std::string> record;
};

int cmd_simulate(SimulateArgs& a) {
  json file = load_config(a.common.config_path);
  merge_common(a.common, file);
  merge(a.x0, file, "x0");
  merge(a.n, file, "n");
  merge(a.record, file, "record");
  reject_leftovers(file);
  if (!a.common.map) usage_error("--map is required");
  if (!a.x0) usage_error("--x0 is required");
  const std::uint64_t n = a.n.value_or(1000);
  if (n < 1) usage_error("--n must be >= 1");

  MapHandle map = open_map(*a.common.map);
  const hypt_params p = resolve_params(map.get(), a.common);
  const json config = {{"command", "simulate"}, {"map", *a.common.map}, {"params", params_json(p)},
                       {"x0", *a.x0}, {"n", n}};
  const std::string cfg = config.dump();

  hypt_trace* t = nullptr;
  check(hypt_trace_generate(map.get(), *a.x0, n, p.delta, &t));
  std::unique_ptr<hypt_trace, TraceDeleter> trace(t);
  hypt_record* r = nullptr;
  check(hypt_detect(trace.get(), &p, &r));
  std::unique_ptr<hypt_record, RecordDeleter> record(r);

  char* csv = nullptr;
  check(hypt_trace_csv(trace.get(), record.get(), "simulate", cfg.c_str(), &csv));
  emit(a.common.out, take(csv));
  if (a.record) {
    char* js = nullptr;
    check(hypt_record_json(record.get(), "simulate", cfg.c_str(), &js));
    emit(a.record, take(js));
  }
  const std::int64_t cens = hypt_trace_censored_at(trace.get());
  if (cens >= 0) std::cerr << "note: orbit hit the exceptional set at step " << cens << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EnsembleArgs {
  Common common;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> m;
  bool gnuplot = false;
};

int cmd_ensemble(EnsembleArgs& a) {
  json file = load_config(a.common.config_path);
  merge_common(a.common, file);
  merge(a.n, file, "n");
  merge(a.m, file, "m");
  reject_leftovers(file);
  if (!a.common.map) usage_error("--map is required");
  const std::uint64_t n = a.n.value_or(10000);
  const std::uint64_t m = a.m.value_or(10000);
  if (n < 1 || m < 1) usage_error("--n and --m must be >= 1");
  const std::uint64_t seed = a.common.seed.value_or(1);

  MapHandle map = open_map(*a.common.map);
  const hypt_params p = resolve_params(map.get(), a.common);
  // Worker count does not change results, so it is not part of the digest.
  const json config = {{"command", "ensemble"}, {"map", *a.common.map}, {"params", params_json(p)},
                       {"n", n}, {"m", m}, {"seed", seed}};
  const std::string cfg = config.dump();

  hypt_ensemble_config ec{};
  ec.map = a.common.map->c_str();
  ec.params = p;
  ec.orbit_length = n;
  ec.ensemble_size = m;
  ec.seed = seed;
  ec.workers = a.common.workers.value_or(0);
  hypt_report* r = nullptr;
  check(hypt_ensemble_run(&ec, &r));
  std::unique_ptr<hypt_report, ReportDeleter> report(r);

  char* js = nullptr;
  check(hypt_report_json(report.get(), "ensemble", cfg.c_str(), &js));
  const std::string json_text = take(js);
  if (!a.common.out) {
    std::cout << json_text;
    return kExitOk;
  }
  const std::string& base = *a.common.out;
  emit(base + ".json", json_text);
  char* hist = nullptr;
  check(hypt_report_histogram_csv(report.get(), "ensemble", cfg.c_str(), &hist));
  emit(base + "_histogram.csv", take(hist));
  char* tail = nullptr;
  check(hypt_report_tail_csv(report.get(), "ensemble", cfg.c_str(), &tail));
  emit(base + "_tail.csv", take(tail));
  if (a.gnuplot) {
    const std::string tail_csv = base + "_tail.csv";
    emit(base + "_tail.gp",
         "set datafile separator ','\nset logscale xy\nset xlabel 'n'\n"
         "set ylabel 'P(h > n)'\nplot '" + tail_csv + "' every ::1 using 1:3 with linespoints title 'P(h>n)'\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RecurrenceArgs {
  std::optional<double> x1;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> stride;
  std::optional<std::string> out;
  std::string config_path;
  bool gnuplot = false;
};

int cmd_recurrence(RecurrenceArgs& a) {
  json file = load_config(a.config_path);
  merge(a.x1, file, "x1");
  merge(a.n, file, "n");
  merge(a.stride, file, "stride");
  merge(a.out, file, "out");
  reject_leftovers(file);
  const double x1 = a.x1.value_or(0.25);
  const std::uint64_t n = a.n.value_or(1000000);
  if (!(x1 > 0.0 && x1 < 0.5)) {
    usage_error("--x1 must lie in (0, 1/2): the induction bound 0 <= x_n <= 1 - 1/(2n) is "
                "proved for x1 in that range");
  }
  if (n < 1) usage_error("--n must be >= 1");
  const std::uint64_t stride = a.stride.value_or(n <= 1000 ? 1 : n / 1000);
  if (stride < 1) usage_error("--stride must be >= 1");
  const json config = {{"command", "recurrence"}, {"x1", x1}, {"n", n}, {"stride", stride}};
  const std::string cfg = config.dump();

  hypt_recurrence_summary s{};
  check(hypt_recurrence_run(x1, n, &s));
  char* table = nullptr;
  check(hypt_recurrence_table_csv(x1, n, &table));
  const std::string table_text = take(table);

  char* csv = nullptr;
  check(hypt_recurrence_csv(x1, n, stride, "recurrence", cfg.c_str(), &csv));
  emit(a.out, take(csv));
  if (a.out && a.gnuplot) {
    emit(*a.out + ".gp",
         "set datafile separator ','\nset logscale x\nset xlabel 'n'\n"
         "plot '" + *a.out + "' every ::1 using 1:5 with lines title 'S_n', "
         "'' every ::1 using 1:6 with lines title 'H_n/16'\n");
  }

  // The per-n CSV owns stdout when no --out is given; the summary then goes
  // to stderr.
  const bool pass = s.induction_holds && s.termwise_bound_holds && s.dominates_harmonic &&
                    s.monotone;
  std::FILE* sink = a.out ? stdout : stderr;
  std::fputs(table_text.c_str(), sink);
  std::fprintf(sink, "induction bound y_n >= 1/(2n): %s (min slack %.6g)\n",
               s.induction_holds ? "pass" : "FAIL", s.min_slack);
  std::fprintf(sink, "termwise bound n(x_{n+1}-x_n) >= 1/(16n): %s\n",
               s.termwise_bound_holds ? "pass" : "FAIL");
  std::fprintf(sink, "S_n >= H_n/16 for all n: %s\n", s.dominates_harmonic ? "pass" : "FAIL");
  std::fprintf(sink, "S_N = %.10g, S_N/ln N = %.6g\n", s.final_sum, s.final_ratio_to_log);
  std::fprintf(sink, "rational check max rel error %.3g, quad check rel error %.3g\n",
               s.rational_max_rel_error, s.quad_rel_error);
  std::fprintf(sink, "result: %s\n", pass ? "pass" : "FAIL");
  return pass ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------

struct IntegralsArgs {
  Common common;
  std::vector<double> p;
};

int cmd_integrals(IntegralsArgs& a) {
  json file = load_config(a.common.config_path);
  merge_common(a.common, file);
  if (auto it = file.find("p"); it != file.end()) {
    if (a.p.empty()) a.p = it->get<std::vector<double>>();
    file.erase(it);
  }
  reject_leftovers(file);
  const std::string name = a.common.map.value_or("circle-intermittent");
  if (a.p.empty()) a.p = {1.0, 2.0, 3.0, 4.0};
  const double delta = a.common.delta.value_or(1.0);
  if (!(delta > 0.0)) usage_error("--delta must be > 0");
  MapHandle map = open_map(name);
  const json config = {{"command", "integrals"}, {"map", name}, {"delta", delta}, {"p", a.p}};
  std::string text = "# tool: hypt " + std::string(hypt_version()) + "\n# config: " +
                     config.dump() + "\np,value,error_estimate,extrapolated,converged\n";
  for (const double p : a.p) {
    if (!(p >= 1.0)) usage_error("--p values must be >= 1");
    hypt_integral r{};
    check(hypt_integral_log_dist(map.get(), p, delta, &r));
    char line[256];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.3g,%.17g,%d\n", p, r.value,
                  r.error_estimate, r.extrapolated, r.converged);
    text += line;
  }
  emit(a.common.out, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string criteria;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool perturb = false;
};

int cmd_verify(const VerifyArgs& a) {
  hypt_verify* v = nullptr;
  check(hypt_verify_run(a.criteria.empty() ? nullptr : a.criteria.c_str(), a.seed, a.workers,
                        a.perturb ? 1 : 0, &v));
  std::unique_ptr<hypt_verify, VerifyDeleter> results(v);
  bool all = true;
  std::printf("hypt %s acceptance suite (seed %llu)\n", hypt_version(),
              static_cast<unsigned long long>(a.seed));
  for (std::size_t i = 0; i < hypt_verify_count(results.get()); ++i) {
    const bool ok = hypt_verify_passed(results.get(), i) != 0;
    all = all && ok;
    std::printf("[%s] %2d %-22s %7.2fs  %s\n", ok ? "PASS" : "FAIL", hypt_verify_id(results.get(), i),
                hypt_verify_name(results.get(), i), hypt_verify_seconds(results.get(), i),
                hypt_verify_detail(results.get(), i));
  }
  if (!all) {
    std::printf("failed:");
    for (std::size_t i = 0; i < hypt_verify_count(results.get()); ++i) {
      if (!hypt_verify_passed(results.get(), i)) std::printf(" %s", hypt_verify_name(results.get(), i));
    }
    std::printf("\n");
  }
  return all ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperbolic times for one-dimensional non-uniformly expanding maps"};
  app.set_version_flag("--version", std::string("hypt ") + hypt_version());
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "iterate one orbit and mark hyperbolic times (CSV)");
  add_common(simulate, sim.common);
  simulate->add_option("--x0", sim.x0, "initial point");
  simulate->add_option("--n", sim.n, "number of iterations (default 1000)");
  simulate->add_option("--record", sim.record, "also write the hyperbolic-time record as JSON");

  EnsembleArgs ens;
  auto* ensemble = app.add_subcommand("ensemble", "first-time statistics over Lebesgue-random orbits");
  add_common(ensemble, ens.common);
  ensemble->add_option("--n", ens.n, "orbit length N (default 10000)");
  ensemble->add_option("--m", ens.m, "ensemble size M (default 10000)");
  ensemble->add_flag("--gnuplot", ens.gnuplot, "also write a gnuplot script for the tail table");

  RecurrenceArgs rec;
  auto* recurrence = app.add_subcommand("recurrence", "backward recurrence x_{n+1} = (1 + x_n)^2 / 4");
  recurrence->add_option("--x1", rec.x1, "starting point in (0, 1/2) (default 0.25)");
  recurrence->add_option("--n", rec.n, "number of terms (default 1000000)");
  recurrence->add_option("--stride", rec.stride, "CSV row stride");
  recurrence->add_option("--out", rec.out, "CSV output path");
  recurrence->add_option("--config", rec.config_path, "JSON config file; flags override its values");
  recurrence->add_flag("--gnuplot", rec.gnuplot, "also write a gnuplot script");

  IntegralsArgs integ;
  auto* integrals = app.add_subcommand("integrals", "moments of -log dist_delta(x, S)");
  add_common(integrals, integ.common);
  integrals->add_option("--p", integ.p, "exponents p >= 1 (default 1 2 3 4)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--criteria", ver.criteria, "comma-separated ids or name prefixes");
  verify->add_option("--seed", ver.seed, "RNG seed (default 1)");
  verify->add_option("--workers", ver.workers, "worker threads (0 = all cores)");
  verify->add_flag("--perturb-detector", ver.perturb, "break the streaming detector (test hook)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*ensemble) return cmd_ensemble(ens);
    if (*recurrence) return cmd_recurrence(rec);
    if (*integrals) return cmd_integrals(integ);
    if (*verify) return cmd_verify(ver);
  } catch (const Exit& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
