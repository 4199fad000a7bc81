#include "hypt/report_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "hypt/error.hpp"

namespace hypt {

using nlohmann::json;

std::string tool_version() { return HYPT_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ArtifactMeta::digest() const { return fnv1a_hex(config_json); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_csv_preamble(std::ostream& out, const ArtifactMeta& meta) {
  out << "# tool: hypt " << tool_version() << '\n';
  out << "# command: " << meta.command << '\n';
  out << "# config_digest: " << meta.digest() << '\n';
  out << "# config: " << meta.config_json << '\n';
}

namespace {

json meta_json(const ArtifactMeta& meta) {
  json m;
  m["tool"] = "hypt";
  m["version"] = tool_version();
  m["command"] = meta.command;
  m["config_digest"] = meta.digest();
  m["config"] = meta.config_json.empty() ? json::object() : json::parse(meta.config_json);
  return m;
}

json params_json(const HyperbolicParams& p) {
  return {{"sigma", p.sigma}, {"delta", p.delta}, {"b", p.b}};
}

// Non-finite doubles have no JSON encoding; they are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

void write_trace_csv(std::ostream& out, const OrbitTrace& trace,
                     const HyperbolicTimeRecord& record, const ArtifactMeta& meta) {
  write_csv_preamble(out, meta);
  if (trace.censored()) {
    out << "# censored_at_singularity: step " << *trace.censored_at << '\n';
  }
  out << "# first_hyperbolic_time: " << record.first.to_string() << '\n';
  out << "step,x,log_inv,neglog_dist,is_hyperbolic\n";
  std::size_t next = 0;
  for (std::uint64_t j = 0; j < trace.points.size(); ++j) {
    while (next < record.times.size() && record.times[next] < j) ++next;
    const bool hyperbolic = next < record.times.size() && record.times[next] == j;
    out << j << ',' << format_double(trace.points[j]) << ','
        << format_double(trace.log_inv[j]) << ',' << format_double(trace.neglog_dist[j])
        << ',' << (hyperbolic ? 1 : 0) << '\n';
  }
}

std::string record_json(const HyperbolicTimeRecord& record, const ArtifactMeta& meta) {
  json runs = json::array();
  for (std::size_t i = 0; i < record.times.size();) {
    std::size_t j = i + 1;
    while (j < record.times.size() && record.times[j] == record.times[j - 1] + 1) ++j;
    runs.push_back({record.times[i], j - i});
    i = j;
  }
  json freq = json::array();
  for (std::uint64_t n = 100; n <= record.horizon; n *= 10) {
    freq.push_back({{"n", n}, {"frequency", record.frequency_at(n)}});
    if (n > record.horizon / 10) break;
  }
  if (record.horizon > 0 && (freq.empty() || freq.back()["n"] != record.horizon)) {
    freq.push_back({{"n", record.horizon}, {"frequency", record.frequency_at(record.horizon)}});
  }
  json doc;
  doc["meta"] = meta_json(meta);
  doc["params"] = params_json(record.params);
  doc["horizon"] = record.horizon;
  doc["time_count"] = record.times.size();
  doc["times_rle"] = runs;
  doc["first"] = record.first.to_string();
  doc["first_censored"] = record.first.censored;
  doc["frequency"] = freq;
  return doc.dump(2) + "\n";
}

namespace {

json observable_json(const ObservableSummary& s) {
  return {{"name", s.name},
          {"count", s.count},
          {"mean", number(s.mean)},
          {"variance", number(s.variance)},
          {"standard_error", number(s.standard_error)},
          {"median_of_batches", number(s.median_of_batches)},
          {"batch_means", s.batch_means}};
}

}  // namespace

std::string ensemble_json(const EnsembleReport& report, const TailDiagnostic& tail,
                          const ArtifactMeta& meta) {
  const EnsembleConfig& c = report.config;
  const FirstTimeStats& ft = report.first_times;
  json doc;
  doc["meta"] = meta_json(meta);
  doc["config"] = {{"map", c.map_name},
                   {"params", params_json(c.params)},
                   {"orbit_length", c.orbit_length},
                   {"ensemble_size", c.ensemble_size},
                   {"seed", c.seed},
                   {"batches", c.batches}};

  json hist = json::array();
  for (std::uint64_t k = 1; k <= ft.horizon; ++k) {
    if (ft.histogram[k] != 0) hist.push_back({k, ft.histogram[k]});
  }
  doc["first_time"] = {{"histogram", hist},
                       {"censored", ft.censored},
                       {"censored_fraction", ft.censored_fraction()},
                       {"samples", ft.samples}};
  json tm = json::array();
  for (const TruncatedMean& t : ft.truncated_means) tm.push_back({{"cap", t.cap}, {"mean", t.mean}});
  doc["truncated_means"] = tm;
  json tt = json::array();
  for (const TailPoint& p : ft.tail) {
    tt.push_back({{"n", p.n}, {"count", p.count}, {"fraction", p.fraction}});
  }
  doc["tail"] = tt;
  doc["censored_at_singularity"] = report.censored_at_singularity;
  doc["birkhoff"] = {observable_json(report.birkhoff_log_inv),
                     observable_json(report.birkhoff_neglog_dist)};
  json q = json::array();
  for (const auto& [level, value] : report.frequency_quantiles) {
    q.push_back({{"q", level}, {"value", value}});
  }
  doc["frequency_quantiles"] = q;
  doc["tail_diagnostic"] = {{"classification", to_string(tail.classification)},
                            {"reason", tail.reason},
                            {"slope", number(tail.slope)},
                            {"top_decade_slope", number(tail.top_decade_slope)},
                            {"prev_decade_slope", number(tail.prev_decade_slope)},
                            {"relative_increment", number(tail.relative_increment)},
                            {"min_n_tail", number(tail.min_n_tail)},
                            {"max_n_tail", number(tail.max_n_tail)},
                            {"tail_exponent", number(tail.tail_exponent)}};
  return doc.dump(2) + "\n";
}

void write_histogram_csv(std::ostream& out, const FirstTimeStats& stats,
                         const ArtifactMeta& meta) {
  write_csv_preamble(out, meta);
  out << "k,count,fraction\n";
  for (std::uint64_t k = 1; k <= stats.horizon; ++k) {
    if (stats.histogram[k] == 0) continue;
    out << k << ',' << stats.histogram[k] << ',' << format_double(stats.fraction(k)) << '\n';
  }
  out << '>' << stats.horizon << ',' << stats.censored << ','
      << format_double(stats.censored_fraction()) << '\n';
}

void write_tail_csv(std::ostream& out, const FirstTimeStats& stats, const ArtifactMeta& meta) {
  write_csv_preamble(out, meta);
  out << "n,count,fraction,n_times_fraction\n";
  for (const TailPoint& p : stats.tail) {
    out << p.n << ',' << p.count << ',' << format_double(p.fraction) << ','
        << format_double(static_cast<double>(p.n) * p.fraction) << '\n';
  }
}

void write_recurrence_csv(std::ostream& out, const GapSequence& seq, std::uint64_t stride,
                          const ArtifactMeta& meta) {
  require(stride >= 1, ErrorCode::kInvalidArgument, "stride must be >= 1");
  write_csv_preamble(out, meta);
  out << "n,y_n,x_n,term,S_n,harmonic_bound\n";
  const std::uint64_t last = seq.size();
  for_each_partial_sum(seq, [&](std::uint64_t n, double y, double x, double term, double s,
                                double h) {
    if (n != 1 && n % stride != 0 && n != last) return;
    out << n << ',' << format_double(y) << ',' << format_double(x) << ','
        << format_double(term) << ',' << format_double(s) << ',' << format_double(h) << '\n';
  });
}

}  // namespace hypt
