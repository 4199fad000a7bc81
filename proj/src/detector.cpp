#include "hypt/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "hypt/compensated_sum.hpp"
#include "hypt/error.hpp"

namespace hypt {

namespace {

std::atomic<bool> g_stream_perturbation{false};

double neglog_dist(const MapModel& map, double x, double delta) {
  const double d = map.dist_delta(x, delta);
  return d == 1.0 ? 0.0 : -std::log(d);
}

}  // namespace

namespace testing {
void set_stream_perturbation(bool enabled) noexcept { g_stream_perturbation = enabled; }
bool stream_perturbation() noexcept { return g_stream_perturbation; }
}  // namespace testing

OrbitTrace generate_orbit(const MapModel& map, double x0, std::uint64_t steps,
                          double delta) {
  require(steps >= 1, ErrorCode::kInvalidArgument, "orbit length must be >= 1");
  require(delta > 0.0, ErrorCode::kInvalidArgument, "delta must be > 0");

  OrbitTrace trace;
  trace.x0 = map.domain().canonical(x0);
  trace.delta = delta;
  trace.requested_steps = steps;
  trace.has_exceptional_set = !map.exceptional_set().empty();
  trace.points.reserve(steps + 1);
  trace.log_inv.reserve(steps + 1);
  trace.neglog_dist.reserve(steps + 1);

  double x = trace.x0;
  for (std::uint64_t j = 0;; ++j) {
    trace.points.push_back(x);
    if (map.in_exceptional_set(x)) {
      trace.log_inv.push_back(kInfinity);
      trace.neglog_dist.push_back(kInfinity);
      trace.censored_at = j;
      break;
    }
    trace.log_inv.push_back(map.log_inv_deriv(x));
    trace.neglog_dist.push_back(neglog_dist(map, x, delta));
    if (j == steps) break;
    x = map.eval(x);
  }
  return trace;
}

OrbitTrace trace_from_samples(std::span<const double> log_inv,
                              std::span<const double> neglog_dist,
                              bool has_exceptional_set) {
  require(log_inv.size() == neglog_dist.size(), ErrorCode::kInvalidArgument,
          "log_inv and neglog_dist must have equal length");
  OrbitTrace trace;
  trace.has_exceptional_set = has_exceptional_set;
  trace.requested_steps = log_inv.size();
  trace.delta = 1.0;
  // One extra slot for the end point x_N, whose samples the predicate never reads.
  for (std::size_t j = 0; j <= log_inv.size(); ++j) {
    trace.points.push_back(static_cast<double>(j));
  }
  trace.log_inv.assign(log_inv.begin(), log_inv.end());
  trace.neglog_dist.assign(neglog_dist.begin(), neglog_dist.end());
  trace.log_inv.push_back(0.0);
  trace.neglog_dist.push_back(0.0);
  return trace;
}

OrbitTrace suffix_trace(const OrbitTrace& trace, std::uint64_t start) {
  require(start <= trace.length(), ErrorCode::kOutOfRange,
          "suffix start beyond the end of the trace");
  OrbitTrace out;
  out.x0 = trace.points[start];
  out.delta = trace.delta;
  out.has_exceptional_set = trace.has_exceptional_set;
  out.requested_steps = trace.requested_steps - std::min(start, trace.requested_steps);
  out.points.assign(trace.points.begin() + start, trace.points.end());
  out.log_inv.assign(trace.log_inv.begin() + start, trace.log_inv.end());
  out.neglog_dist.assign(trace.neglog_dist.begin() + start, trace.neglog_dist.end());
  if (trace.censored_at) out.censored_at = *trace.censored_at - start;
  return out;
}

std::string FirstTime::to_string() const {
  return censored ? ">" + std::to_string(value) : std::to_string(value);
}

double HyperbolicTimeRecord::frequency_at(std::uint64_t n) const {
  require(n >= 1, ErrorCode::kInvalidArgument, "frequency_at needs N >= 1");
  const auto count = std::upper_bound(times.begin(), times.end(), n) - times.begin();
  return static_cast<double>(count) / static_cast<double>(n);
}

bool HyperbolicTimeRecord::contains(std::uint64_t n) const {
  return std::binary_search(times.begin(), times.end(), n);
}

bool is_hyperbolic_time_naive(const OrbitTrace& trace, const HyperbolicParams& params,
                              std::uint64_t n) {
  require(n >= 1 && n <= trace.length(), ErrorCode::kOutOfRange,
          "n = " + std::to_string(n) + " outside 1.." + std::to_string(trace.length()));
  const double log_sigma = std::log(params.sigma);
  const double dist_rate = params.b * std::fabs(log_sigma);

  CompensatedSum window;
  for (std::uint64_t k = 1; k <= n; ++k) {
    const std::uint64_t j = n - k;
    window.add(trace.log_inv[j]);
    if (!(window.value() <= static_cast<double>(k) * log_sigma)) return false;
    if (trace.has_exceptional_set &&
        !(trace.neglog_dist[j] <= dist_rate * static_cast<double>(k))) {
      return false;
    }
  }
  return true;
}

HyperbolicTimeRecord hyperbolic_times_naive(const OrbitTrace& trace,
                                            const HyperbolicParams& params) {
  params.validate();
  HyperbolicTimeRecord record;
  record.params = params;
  record.horizon = trace.length();
  for (std::uint64_t n = 1; n <= trace.length(); ++n) {
    if (is_hyperbolic_time_naive(trace, params, n)) record.times.push_back(n);
  }
  record.first = first_hyperbolic_time(record);
  return record;
}

HyperbolicTimeRecord hyperbolic_times_stream(const OrbitTrace& trace,
                                             const HyperbolicParams& params) {
  params.validate();
  HyperbolicTimeRecord record;
  record.params = params;
  record.horizon = trace.length();

  const double log_sigma = std::log(params.sigma);
  const double dist_rate = params.b * std::fabs(log_sigma);
  bool drop_next = testing::stream_perturbation();

  CompensatedSum prefix;       // B_n
  double min_prefix = 0.0;     // min_{0<=j<n} B_j
  double max_deadline = -kInfinity;  // max_{0<=j<n} M_j

  for (std::uint64_t n = 1; n <= trace.length(); ++n) {
    const std::uint64_t j = n - 1;
    prefix.add(trace.log_inv[j] - log_sigma);
    if (trace.has_exceptional_set) {
      max_deadline =
          std::max(max_deadline, static_cast<double>(j) + trace.neglog_dist[j] / dist_rate);
    }
    const double b_n = prefix.value();
    const bool derivative_ok = b_n <= min_prefix;
    const bool distance_ok = !trace.has_exceptional_set || static_cast<double>(n) >= max_deadline;
    if (derivative_ok && distance_ok) {
      if (drop_next) {
        drop_next = false;
      } else {
        record.times.push_back(n);
      }
    }
    min_prefix = std::min(min_prefix, b_n);
  }
  record.first = first_hyperbolic_time(record);
  return record;
}

FirstTime first_hyperbolic_time(const HyperbolicTimeRecord& record) {
  if (record.times.empty()) return FirstTime{record.horizon, true};
  return FirstTime{record.times.front(), false};
}

namespace {

ContractionReport pull_back(const MapModel& map, const OrbitTrace& trace,
                            const HyperbolicTimeRecord& record, std::uint64_t n,
                            double offset) {
  require(record.contains(n), ErrorCode::kInvalidArgument,
          "n = " + std::to_string(n) + " is not a detected hyperbolic time");
  require(n <= trace.length(), ErrorCode::kOutOfRange, "n beyond the end of the trace");

  ContractionReport report;
  report.n = n;
  if (map.branch_count() == 0) {
    report.skipped = true;
    report.skip_reason = "map exposes no inverse branches";
    return report;
  }

  const double log_sigma = std::log(record.params.sigma);
  const double base = std::fabs(offset);
  const double log_base = std::log(base);

  double e = offset;  // y_j - x_j
  CompensatedSum distortion;
  for (std::uint64_t k = 1; k <= n; ++k) {
    const std::uint64_t j = n - k;
    const double x_next = trace.points[j + 1];
    const int branch = map.branch_of(trace.points[j]);
    if (branch < 0) {
      report.skipped = true;
      report.skip_reason = "orbit point outside every branch image at step " + std::to_string(j);
      return report;
    }
    if (!map.in_branch_domain(branch, x_next + e)) {
      report.skipped = true;
      report.skip_reason =
          "displaced point left the domain of branch " + std::to_string(branch) +
          " at step " + std::to_string(j + 1);
      return report;
    }
    e = map.inverse_branch_delta(branch, x_next, e);
    distortion.add(map.log_inv_deriv_delta(trace.points[j], e));

    ++report.checked;
    if (e == 0.0) continue;
    // log of dist_{n-k} / (sigma^{k/2} dist_n)
    const double log_ratio =
        std::log(std::fabs(e)) - (0.5 * static_cast<double>(k) * log_sigma + log_base);
    if (log_ratio > 0.0) ++report.violations;
    report.worst_ratio = std::max(report.worst_ratio, std::exp(log_ratio));
  }
  report.distortion = std::exp(std::fabs(distortion.value()));
  return report;
}

}  // namespace

ContractionReport check_backward_contraction(const MapModel& map, const OrbitTrace& trace,
                                             const HyperbolicTimeRecord& record,
                                             std::uint64_t n, double offset) {
  return pull_back(map, trace, record, n, offset);
}

std::optional<double> check_bounded_distortion(const MapModel& map,
                                               const OrbitTrace& trace,
                                               const HyperbolicTimeRecord& record,
                                               std::uint64_t n, double offset) {
  const ContractionReport report = pull_back(map, trace, record, n, offset);
  if (report.skipped) return std::nullopt;
  return report.distortion;
}

}  // namespace hypt
