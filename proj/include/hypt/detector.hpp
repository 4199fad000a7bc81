#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypt/map_models.hpp"

namespace hypt {

/// A finite orbit x_0, ..., x_len with the two per-step quantities the
/// hyperbolic-time predicate reads:
///   L_j = log||Df(x_j)^{-1}||  and  D_j = -log dist_delta(x_j, S) >= 0.
///
/// If the orbit lands exactly on S at step c the trace stops there: points
/// holds x_0..x_c, L_c and D_c are +infinity, and censored_at == c. Times
/// n <= length() are evaluable in either case.
struct OrbitTrace {
  double x0 = 0.0;
  double delta = 0.0;
  std::uint64_t requested_steps = 0;
  bool has_exceptional_set = true;
  std::vector<double> points;
  std::vector<double> log_inv;
  std::vector<double> neglog_dist;
  std::optional<std::uint64_t> censored_at;

  std::uint64_t length() const noexcept {
    return points.empty() ? 0 : points.size() - 1;
  }
  bool censored() const noexcept { return censored_at.has_value(); }
};

/// Iterates the map N times from x0. Exact hits on S censor the trace.
OrbitTrace generate_orbit(const MapModel& map, double x0, std::uint64_t steps,
                          double delta);

/// Trace from raw per-step samples (L_j, D_j), j < size; points are left as
/// step indices. Used for synthetic traces and suffix traces.
OrbitTrace trace_from_samples(std::span<const double> log_inv,
                              std::span<const double> neglog_dist,
                              bool has_exceptional_set = true);

/// The orbit restarted at x_start: samples start..length() of the original.
OrbitTrace suffix_trace(const OrbitTrace& trace, std::uint64_t start);

/// First hyperbolic time, or the horizon when none was found (printed ">N").
struct FirstTime {
  std::uint64_t value = 0;
  bool censored = true;

  std::string to_string() const;
};

struct HyperbolicTimeRecord {
  HyperbolicParams params;
  std::uint64_t horizon = 0;  // largest n that was examined
  std::vector<std::uint64_t> times;
  FirstTime first;

  /// l/N with l = #{times <= N}.
  double frequency_at(std::uint64_t n) const;
  bool contains(std::uint64_t n) const;
};

/// Literal evaluation of both conditions of the predicate at n, for every
/// k = 1..n, in log form:
///   sum_{j=n-k}^{n-1} L_j <= k log sigma   and   D_{n-k} <= b k |log sigma|.
/// With an empty exceptional set only the first condition applies. O(n).
bool is_hyperbolic_time_naive(const OrbitTrace& trace, const HyperbolicParams& params,
                              std::uint64_t n);

/// All hyperbolic times of the trace by calling the naive predicate at every n.
/// O(N^2); kept as the reference oracle for the streaming detector.
HyperbolicTimeRecord hyperbolic_times_naive(const OrbitTrace& trace,
                                            const HyperbolicParams& params);

/// Single left-to-right pass, O(1) work per step.
///
/// With the adjusted Birkhoff sums B_0 = 0, B_n = sum_{j<n} (L_j - log sigma),
/// the window sum over [n-k, n) equals B_n - B_{n-k}, so the derivative
/// condition holds for all k iff B_n <= min_{0<=j<n} B_j: n is a record
/// minimum (a Pliss time) of B. The distance condition at window start
/// j = n-k reads D_j <= b |log sigma| (n - j), i.e. n >= M_j with
/// M_j = j + D_j / (b |log sigma|); for all k it is n >= max_{0<=j<n} M_j.
/// Both sides are running extrema updated once per step.
HyperbolicTimeRecord hyperbolic_times_stream(const OrbitTrace& trace,
                                             const HyperbolicParams& params);

FirstTime first_hyperbolic_time(const HyperbolicTimeRecord& record);

/// Result of pulling a perturbation back along the orbit.
struct ContractionReport {
  bool skipped = false;  // inconclusive: the pulled-back point left a branch domain
  std::string skip_reason;
  std::uint64_t n = 0;
  std::uint64_t checked = 0;     // number of k tested
  std::uint64_t violations = 0;  // k with dist_{n-k} > sigma^{k/2} dist_n
  double worst_ratio = 0.0;      // max over k of dist_{n-k} / (sigma^{k/2} dist_n)
  double distortion = 1.0;       // exp|sum_{j<n} log|f'(x_j)| - log|f'(y_j)||

  bool passed() const noexcept { return !skipped && violations == 0; }
};

/// Backward contraction at a hyperbolic time n.
///
/// The neighbour y is defined through its image: f^n(y) = f^n(x) + offset, and
/// y_{n-k} is obtained by applying to y_{n-k+1} the inverse branch that maps
/// x_{n-k+1} to x_{n-k}. This is the construction of the neighbourhood on
/// which f^n is a diffeomorphism onto a ball around f^n(x); displacements are
/// propagated in difference form so they stay accurate far below the spacing
/// of doubles near x. Checks dist(x_{n-k}, y_{n-k}) <= sigma^{k/2} offset for
/// 1 <= k <= n. Reported as skipped when the map has no branches or the
/// displaced point leaves a branch domain.
ContractionReport check_backward_contraction(const MapModel& map, const OrbitTrace& trace,
                                             const HyperbolicTimeRecord& record,
                                             std::uint64_t n, double offset);

/// Distortion ratio exp|sum_{j<n} (log|f'(x_j)| - log|f'(y_j)|)| for the same
/// pulled-back neighbour; nullopt when the pull-back is inconclusive.
std::optional<double> check_bounded_distortion(const MapModel& map,
                                               const OrbitTrace& trace,
                                               const HyperbolicTimeRecord& record,
                                               std::uint64_t n, double offset);

namespace testing {
/// When enabled the streaming detector silently drops its first detection.
/// Exists only so the verification suite can prove it notices a broken
/// detector.
void set_stream_perturbation(bool enabled) noexcept;
bool stream_perturbation() noexcept;
}  // namespace testing

}  // namespace hypt
