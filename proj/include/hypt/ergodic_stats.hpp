#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypt/counter_rng.hpp"
#include "hypt/detector.hpp"
#include "hypt/map_models.hpp"

namespace hypt {

enum class ObservableKind { kLogInvDeriv, kNegLogDistDelta };

struct Observable {
  ObservableKind kind = ObservableKind::kLogInvDeriv;
  double delta = 0.0;  // only for kNegLogDistDelta

  std::string name() const;
};

struct BirkhoffAverage {
  double value = 0.0;
  std::uint64_t samples = 0;
  bool censored = false;  // the trace hit S; averaged over the uncensored prefix
};

/// (1/n) sum_{j<n} phi(x_j) over the evaluable prefix of the trace, with
/// compensated summation. The truncated-distance observable is recomputed
/// from the points with the requested delta.
BirkhoffAverage birkhoff_average(const MapModel& map, const OrbitTrace& trace,
                                 const Observable& observable);

/// (1/n) sum_{j<n} -log dist_delta(x_j, S).
BirkhoffAverage slow_recurrence_average(const MapModel& map, const OrbitTrace& trace,
                                        double delta);

struct EnsembleConfig {
  std::string map_name;
  HyperbolicParams params;
  std::uint64_t orbit_length = 0;  // N
  std::uint64_t ensemble_size = 0; // M
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = hardware concurrency
  std::uint64_t batches = 20;

  void validate() const;
};

/// Per-orbit outcome kept by run_ensemble.
struct OrbitSummary {
  double x0 = 0.0;
  FirstTime first;
  std::uint64_t time_count = 0;
  double frequency = 0.0;           // l/N
  double birkhoff_log_inv = 0.0;    // over the evaluable prefix
  double birkhoff_neglog_dist = 0.0;
  double point_before_first = 0.0;  // x_{h-1} when h was detected
  bool censored_at_singularity = false;
};

struct ObservableSummary {
  std::string name;
  std::uint64_t count = 0;  // orbits contributing
  double mean = 0.0;
  double variance = 0.0;        // sample variance of the orbit averages
  double standard_error = 0.0;  // sqrt(variance / count)
  double median_of_batches = 0.0;
  std::vector<double> batch_means;
};

struct TruncatedMean {
  std::uint64_t cap = 0;
  double mean = 0.0;  // (1/M) sum min(h, cap)
};

struct TailPoint {
  std::uint64_t n = 0;
  std::uint64_t count = 0;  // #{h > n}
  double fraction = 0.0;    // count / M
};

/// h-statistics derived from first hyperbolic times alone.
struct FirstTimeStats {
  std::uint64_t horizon = 0;
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> histogram;  // histogram[k] = #{h = k}, k = 1..horizon
  std::uint64_t censored = 0;            // #{h > horizon}
  std::vector<TruncatedMean> truncated_means;
  std::vector<TailPoint> tail;

  double fraction(std::uint64_t k) const;
  double censored_fraction() const;
};

/// Builds the histogram, truncated means min(h, cap) for caps on a
/// 10-per-decade log grid up to the horizon (decades and the horizon itself
/// included), and the empirical survival function P(h > n) on the same grid.
/// A censored h counts as "> horizon".
FirstTimeStats summarize_first_times(std::span<const FirstTime> first_times,
                                     std::uint64_t horizon);

struct EnsembleReport {
  EnsembleConfig config;
  FirstTimeStats first_times;
  std::uint64_t censored_at_singularity = 0;
  ObservableSummary birkhoff_log_inv;
  ObservableSummary birkhoff_neglog_dist;
  std::vector<std::pair<double, double>> frequency_quantiles;  // (q, value)
  std::vector<OrbitSummary> orbits;

  double truncated_mean(std::uint64_t cap) const;
};

/// Samples M initial points from normalized Lebesgue measure on the map's
/// domain (orbit i uses RNG substream (seed, i)), runs the streaming detector
/// on each orbit and aggregates. Orbits are distributed over worker threads;
/// aggregation runs in orbit order, so the report does not depend on the
/// worker count.
EnsembleReport run_ensemble(const EnsembleConfig& config);
EnsembleReport run_ensemble(const MapModel& map, const EnsembleConfig& config);

/// Uniform draw from the domain that avoids S.
double sample_lebesgue(const MapModel& map, CounterRng& rng);

enum class TailClass { kIntegrableLike, kNonIntegrableLike, kInconclusive };

std::string to_string(TailClass c);

struct TailDiagnostic {
  TailClass classification = TailClass::kInconclusive;
  std::string reason;
  double slope = 0.0;              // least-squares d T(cap) / d ln(cap), top two decades
  double top_decade_slope = 0.0;   // (T(N) - T(N/10)) / ln 10
  double prev_decade_slope = 0.0;  // (T(N/10) - T(N/100)) / ln 10
  double relative_increment = 0.0; // (T(N) - T(N/10)) / T(N/10)
  double min_n_tail = 0.0;         // min of n P(h > n) over n in [N/10, N]
  double max_n_tail = 0.0;
  double tail_exponent = 0.0;      // -d log P(h>n) / d log n, top decade (informational)
};

/// Decides whether the truncated mean of h keeps growing with the cap.
///
/// With T(c) = E min(h, c), dT/d ln c = c P(h > c): for an integrable h this
/// decays to zero, for a 1/n tail it settles at a positive constant. The
/// classifier compares the slope over the top decade with the slope over the
/// decade before it and with the size of T itself:
///   - top-decade slope below 1e-3 T(N): integrable-like;
///   - top-decade slope at least half the previous one: non-integrable-like;
///   - otherwise integrable-like (slope decaying by more than 2x per decade).
/// Needs two full decades below the horizon (N >= 100); otherwise inconclusive.
TailDiagnostic tail_growth_diagnostic(const FirstTimeStats& stats);

/// |sum_i 1/|f'(g_i(x))| - 1|: the defect of the transfer operator on the
/// constant density at x.
double transfer_identity_check(const MapModel& map, double x);

struct DensityHistogram {
  std::uint64_t iterations = 0;
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> counts;
  double expected = 0.0;   // M / bins
  double max_abs_z = 0.0;  // max over bins of |count - expected| / sqrt(M p (1 - p))
  double chi_square = 0.0;
};

/// Histogram of f^j applied to M Lebesgue-random points. Points are drawn
/// with 64 random bits and iterated in extended precision so that j-fold
/// expansion does not exhaust the random mantissa bits.
DensityHistogram pushforward_density_probe(const MapModel& map, std::uint64_t iterations,
                                           std::uint64_t bins, std::uint64_t samples,
                                           std::uint64_t seed);

struct IntegralResult {
  double value = 0.0;           // finest level
  double error_estimate = 0.0;  // |I_L - I_{L-1}|
  double extrapolated = 0.0;    // Aitken delta-squared on the last three levels
  bool converged = false;
  std::vector<std::size_t> levels;
  std::vector<double> level_values;
};

/// Integral of |log dist_delta(x, S)|^p against normalized Lebesgue measure.
/// The domain is split into the half-cells around each point of S (on which
/// dist(x, S) is the distance t to that point); on each the integrand is
/// |log t|^p for t <= delta and 0 beyond, and the singular piece is
/// integrated on a mesh graded with ratio 1/2 toward t = 0. Levels are
/// refined until the relative change is <= tolerance; failure to converge
/// throws ErrorCode::kNotConverged.
IntegralResult integral_log_dist(const MapModel& map, double p, double delta,
                                 std::span<const std::size_t> levels,
                                 double tolerance = 1e-8);
IntegralResult integral_log_dist(const MapModel& map, double p, double delta);

}  // namespace hypt
