#include "hypt/ergodic_stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "hypt/compensated_sum.hpp"
#include "hypt/error.hpp"
#include "hypt/quadrature.hpp"

namespace hypt {

std::string Observable::name() const {
  switch (kind) {
    case ObservableKind::kLogInvDeriv:
      return "log_inv_deriv";
    case ObservableKind::kNegLogDistDelta:
      return "neglog_dist_delta";
  }
  return "unknown";
}

BirkhoffAverage birkhoff_average(const MapModel& map, const OrbitTrace& trace,
                                 const Observable& observable) {
  BirkhoffAverage out;
  out.censored = trace.censored();
  out.samples = trace.length();
  if (out.samples == 0) return out;

  CompensatedSum sum;
  for (std::uint64_t j = 0; j < out.samples; ++j) {
    if (observable.kind == ObservableKind::kLogInvDeriv) {
      sum.add(trace.log_inv[j]);
    } else {
      const double d = map.dist_delta(trace.points[j], observable.delta);
      if (d != 1.0) sum.add(-std::log(d));
    }
  }
  out.value = sum.value() / static_cast<double>(out.samples);
  return out;
}

BirkhoffAverage slow_recurrence_average(const MapModel& map, const OrbitTrace& trace,
                                        double delta) {
  require(delta > 0.0, ErrorCode::kInvalidArgument, "delta must be > 0");
  return birkhoff_average(map, trace, Observable{ObservableKind::kNegLogDistDelta, delta});
}

void EnsembleConfig::validate() const {
  params.validate();
  require(orbit_length >= 1, ErrorCode::kInvalidArgument, "orbit length N must be >= 1");
  require(ensemble_size >= 1, ErrorCode::kInvalidArgument, "ensemble size M must be >= 1");
  require(batches >= 1, ErrorCode::kInvalidArgument, "batch count must be >= 1");
}

double FirstTimeStats::fraction(std::uint64_t k) const {
  if (k == 0 || k >= histogram.size() || samples == 0) return 0.0;
  return static_cast<double>(histogram[k]) / static_cast<double>(samples);
}

double FirstTimeStats::censored_fraction() const {
  return samples == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(samples);
}

namespace {

std::vector<std::uint64_t> log_grid(std::uint64_t horizon) {
  std::vector<std::uint64_t> grid;
  for (int i = 0;; ++i) {
    const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, i / 10.0)));
    if (n > horizon) break;
    grid.push_back(n);
  }
  grid.push_back(horizon);
  if (horizon >= 10) grid.push_back(horizon / 10);
  if (horizon >= 100) grid.push_back(horizon / 100);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

FirstTimeStats summarize_first_times(std::span<const FirstTime> first_times,
                                     std::uint64_t horizon) {
  require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be >= 1");
  FirstTimeStats stats;
  stats.horizon = horizon;
  stats.samples = first_times.size();
  stats.histogram.assign(horizon + 1, 0);
  for (const FirstTime& h : first_times) {
    if (h.censored || h.value > horizon) {
      ++stats.censored;
    } else {
      ++stats.histogram[h.value];
    }
  }
  if (stats.samples == 0) return stats;

  // survivors[n] = #{h > n}; sum_{n<cap} survivors[n] = sum_i min(h_i, cap).
  std::vector<std::uint64_t> survivors(horizon + 1);
  survivors[0] = stats.samples;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    survivors[n] = survivors[n - 1] - stats.histogram[n];
  }
  const auto m = static_cast<double>(stats.samples);
  std::uint64_t running = 0;
  std::uint64_t next_cap = 0;
  const auto grid = log_grid(horizon);
  for (std::uint64_t n = 0; n < horizon && next_cap < grid.size(); ++n) {
    running += survivors[n];
    while (next_cap < grid.size() && grid[next_cap] == n + 1) {
      stats.truncated_means.push_back({n + 1, static_cast<double>(running) / m});
      ++next_cap;
    }
  }
  for (std::uint64_t n : grid) {
    stats.tail.push_back({n, survivors[n], static_cast<double>(survivors[n]) / m});
  }
  return stats;
}

double EnsembleReport::truncated_mean(std::uint64_t cap) const {
  for (const auto& t : first_times.truncated_means) {
    if (t.cap == cap) return t.mean;
  }
  fail(ErrorCode::kOutOfRange, "no truncated mean recorded at cap " + std::to_string(cap));
}

double sample_lebesgue(const MapModel& map, CounterRng& rng) {
  for (;;) {
    const double x = map.domain().from_unit(rng.uniform());
    if (!map.in_exceptional_set(x)) return x;
  }
}

namespace {

OrbitSummary run_orbit(const MapModel& map, const EnsembleConfig& config, std::uint64_t i) {
  CounterRng rng(config.seed, i);
  OrbitSummary s;
  s.x0 = sample_lebesgue(map, rng);
  const OrbitTrace trace = generate_orbit(map, s.x0, config.orbit_length, config.params.delta);
  const HyperbolicTimeRecord record = hyperbolic_times_stream(trace, config.params);

  s.censored_at_singularity = trace.censored();
  s.first = record.first;
  if (s.first.censored) s.first.value = config.orbit_length;
  s.time_count = record.times.size();
  s.frequency = record.frequency_at(config.orbit_length);
  if (!s.first.censored) s.point_before_first = trace.points[s.first.value - 1];

  const std::uint64_t len = trace.length();
  if (len > 0) {
    CompensatedSum l_sum;
    CompensatedSum d_sum;
    for (std::uint64_t j = 0; j < len; ++j) {
      l_sum.add(trace.log_inv[j]);
      d_sum.add(trace.neglog_dist[j]);
    }
    s.birkhoff_log_inv = l_sum.value() / static_cast<double>(len);
    s.birkhoff_neglog_dist = d_sum.value() / static_cast<double>(len);
  }
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ObservableSummary summarize_observable(std::string name, const std::vector<double>& values,
                                       std::uint64_t batches) {
  ObservableSummary out;
  out.name = std::move(name);
  out.count = values.size();
  if (values.empty()) return out;

  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  out.mean = sum.value() / n;
  if (values.size() > 1) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - out.mean) * (v - out.mean));
    out.variance = sq.value() / (n - 1.0);
  }
  out.standard_error = std::sqrt(out.variance / n);

  const std::uint64_t nb = std::min<std::uint64_t>(batches, values.size());
  for (std::uint64_t b = 0; b < nb; ++b) {
    const std::size_t lo = values.size() * b / nb;
    const std::size_t hi = values.size() * (b + 1) / nb;
    CompensatedSum bs;
    for (std::size_t i = lo; i < hi; ++i) bs.add(values[i]);
    out.batch_means.push_back(bs.value() / static_cast<double>(hi - lo));
  }
  out.median_of_batches = median(out.batch_means);
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

EnsembleReport run_ensemble(const EnsembleConfig& config) {
  const auto map = make_map(config.map_name);
  return run_ensemble(*map, config);
}

EnsembleReport run_ensemble(const MapModel& map, const EnsembleConfig& config) {
  config.validate();
  EnsembleReport report;
  report.config = config;
  report.config.map_name = map.name();
  report.orbits.resize(config.ensemble_size);

  unsigned workers = config.workers == 0 ? std::thread::hardware_concurrency() : config.workers;
  workers = std::max(1U, std::min<unsigned>(
                             workers, static_cast<unsigned>(std::min<std::uint64_t>(
                                          config.ensemble_size, 1024))));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&]() {
    try {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= config.ensemble_size || failed) break;
        report.orbits[i] = run_orbit(map, config, i);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Reduction in orbit order.
  std::vector<FirstTime> firsts;
  std::vector<double> log_inv;
  std::vector<double> neglog;
  std::vector<double> freqs;
  firsts.reserve(report.orbits.size());
  for (const OrbitSummary& s : report.orbits) {
    firsts.push_back(s.first);
    freqs.push_back(s.frequency);
    if (s.censored_at_singularity) {
      ++report.censored_at_singularity;
      continue;
    }
    log_inv.push_back(s.birkhoff_log_inv);
    neglog.push_back(s.birkhoff_neglog_dist);
  }
  report.first_times = summarize_first_times(firsts, config.orbit_length);
  report.birkhoff_log_inv = summarize_observable("log_inv_deriv", log_inv, config.batches);
  report.birkhoff_neglog_dist =
      summarize_observable("neglog_dist_delta", neglog, config.batches);

  std::sort(freqs.begin(), freqs.end());
  for (double q : {0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) {
    report.frequency_quantiles.emplace_back(q, quantile_sorted(freqs, q));
  }
  return report;
}

std::string to_string(TailClass c) {
  switch (c) {
    case TailClass::kIntegrableLike:
      return "integrable-like";
    case TailClass::kNonIntegrableLike:
      return "non-integrable-like";
    case TailClass::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

namespace {

double mean_at(const FirstTimeStats& stats, std::uint64_t cap) {
  for (const auto& t : stats.truncated_means) {
    if (t.cap == cap) return t.mean;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Least-squares slope of ys against xs.
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx == 0.0 ? 0.0 : sxy / sxx;
}

}  // namespace

TailDiagnostic tail_growth_diagnostic(const FirstTimeStats& stats) {
  TailDiagnostic diag;
  const std::uint64_t top = stats.horizon;
  if (top < 100 || stats.samples == 0) {
    diag.reason = "need at least two decades of n below the horizon (N >= 100)";
    return diag;
  }
  const double t_top = mean_at(stats, top);
  const double t_mid = mean_at(stats, top / 10);
  const double t_low = mean_at(stats, top / 100);
  const double ln10 = std::numbers::ln10;
  diag.top_decade_slope = (t_top - t_mid) / ln10;
  diag.prev_decade_slope = (t_mid - t_low) / ln10;
  diag.relative_increment = (t_top - t_mid) / t_mid;

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& t : stats.truncated_means) {
    if (t.cap >= top / 100) {
      xs.push_back(std::log(static_cast<double>(t.cap)));
      ys.push_back(t.mean);
    }
  }
  diag.slope = ls_slope(xs, ys);

  xs.clear();
  ys.clear();
  diag.min_n_tail = std::numeric_limits<double>::infinity();
  diag.max_n_tail = 0.0;
  for (const auto& p : stats.tail) {
    if (p.n < top / 10) continue;
    const double v = static_cast<double>(p.n) * p.fraction;
    diag.min_n_tail = std::min(diag.min_n_tail, v);
    diag.max_n_tail = std::max(diag.max_n_tail, v);
    if (p.count > 0) {
      xs.push_back(std::log(static_cast<double>(p.n)));
      ys.push_back(std::log(p.fraction));
    }
  }
  diag.tail_exponent = -ls_slope(xs, ys);

  if (diag.top_decade_slope < 1e-3 * t_top) {
    diag.classification = TailClass::kIntegrableLike;
    diag.reason = "truncated mean flat over the top decade";
  } else if (diag.top_decade_slope >= 0.5 * diag.prev_decade_slope) {
    diag.classification = TailClass::kNonIntegrableLike;
    diag.reason = "growth per decade of the truncated mean is not decaying";
  } else {
    diag.classification = TailClass::kIntegrableLike;
    diag.reason = "growth per decade of the truncated mean decays by more than half";
  }
  return diag;
}

double transfer_identity_check(const MapModel& map, double x) {
  require(map.branch_count() > 0, ErrorCode::kInvalidArgument,
          "map '" + map.name() + "' exposes no inverse branches");
  CompensatedSum sum;
  for (int i = 0; i < map.branch_count(); ++i) {
    if (!map.in_branch_domain(i, x)) continue;
    sum.add(std::exp(map.log_inv_deriv(map.inverse_branch(i, x))));
  }
  return std::fabs(sum.value() - 1.0);
}

DensityHistogram pushforward_density_probe(const MapModel& map, std::uint64_t iterations,
                                           std::uint64_t bins, std::uint64_t samples,
                                           std::uint64_t seed) {
  require(bins >= 1, ErrorCode::kInvalidArgument, "bins must be >= 1");
  require(samples >= 1, ErrorCode::kInvalidArgument, "sample count must be >= 1");
  DensityHistogram h;
  h.iterations = iterations;
  h.samples = samples;
  h.counts.assign(bins, 0);

  const Domain& dom = map.domain();
  const long double lo = dom.lo;
  const long double len = static_cast<long double>(dom.hi) - lo;
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    long double x = dom.from_unit(rng.uniform_extended());
    for (std::uint64_t j = 0; j < iterations; ++j) x = map.eval_extended(x);
    auto bin = static_cast<std::int64_t>(std::floor((x - lo) / len * static_cast<long double>(bins)));
    bin = std::clamp<std::int64_t>(bin, 0, static_cast<std::int64_t>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }

  const double p = 1.0 / static_cast<double>(bins);
  const double m = static_cast<double>(samples);
  h.expected = m * p;
  const double sd = std::sqrt(m * p * (1.0 - p));
  for (std::uint64_t c : h.counts) {
    const double diff = static_cast<double>(c) - h.expected;
    if (sd > 0.0) h.max_abs_z = std::max(h.max_abs_z, std::fabs(diff) / sd);
    h.chi_square += diff * diff / h.expected;
  }
  return h;
}

namespace {

// Lengths of the half-cells of the Voronoi partition of the domain by S; on a
// half-cell of length l attached to s in S, dist(x, S) = |x - s| runs over [0, l].
std::vector<double> half_cells(const MapModel& map) {
  const Domain& dom = map.domain();
  std::vector<double> s;
  for (double p : map.exceptional_set()) s.push_back(dom.canonical(p));
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());

  std::vector<double> cells;
  if (s.empty()) return cells;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double gap = s[i + 1] - s[i];
    cells.push_back(0.5 * gap);
    cells.push_back(0.5 * gap);
  }
  if (dom.periodic) {
    const double gap = s.front() + dom.length() - s.back();
    cells.push_back(0.5 * gap);
    cells.push_back(0.5 * gap);
  } else {
    cells.push_back(s.front() - dom.lo);
    cells.push_back(dom.hi - s.back());
  }
  return cells;
}

double integrate_level(const std::vector<double>& cells, double p, double delta,
                       std::size_t level, const GaussRule& rule) {
  const auto integrand = [p](double t) { return std::pow(std::fabs(std::log(t)), p); };
  CompensatedSum sum;
  for (double cell : cells) {
    const double c = std::min(delta, cell);
    if (!(c > 0.0)) continue;
    if (c > 1.0) {
      // |log t| has a kink at t = 1.
      sum.add(integrate_graded(integrand, 0.0, 1.0, true, false, level, rule));
      sum.add(integrate_gauss(integrand, 1.0, c, rule));
    } else {
      sum.add(integrate_graded(integrand, 0.0, c, true, false, level, rule));
    }
  }
  return sum.value();
}

constexpr std::size_t kDefaultLevels[] = {8, 16, 24, 32, 40, 48};

}  // namespace

IntegralResult integral_log_dist(const MapModel& map, double p, double delta) {
  return integral_log_dist(map, p, delta, kDefaultLevels);
}

IntegralResult integral_log_dist(const MapModel& map, double p, double delta,
                                 std::span<const std::size_t> levels, double tolerance) {
  require(p >= 1.0, ErrorCode::kInvalidArgument, "moment p must be >= 1");
  require(delta > 0.0, ErrorCode::kInvalidArgument, "delta must be > 0");
  require(levels.size() >= 2, ErrorCode::kInvalidArgument,
          "at least two refinement levels are needed");

  IntegralResult result;
  const std::vector<double> cells = half_cells(map);
  if (cells.empty()) {
    result.converged = true;
    result.levels.assign(levels.begin(), levels.begin() + 2);
    result.level_values = {0.0, 0.0};
    return result;
  }

  const GaussRule rule = gauss_legendre(20);
  const double measure = map.domain().length();
  for (std::size_t level : levels) {
    result.levels.push_back(level);
    result.level_values.push_back(integrate_level(cells, p, delta, level, rule) / measure);
    const std::size_t k = result.level_values.size();
    if (k < 2) continue;
    const double cur = result.level_values[k - 1];
    const double prev = result.level_values[k - 2];
    result.value = cur;
    result.error_estimate = std::fabs(cur - prev);
    result.extrapolated = cur;
    if (k >= 3) {
      const double d1 = result.level_values[k - 2] - result.level_values[k - 3];
      const double d2 = cur - prev;
      if (d2 - d1 != 0.0) result.extrapolated = cur - d2 * d2 / (d2 - d1);
    }
    const double scale = std::max(std::fabs(cur), std::numeric_limits<double>::min());
    if (result.error_estimate <= tolerance * scale) {
      result.converged = true;
      return result;
    }
  }

  std::string trail;
  for (std::size_t i = 0; i < result.levels.size(); ++i) {
    trail += " L=" + std::to_string(result.levels[i]) + ":" +
             std::to_string(result.level_values[i]);
  }
  fail(ErrorCode::kNotConverged,
       "graded quadrature did not reach relative change <= tolerance; levels" + trail);
}

}  // namespace hypt
