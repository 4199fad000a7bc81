#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "hypt/detector.hpp"
#include "hypt/ergodic_stats.hpp"
#include "hypt/recurrence.hpp"

namespace hypt {

/// Provenance stamped on every artifact: tool version, the command that
/// produced it and a digest of its canonical configuration.
struct ArtifactMeta {
  std::string command;
  std::string config_json;  // canonical (sorted keys, compact) config document

  std::string digest() const;
};

std::string tool_version();

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest decimal that round-trips to the same double; "inf", "-inf", "nan"
/// for non-finite values.
std::string format_double(double v);

/// "# key: value" comment lines for CSV headers.
void write_csv_preamble(std::ostream& out, const ArtifactMeta& meta);

/// step, x, log_inv, neglog_dist, is_hyperbolic. A censored trace is noted in
/// the preamble.
void write_trace_csv(std::ostream& out, const OrbitTrace& trace,
                     const HyperbolicTimeRecord& record, const ArtifactMeta& meta);

/// Params, times as [start, length] runs, first time and frequency samples at
/// N = 10^2, 10^3, ... up to the horizon (and at the horizon).
std::string record_json(const HyperbolicTimeRecord& record, const ArtifactMeta& meta);

/// Config, seed, histogram summary, truncated means, tail table, Birkhoff
/// summaries, frequency quantiles and the tail diagnostic. Per-orbit data is
/// not included.
std::string ensemble_json(const EnsembleReport& report, const TailDiagnostic& tail,
                          const ArtifactMeta& meta);

/// k, count, fraction for k = 1..horizon with nonzero count, then ">N".
void write_histogram_csv(std::ostream& out, const FirstTimeStats& stats,
                         const ArtifactMeta& meta);

/// n, count, fraction (empirical P(h > n)), n_times_fraction.
void write_tail_csv(std::ostream& out, const FirstTimeStats& stats, const ArtifactMeta& meta);

/// n, y_n, x_n, term, S_n, harmonic_bound. Rows n = 1, every multiple of
/// stride, and the last n.
void write_recurrence_csv(std::ostream& out, const GapSequence& seq, std::uint64_t stride,
                          const ArtifactMeta& meta);

}  // namespace hypt
