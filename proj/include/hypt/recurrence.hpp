#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypt/compensated_sum.hpp"

namespace hypt {

/// Backward orbit x_{n+1} = (1 + x_n)^2 / 4 under the right inverse branch of
/// the intermittent circle map, stored in the gap variable y_n = 1 - x_n:
///   y_{n+1} = y_n - y_n^2 / 4.
/// Near the fixed point x = 1 the gap form keeps full relative accuracy;
/// evaluating (1 + x)^2/4 - x directly would cancel every significant digit.
class GapSequence {
 public:
  GapSequence(double y1, std::vector<double> gaps) : y1_(y1), y_(std::move(gaps)) {}

  std::uint64_t size() const noexcept { return y_.size(); }
  /// y_n, 1-based.
  double y(std::uint64_t n) const { return y_.at(n - 1); }
  double x(std::uint64_t n) const { return 1.0 - y(n); }
  /// x_{n+1} - x_n = y_n^2 / 4.
  double increment(std::uint64_t n) const {
    const double g = y(n);
    return 0.25 * g * g;
  }
  const std::vector<double>& gaps() const noexcept { return y_; }
  double y1() const noexcept { return y1_; }

 private:
  double y1_;
  std::vector<double> y_;
};

/// y_1..y_N from y_1 in (0, 1).
GapSequence iterate_gap(double y1, std::uint64_t n);

struct InductionReport {
  bool holds = true;
  double min_slack = 0.0;          // min_n (2 n y_n - 1)
  std::uint64_t min_slack_n = 0;
  std::uint64_t first_violation = 0;  // 0 if none
};

/// Checks 0 <= x_n <= 1 - 1/(2n), i.e. y_n >= 1/(2n), for every n in the
/// sequence. Requires y_1 >= 1/2.
InductionReport check_induction_bound(const GapSequence& seq);

/// (8n^2 + 7n - 1) / (8n^2) > 1, evaluated exactly in integers.
bool induction_step_inequality(std::uint64_t n);

struct PartialSumRow {
  std::uint64_t n = 0;
  double partial_sum = 0.0;    // S_n = sum_{m<=n} m (x_{m+1} - x_m)
  double harmonic_bound = 0.0; // H_n / 16
  double ratio_to_log = 0.0;   // S_n / ln n (0 at n = 1)
};

struct DivergenceReport {
  std::vector<PartialSumRow> table;  // at n = 10, 100, ..., and the last n
  bool termwise_bound_holds = true;  // m (x_{m+1} - x_m) >= 1/(16 m) for all m
  std::uint64_t first_term_violation = 0;
  bool dominates_harmonic = true;    // S_n >= H_n / 16 for all n
  bool monotone = true;              // S_n strictly increasing
  double final_sum = 0.0;
  double final_ratio_to_log = 0.0;
  double top_decade_slope = 0.0;     // (S_N - S_{N/10}) / ln 10
};

/// Partial sums of n (x_{n+1} - x_n) against the harmonic lower bound H_n/16
/// that the gap bound x_{n+1} - x_n >= 1/(16 n^2) implies.
DivergenceReport partial_sum_divergence(const GapSequence& seq);

/// Calls visitor(n, y_n, x_n, term_n, S_n, H_n/16) for n = 1..N in order.
template <typename Visitor>
void for_each_partial_sum(const GapSequence& seq, Visitor&& visitor);

struct ExactCheckReport {
  std::uint64_t exact_steps = 0;      // steps compared against exact rationals
  std::uint64_t enclosure_steps = 0;  // steps compared against rational enclosures
  double max_rel_error_exact = 0.0;
  double max_rel_error_enclosure = 0.0;
  double max_enclosure_width = 0.0;   // relative width of the certified bracket
};

/// Compares the double iteration with exact rational arithmetic. Every double
/// is a dyadic rational, so y_1 is taken exactly; y_n is then computed exactly
/// with GMP for n <= exact_limit (numerators grow like 2^(n+1) bits) and, up
/// to n <= enclosure_limit, bracketed by lower/upper dyadic rationals with
/// `precision_bits` bits rounded outward (y -> y - y^2/4 is increasing on
/// (0, 2), so the bracket is certified).
ExactCheckReport rational_spot_check(double y1, std::uint64_t exact_limit,
                                     std::uint64_t enclosure_limit,
                                     unsigned precision_bits = 512);

struct QuadCheckRow {
  std::uint64_t n = 0;
  double y_double = 0.0;
  double y_quad = 0.0;  // __float128 iteration rounded to double
  double rel_error = 0.0;
};

/// Relative deviation between the double and __float128 iterations at the
/// requested n.
std::vector<QuadCheckRow> quad_spot_check(double y1, const std::vector<std::uint64_t>& at);

// ---------------------------------------------------------------------------

template <typename Visitor>
void for_each_partial_sum(const GapSequence& seq, Visitor&& visitor) {
  CompensatedSum sum;
  CompensatedSum harmonic;
  for (std::uint64_t n = 1; n <= seq.size(); ++n) {
    const double nd = static_cast<double>(n);
    const double term = nd * seq.increment(n);
    sum.add(term);
    harmonic.add(1.0 / (16.0 * nd));
    visitor(n, seq.y(n), seq.x(n), term, sum.value(), harmonic.value());
  }
}

}  // namespace hypt
