#include "hypt/recurrence.hpp"

#include <gmpxx.h>
#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypt/error.hpp"

namespace hypt {

GapSequence iterate_gap(double y1, std::uint64_t n) {
  require(y1 > 0.0 && y1 < 1.0, ErrorCode::kInvalidArgument,
          "gap recurrence needs y1 = 1 - x1 in (0, 1)");
  require(n >= 1, ErrorCode::kInvalidArgument, "gap recurrence needs N >= 1");
  std::vector<double> y(n);
  y[0] = y1;
  for (std::uint64_t i = 1; i < n; ++i) {
    const double g = y[i - 1];
    y[i] = g - 0.25 * g * g;
  }
  return GapSequence(y1, std::move(y));
}

InductionReport check_induction_bound(const GapSequence& seq) {
  require(seq.y1() >= 0.5, ErrorCode::kInvalidArgument,
          "the induction bound is stated for x1 <= 1/2, i.e. y1 >= 1/2");
  InductionReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 1; n <= seq.size(); ++n) {
    const double slack = 2.0 * static_cast<double>(n) * seq.y(n) - 1.0;
    if (slack < report.min_slack) {
      report.min_slack = slack;
      report.min_slack_n = n;
    }
    if (slack < 0.0 && report.holds) {
      report.holds = false;
      report.first_violation = n;
    }
  }
  return report;
}

bool induction_step_inequality(std::uint64_t n) {
  if (n == 0) return false;
  const unsigned __int128 m = n;
  return 8 * m * m + 7 * m - 1 > 8 * m * m;
}

DivergenceReport partial_sum_divergence(const GapSequence& seq) {
  DivergenceReport report;
  const std::uint64_t last = seq.size();
  const std::uint64_t tenth = last / 10;
  double sum_at_tenth = 0.0;
  double previous = -std::numeric_limits<double>::infinity();
  std::uint64_t next_decade = 10;

  for_each_partial_sum(seq, [&](std::uint64_t n, double, double, double term, double s,
                                double h) {
    const double nd = static_cast<double>(n);
    if (term < 1.0 / (16.0 * nd) && report.termwise_bound_holds) {
      report.termwise_bound_holds = false;
      report.first_term_violation = n;
    }
    if (s < h) report.dominates_harmonic = false;
    if (!(s > previous)) report.monotone = false;
    previous = s;
    if (n == tenth) sum_at_tenth = s;

    const bool decade = n == next_decade;
    if (decade) next_decade *= 10;
    if (decade || n == last) {
      report.table.push_back({n, s, h, n > 1 ? s / std::log(nd) : 0.0});
    }
  });

  report.final_sum = report.table.back().partial_sum;
  report.final_ratio_to_log = report.table.back().ratio_to_log;
  if (tenth >= 1) {
    report.top_decade_slope = (report.final_sum - sum_at_tenth) / std::numbers::ln10;
  }
  return report;
}

namespace {

// y = num / 2^exp, exact.
struct Dyadic {
  mpz_class num;
  mp_bitcnt_t exp = 0;
};

Dyadic dyadic_from_double(double y) {
  int e = 0;
  const double m = std::frexp(y, &e);  // y = m 2^e, m in [1/2, 1)
  Dyadic d;
  d.num = mpz_class(std::ldexp(m, 53));  // integer-valued
  const long shift = 53 - e;
  // y in (0, 1) so the scale is positive.
  d.exp = static_cast<mp_bitcnt_t>(shift);
  return d;
}

// |a - b| / b with a a double and b = num / 2^exp.
double relative_error(double a, const mpz_class& num, mp_bitcnt_t exp) {
  const mp_bitcnt_t prec = 256;
  mpf_class exact(num, prec);
  mpf_div_2exp(exact.get_mpf_t(), exact.get_mpf_t(), exp);
  mpf_class approx(a, prec);
  mpf_class diff(approx - exact, prec);
  mpf_class rel(abs(diff) / exact, prec);
  return rel.get_d();
}

}  // namespace

ExactCheckReport rational_spot_check(double y1, std::uint64_t exact_limit,
                                     std::uint64_t enclosure_limit,
                                     unsigned precision_bits) {
  require(y1 > 0.0 && y1 < 1.0, ErrorCode::kInvalidArgument,
          "gap recurrence needs y1 = 1 - x1 in (0, 1)");
  require(precision_bits >= 64, ErrorCode::kInvalidArgument,
          "enclosure precision must be at least 64 bits");
  const std::uint64_t limit = std::max(exact_limit, enclosure_limit);
  const GapSequence seq = iterate_gap(y1, std::max<std::uint64_t>(limit, 1));
  ExactCheckReport report;

  // Exact: y' = y - y^2/4 = (N 2^{E+2} - N^2) / 2^{2E+2}. The bit length of
  // the numerator doubles every step.
  Dyadic y = dyadic_from_double(y1);
  for (std::uint64_t n = 1; n <= exact_limit; ++n) {
    if (n > 1) {
      mpz_class shifted;
      mpz_mul_2exp(shifted.get_mpz_t(), y.num.get_mpz_t(), y.exp + 2);
      y.num = shifted - y.num * y.num;
      y.exp = 2 * y.exp + 2;
    }
    report.max_rel_error_exact =
        std::max(report.max_rel_error_exact, relative_error(seq.y(n), y.num, y.exp));
    ++report.exact_steps;
  }

  // Enclosure: lo and hi are kept as integers over 2^P. The step map is
  // increasing on (0, 2), so rounding lo down and hi up keeps the bracket valid.
  const mp_bitcnt_t p = precision_bits;
  const Dyadic start = dyadic_from_double(y1);
  mpz_class lo;
  mpz_mul_2exp(lo.get_mpz_t(), start.num.get_mpz_t(), p - start.exp);
  mpz_class hi = lo;
  for (std::uint64_t n = 1; n <= enclosure_limit; ++n) {
    if (n > 1) {
      for (mpz_class* bound : {&lo, &hi}) {
        mpz_class shifted;
        mpz_mul_2exp(shifted.get_mpz_t(), bound->get_mpz_t(), p + 2);
        mpz_class num = shifted - (*bound) * (*bound);
        if (bound == &lo) {
          mpz_fdiv_q_2exp(bound->get_mpz_t(), num.get_mpz_t(), p + 2);
        } else {
          mpz_cdiv_q_2exp(bound->get_mpz_t(), num.get_mpz_t(), p + 2);
        }
      }
    }
    if (n <= exact_limit) continue;
    const double err = std::max(relative_error(seq.y(n), lo, p),
                                relative_error(seq.y(n), hi, p));
    report.max_rel_error_enclosure = std::max(report.max_rel_error_enclosure, err);
    mpz_class width = hi - lo;
    mpf_class rel_width(width, 256);
    rel_width /= mpf_class(lo, 256);
    report.max_enclosure_width = std::max(report.max_enclosure_width, rel_width.get_d());
    ++report.enclosure_steps;
  }
  return report;
}

std::vector<QuadCheckRow> quad_spot_check(double y1, const std::vector<std::uint64_t>& at) {
  require(!at.empty(), ErrorCode::kInvalidArgument, "no check points requested");
  const std::uint64_t last = *std::max_element(at.begin(), at.end());
  require(*std::min_element(at.begin(), at.end()) >= 1, ErrorCode::kInvalidArgument,
          "check points are 1-based");
  const GapSequence seq = iterate_gap(y1, last);

  std::vector<__float128> quad(last);
  __float128 y = y1;
  quad[0] = y;
  for (std::uint64_t i = 1; i < last; ++i) {
    y = y - y * y / 4;
    quad[i] = y;
  }

  std::vector<QuadCheckRow> rows;
  rows.reserve(at.size());
  for (const std::uint64_t n : at) {
    const __float128 ref = quad[n - 1];
    const __float128 rel = fabsq((static_cast<__float128>(seq.y(n)) - ref) / ref);
    rows.push_back({n, seq.y(n), static_cast<double>(ref), static_cast<double>(rel)});
  }
  return rows;
}

}  // namespace hypt
