#include <gtest/gtest.h>

#include <cmath>

#include "hypt/error.hpp"
#include "hypt/recurrence.hpp"

namespace hypt {
namespace {

TEST(GapSequence, FirstStep) {
  const auto s = iterate_gap(0.75, 2);
  EXPECT_EQ(s.y(2), 0.609375);
  EXPECT_EQ(s.x(2), 0.390625);  // (1.25)^2 / 4
  EXPECT_EQ(s.x(1), 0.25);
  EXPECT_EQ(s.increment(1), 0.140625);
}

TEST(GapSequence, TinyGapStaysAtFixedPoint) {
  const auto s = iterate_gap(1e-300, 1000);
  for (std::uint64_t n = 1; n <= 1000; ++n) EXPECT_EQ(s.y(n), 1e-300);
  EXPECT_EQ(s.x(1000), 1.0);
}

TEST(GapSequence, RejectsBadInput) {
  EXPECT_THROW(iterate_gap(0.0, 10), Error);
  EXPECT_THROW(iterate_gap(1.0, 10), Error);
  EXPECT_THROW(iterate_gap(0.5, 0), Error);
  EXPECT_THROW(iterate_gap(0.5, 10).y(11), std::out_of_range);
}

TEST(GapSequence, MatchesOriginalRecurrenceEarly) {
  // x_{n+1} = (1 + x_n)^2 / 4 is fine while x is far from 1.
  const auto s = iterate_gap(0.75, 20);
  long double x = 0.25L;
  for (std::uint64_t n = 1; n <= 20; ++n) {
    EXPECT_NEAR(s.x(n), static_cast<double>(x), 1e-15) << n;
    x = (1 + x) * (1 + x) / 4;
  }
}

TEST(GapSequence, StrictlyMonotone) {
  const auto s = iterate_gap(0.75, 100000);
  for (std::uint64_t n = 2; n <= s.size(); ++n) {
    ASSERT_LT(s.y(n), s.y(n - 1));
    ASSERT_GT(s.y(n), 0.0);
  }
}

TEST(GapSequence, ApproachesContinuumLaw) {
  // y' = -y^2/4 gives 1/y = 1/y1 + (n - 1)/4, so n y_n -> 4.
  const auto s = iterate_gap(0.75, 1000000);
  for (const std::uint64_t n : {1000u, 100000u, 1000000u}) {
    const double continuum = 1.0 / (1.0 / 0.75 + (n - 1) / 4.0);
    EXPECT_NEAR(s.y(n) / continuum, 1.0, 20.0 * std::log(n) / n) << n;
  }
  EXPECT_NEAR(1e6 * s.y(1000000), 4.0, 0.2);
}

TEST(Induction, HoldsForAdmissibleSeeds) {
  for (const double x1 : {0.25, 0.49, 0.01}) {
    const auto r = check_induction_bound(iterate_gap(1.0 - x1, 1000000));
    EXPECT_TRUE(r.holds) << x1 << " first violation " << r.first_violation;
    EXPECT_GE(r.min_slack, 0.0);
  }
  const auto r = check_induction_bound(iterate_gap(0.75, 1));
  EXPECT_DOUBLE_EQ(r.min_slack, 0.5);
  EXPECT_EQ(r.min_slack_n, 1u);
}

TEST(Induction, RejectsSmallY1) {
  EXPECT_THROW(check_induction_bound(iterate_gap(0.25, 10)), Error);
}

TEST(Induction, StepInequality) {
  for (std::uint64_t n = 1; n <= 100000; ++n) ASSERT_TRUE(induction_step_inequality(n));
  EXPECT_TRUE(induction_step_inequality(4000000000ULL));
  EXPECT_TRUE(induction_step_inequality(~0ULL));
  EXPECT_FALSE(induction_step_inequality(0));
}

TEST(PartialSums, FirstTermAndBound) {
  const auto s = iterate_gap(0.75, 1000);
  std::uint64_t rows = 0;
  for_each_partial_sum(s, [&](std::uint64_t n, double, double, double term, double sum, double h) {
    if (n == 1) {
      EXPECT_EQ(sum, 0.140625);
      EXPECT_EQ(h, 1.0 / 16.0);
    }
    EXPECT_GE(term, 1.0 / (16.0 * n));
    EXPECT_GE(sum, h);
    ++rows;
  });
  EXPECT_EQ(rows, 1000u);
}

TEST(PartialSums, DivergenceReport) {
  const auto s = iterate_gap(0.75, 1000000);
  const auto r = partial_sum_divergence(s);
  EXPECT_TRUE(r.termwise_bound_holds);
  EXPECT_EQ(r.first_term_violation, 0u);
  EXPECT_TRUE(r.dominates_harmonic);
  EXPECT_TRUE(r.monotone);
  ASSERT_EQ(r.table.size(), 6u);  // 10, ..., 10^6
  EXPECT_EQ(r.table.back().n, 1000000u);
  // Terms behave like 4/n, so each decade adds about 4 ln 10.
  EXPECT_NEAR(r.top_decade_slope, 4.0, 0.05);
  // Terms ~4/n against 1/(16 n): the bound is loose by a factor tending to 64.
  EXPECT_GT(r.final_sum, r.table.back().harmonic_bound * 40.0);
}

TEST(PartialSums, LongDoubleCrossCheck) {
  const std::uint64_t n = 1000000;
  const auto r = partial_sum_divergence(iterate_gap(0.75, n));
  long double y = 0.75L, sum = 0.0L;
  for (std::uint64_t m = 1; m <= n; ++m) {
    sum += m * y * y / 4;
    y -= y * y / 4;
  }
  EXPECT_NEAR(r.final_sum, static_cast<double>(sum), 1e-9 * static_cast<double>(sum));
}

TEST(ExactChecks, RationalAndQuad) {
  const auto ex = rational_spot_check(0.75, 24, 30);
  EXPECT_EQ(ex.exact_steps, 24u);
  EXPECT_EQ(ex.enclosure_steps, 6u);  // n = 25..30
  EXPECT_LE(ex.max_rel_error_exact, 1e-12);
  EXPECT_LE(ex.max_rel_error_enclosure, 1e-12);
  EXPECT_LT(ex.max_enclosure_width, 1e-100);

  const auto q = quad_spot_check(0.75, {1000, 1000000});
  ASSERT_EQ(q.size(), 2u);
  for (const auto& row : q) EXPECT_LE(row.rel_error, 1e-12) << row.n;
  EXPECT_EQ(q[0].n, 1000u);
}

}  // namespace
}  // namespace hypt
