#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hypt/error.hpp"
#include "hypt/map_models.hpp"

namespace hypt {
namespace {

TEST(CirclePoint, CanonicalRepresentative) {
  EXPECT_EQ(CirclePoint(1.0).value(), -1.0);
  EXPECT_EQ(CirclePoint(-1.0).value(), -1.0);
  EXPECT_EQ(CirclePoint(0.5).value(), 0.5);
  EXPECT_DOUBLE_EQ(CirclePoint(1.25).value(), -0.75);
  EXPECT_DOUBLE_EQ(CirclePoint(-1.5).value(), 0.5);
}

TEST(CirclePoint, DistanceIsAMetric) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen), y = u(gen), z = u(gen);
    const double dxy = CirclePoint::distance(x, y);
    EXPECT_EQ(dxy, CirclePoint::distance(y, x));
    EXPECT_LE(dxy, 1.0);
    EXPECT_LE(dxy, CirclePoint::distance(x, z) + CirclePoint::distance(z, y) + 1e-15);
  }
  EXPECT_NEAR(CirclePoint::distance(-0.95, 0.95), 0.1, 1e-15);
}

TEST(CircleMap, EvalExamples) {
  auto m = make_map("circle-intermittent");
  EXPECT_EQ(m->eval(1.0), -1.0);  // 1 ~ -1 is fixed
  EXPECT_EQ(m->eval(-1.0), -1.0);
  EXPECT_EQ(m->eval(0.25), 0.0);
  EXPECT_EQ(m->eval(-0.25), 0.0);
  EXPECT_DOUBLE_EQ(m->eval(0.5), 2.0 * std::sqrt(0.5) - 1.0);
  EXPECT_DOUBLE_EQ(m->eval(-0.5), 1.0 - 2.0 * std::sqrt(0.5));
}

TEST(DoublingMap, EvalExample) {
  auto m = make_map("doubling");
  EXPECT_DOUBLE_EQ(m->eval(0.3), 0.6);
  EXPECT_DOUBLE_EQ(m->eval(0.75), 0.5);
}

TEST(Maps, EvalStaysInCanonicalDomain) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* name : {"circle-intermittent", "doubling", "quadratic(2)", "quadratic(1.5)",
                           "manneville(0.5)"}) {
    auto m = make_map(name);
    for (int i = 0; i < 10000; ++i) {
      const double x = m->domain().from_unit(u(gen));
      const double y = m->eval(x);
      EXPECT_TRUE(m->domain().contains(y)) << name << " x=" << x << " f(x)=" << y;
    }
  }
}

TEST(CircleMap, LogInvDerivExamples) {
  auto m = make_map("circle-intermittent");
  EXPECT_DOUBLE_EQ(m->log_inv_deriv(0.25), -std::log(2.0));
  EXPECT_TRUE(std::isinf(m->log_inv_deriv(0.0)));
  EXPECT_GT(m->log_inv_deriv(0.0), 0.0);
  EXPECT_TRUE(std::isinf(m->log_inv_deriv(-1.0)));
  // Approaching 0 the value is finite and decreasing toward -infinity in |x|
  // ... i.e. L(x) = log|x|/2 goes to -inf, so |f'| blows up.
  EXPECT_LT(m->log_inv_deriv(1e-300), -300.0);
}

TEST(CircleMap, LogInvDerivClosedForm) {
  auto m = make_map("circle-intermittent");
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen);
    if (x == 0.0 || x == -1.0) continue;
    // Generic path: -log|f'(x)| with f'(x) = |x|^{-1/2}.
    const double generic = -std::log(std::pow(std::fabs(x), -0.5));
    EXPECT_NEAR(m->log_inv_deriv(x), 0.5 * std::log(std::fabs(x)), 1e-14);
    EXPECT_NEAR(m->log_inv_deriv(x), generic, 1e-14);
  }
}

TEST(DoublingMap, LogInvDerivConstant) {
  auto m = make_map("doubling");
  for (const double x : {0.0, 0.1, 0.3, 0.999}) {
    EXPECT_EQ(m->log_inv_deriv(x), -std::log(2.0));
  }
}

TEST(CircleMap, DistanceToExceptionalSet) {
  auto m = make_map("circle-intermittent");
  EXPECT_NEAR(m->dist_to_s(0.9), 0.1, 1e-15);
  EXPECT_NEAR(m->dist_to_s(-0.9), 0.1, 1e-15);
  EXPECT_EQ(m->dist_to_s(0.25), 0.25);
  EXPECT_EQ(m->dist_to_s(0.0), 0.0);
  EXPECT_EQ(m->dist_delta(0.25, 0.05), 1.0);
  EXPECT_EQ(m->dist_delta(0.25, 0.3), 0.25);
  EXPECT_EQ(m->dist_delta(0.05, 0.05), 0.05);  // boundary belongs to the near regime
}

TEST(DoublingMap, EmptyExceptionalSet) {
  auto m = make_map("doubling");
  EXPECT_TRUE(m->exceptional_set().empty());
  EXPECT_TRUE(std::isinf(m->dist_to_s(0.3)));
  for (const double delta : {1e-6, 0.1, 10.0}) EXPECT_EQ(m->dist_delta(0.3, delta), 1.0);
}

TEST(Maps, DistDeltaRange) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* name : {"circle-intermittent", "quadratic(2)", "manneville(0.5)"}) {
    auto m = make_map(name);
    for (const double delta : {0.01, 0.1, 0.7}) {
      for (int i = 0; i < 10000; ++i) {
        const double x = m->domain().from_unit(u(gen));
        if (m->in_exceptional_set(x)) continue;
        const double d = m->dist_delta(x, delta);
        EXPECT_TRUE(d == 1.0 || (d > 0.0 && d <= delta)) << name << " x=" << x << " d=" << d;
      }
    }
  }
}

TEST(CircleMap, InverseBranchExamples) {
  auto m = make_map("circle-intermittent");
  EXPECT_EQ(m->inverse_branch(0, 0.0), 0.25);
  EXPECT_EQ(m->inverse_branch(1, 0.0), -0.25);
  EXPECT_EQ(m->inverse_branch(0, 1.0), 1.0);
  EXPECT_EQ(m->inverse_branch(0, -1.0), 0.0);
}

TEST(CircleMap, InverseBranchErrors) {
  auto m = make_map("circle-intermittent");
  try {
    m->inverse_branch(2, 0.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  EXPECT_THROW(m->inverse_branch(-1, 0.0), Error);
  EXPECT_THROW(m->inverse_branch(0, 1.5), Error);
  EXPECT_THROW(m->inverse_branch(1, -1.0001), Error);
}

TEST(CircleMap, InverseBranchesInvertEval) {
  auto m = make_map("circle-intermittent");
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen);
    if (x == -1.0) continue;
    EXPECT_NEAR(m->eval(m->inverse_branch(0, x)), x, 1e-12);
    EXPECT_NEAR(m->eval(m->inverse_branch(1, x)), x, 1e-12);
    EXPECT_EQ(m->branch_of(m->inverse_branch(0, x)) == 0 || m->inverse_branch(0, x) == 0.0, true);
  }
}

TEST(CircleMap, BranchDeltaMatchesDifference) {
  auto m = make_map("circle-intermittent");
  for (const double x : {-0.7, -0.1, 0.2, 0.9}) {
    for (const double dx : {1e-3, -1e-4}) {
      for (int b = 0; b < 2; ++b) {
        const double direct = m->inverse_branch(b, x + dx) - m->inverse_branch(b, x);
        EXPECT_NEAR(m->inverse_branch_delta(b, x, dx), direct, 1e-15);
      }
      const double dl = m->log_inv_deriv(x + dx) - m->log_inv_deriv(x);
      EXPECT_NEAR(m->log_inv_deriv_delta(x, dx), dl, 1e-12);
    }
  }
}

TEST(Registry, ParsesNames) {
  EXPECT_EQ(make_map("circle-intermittent")->name(), "circle-intermittent");
  EXPECT_EQ(make_map("doubling")->name(), "doubling");
  auto q = make_map("quadratic(1.5)");
  EXPECT_DOUBLE_EQ(q->eval(0.5), 1.0 - 1.5 * 0.25);
  ASSERT_EQ(q->exceptional_set().size(), 1u);
  EXPECT_EQ(q->exceptional_set()[0], 0.0);
  EXPECT_NEAR(make_map("manneville(1)")->eval(0.5), 0.75, 1e-15);
  EXPECT_FALSE(registered_maps().empty());
}

TEST(Registry, RejectsUnknown) {
  for (const char* bad : {"tent", "quadratic", "quadratic(x)", "quadratic(3)", "manneville(-1)",
                          "doubling(2)"}) {
    try {
      make_map(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kUnknownMap || e.code() == ErrorCode::kInvalidArgument)
          << bad;
    }
  }
}

TEST(Params, Validation) {
  const NonDegeneracyParams nd{4.0, 0.5};
  EXPECT_NO_THROW((HyperbolicParams{0.7, 0.1, 0.25}.validate_for(nd)));
  EXPECT_THROW((HyperbolicParams{1.0, 0.1, 0.25}.validate()), Error);
  EXPECT_THROW((HyperbolicParams{0.0, 0.1, 0.25}.validate()), Error);
  EXPECT_THROW((HyperbolicParams{0.5, 0.0, 0.25}.validate()), Error);
  EXPECT_THROW((HyperbolicParams{0.5, 0.1, 0.5}.validate_for(nd)), Error);
  // beta = 1: the bound is 1/(4 beta) = 1/4.
  EXPECT_THROW((HyperbolicParams{0.5, 0.1, 0.3}.validate_for({4.0, 1.0})), Error);
  EXPECT_DOUBLE_EQ(max_b(0.5), 0.5);
  EXPECT_DOUBLE_EQ(max_b(1.0), 0.25);
  try {
    HyperbolicParams{0.5, 0.1, 0.6}.validate_for(nd);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("min{1/2, 1/(4*beta)}"), std::string::npos);
  }
  EXPECT_THROW((NonDegeneracyParams{1.0, 0.5}.validate()), Error);
  EXPECT_THROW((NonDegeneracyParams{2.0, 0.0}.validate()), Error);
}

TEST(Params, CircleDefaults) {
  auto m = make_map("circle-intermittent");
  const auto& p = m->default_params();
  EXPECT_DOUBLE_EQ(p.sigma, std::exp(-0.25));
  EXPECT_DOUBLE_EQ(p.delta, 0.1);
  EXPECT_DOUBLE_EQ(p.b, 0.25);
  EXPECT_DOUBLE_EQ(m->nondegeneracy().beta, 0.5);
  EXPECT_DOUBLE_EQ(m->nondegeneracy().B, 4.0);
  EXPECT_NO_THROW(p.validate_for(m->nondegeneracy()));
}

TEST(NonDegeneracy, HandEvaluationAtSmallX) {
  // B = 2, beta = 1/2, x = 0.01: |f'| = 10 <= B dist^-beta = 20 and
  // >= dist^beta / B = 0.05.
  auto m = make_map("circle-intermittent");
  const double x = 0.01;
  const double fprime = std::exp(-m->log_inv_deriv(x));
  const double d = m->dist_to_s(x);
  EXPECT_NEAR(fprime, 10.0, 1e-12);
  EXPECT_LE(fprime, 2.0 * std::pow(d, -0.5));
  EXPECT_GE(fprime, 0.5 * std::pow(d, 0.5));
}

TEST(NonDegeneracy, FirstConditionWithModerateB) {
  auto m = make_map("circle-intermittent");
  const auto r = check_nondegeneracy(*m, {2.0, 0.5}, 20000, 1);
  EXPECT_FALSE(r.vacuous);
  EXPECT_EQ(r.s1.evaluated, 20000u);
  EXPECT_TRUE(r.s1.passed());
  EXPECT_NEAR(r.s1.worst_ratio, 0.5, 1e-12);  // |x|^{-1/2} / (2 |x|^{-1/2}) near 0
}

TEST(NonDegeneracy, FirstConditionHoldsEvenForBNearOne) {
  // With beta = 1/2 the upper bound in (s1) is attained with equality near
  // 0, so any B > 1 passes; (s1) is sensitive to beta rather than B here.
  auto m = make_map("circle-intermittent");
  const auto r = check_nondegeneracy(*m, {1.01, 0.5}, 20000, 1);
  EXPECT_TRUE(r.s1.passed());
  EXPECT_GT(r.s1.worst_ratio, 0.98);
}

TEST(NonDegeneracy, FirstConditionFailsForSmallBeta) {
  // beta = 1/4: |x|^{-1/2} <= B |x|^{-1/4} fails for |x| < B^{-4} = 1/16.
  auto m = make_map("circle-intermittent");
  const auto r = check_nondegeneracy(*m, {2.0, 0.25}, 20000, 1);
  EXPECT_FALSE(r.s1.passed());
  EXPECT_LT(m->dist_to_s(r.s1.worst_x), 1.0 / 16.0);
}

TEST(NonDegeneracy, LipschitzConditionsFailNearZero) {
  // |log|f'(x)| - log|f'(y)|| = |log|x/y||/2 ~ |x - y|/(2|x|), while the
  // bound allows B |x - y| |x|^{-beta} = B |x - y| |x|^{-1/2}: it fails once
  // |x| < 1/(4 B^2), for every B.
  auto m = make_map("circle-intermittent");
  for (const double B : {2.0, 4.0, 100.0}) {
    const auto r = check_nondegeneracy(*m, {B, 0.5}, 20000, 1);
    EXPECT_FALSE(r.s2.passed()) << B;
    EXPECT_LT(m->dist_to_s(r.s2.worst_x), 1.0 / (4.0 * B * B)) << B;
    EXPECT_EQ(r.s3.failed, r.s2.failed);  // one-dimensional: (s3) coincides with (s2)
  }
}

TEST(NonDegeneracy, EmptySetIsVacuous) {
  auto m = make_map("doubling");
  const auto r = check_nondegeneracy(*m, {4.0, 0.5}, 1000, 1);
  EXPECT_TRUE(r.vacuous);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.s1.evaluated, 0u);
}

}  // namespace
}  // namespace hypt
