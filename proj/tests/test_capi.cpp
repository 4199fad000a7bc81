// Exercises the shared library strictly through its C header.
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "hypt/hypt.h"

namespace {

struct MapHandle {
  hypt_map* p = nullptr;
  explicit MapHandle(const char* spec) { EXPECT_EQ(hypt_map_create(spec, &p), HYPT_OK); }
  ~MapHandle() { hypt_map_free(p); }
};

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  hypt_string_free(s);
  return out;
}

TEST(CApi, Version) { EXPECT_STREQ(hypt_version(), "0.1.0"); }

TEST(CApi, UnknownMap) {
  hypt_map* m = nullptr;
  EXPECT_EQ(hypt_map_create("tent", &m), HYPT_UNKNOWN_MAP);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(hypt_last_error()).find("tent"), std::string::npos);
  EXPECT_EQ(hypt_map_create(nullptr, &m), HYPT_INVALID_ARGUMENT);
}

TEST(CApi, EvalAndDerivative) {
  MapHandle m("circle-intermittent");
  double y = 1.0;
  ASSERT_EQ(hypt_map_eval(m.p, 0.25, &y), HYPT_OK);
  EXPECT_EQ(y, 0.0);
  ASSERT_EQ(hypt_map_log_inv_deriv(m.p, 0.25, &y), HYPT_OK);
  EXPECT_DOUBLE_EQ(y, -std::log(2.0));
  hypt_params p{};
  ASSERT_EQ(hypt_map_default_params(m.p, &p), HYPT_OK);
  EXPECT_DOUBLE_EQ(p.sigma, std::exp(-0.25));
  EXPECT_EQ(p.delta, 0.1);
  EXPECT_EQ(p.b, 0.25);
}

TEST(CApi, ParamValidationCitesConstraint) {
  MapHandle m("circle-intermittent");
  hypt_params p{0.7, 0.1, 0.6};
  EXPECT_EQ(hypt_params_validate(m.p, &p), HYPT_INVALID_ARGUMENT);
  EXPECT_NE(std::string(hypt_last_error()).find("min{1/2, 1/(4*beta)}"), std::string::npos);
  p = {1.5, 0.1, 0.25};
  EXPECT_EQ(hypt_params_validate(m.p, &p), HYPT_INVALID_ARGUMENT);
  EXPECT_NE(std::string(hypt_last_error()).find("0 < sigma < 1"), std::string::npos);
  p = {0.5, 0.1, 0.25};
  EXPECT_EQ(hypt_params_validate(m.p, &p), HYPT_OK);
}

TEST(CApi, DetectDoubling) {
  MapHandle m("doubling");
  hypt_trace* t = nullptr;
  ASSERT_EQ(hypt_trace_generate(m.p, 0.3, 100, 0.1, &t), HYPT_OK);
  EXPECT_EQ(hypt_trace_length(t), 100u);
  EXPECT_EQ(hypt_trace_censored_at(t), -1);
  hypt_params p{0.5, 0.1, 0.25};
  hypt_record* r = nullptr;
  ASSERT_EQ(hypt_detect(t, &p, &r), HYPT_OK);
  EXPECT_EQ(hypt_record_count(r), 100u);
  std::vector<uint64_t> times(10);
  EXPECT_EQ(hypt_record_times(r, times.data(), times.size()), 100u);
  EXPECT_EQ(times[9], 10u);
  int censored = -1;
  EXPECT_EQ(hypt_record_first(r, &censored), 1u);
  EXPECT_EQ(censored, 0);
  EXPECT_EQ(hypt_record_frequency(r, 100), 1.0);

  char* csv = nullptr;
  ASSERT_EQ(hypt_trace_csv(t, r, "simulate", nullptr, &csv), HYPT_OK);
  EXPECT_NE(take(csv).find("step,x,log_inv,neglog_dist,is_hyperbolic"), std::string::npos);
  char* js = nullptr;
  ASSERT_EQ(hypt_record_json(r, "simulate", "{\"n\":100}", &js), HYPT_OK);
  EXPECT_NE(take(js).find("\"times_rle\""), std::string::npos);

  hypt_record_free(r);
  hypt_trace_free(t);
}

TEST(CApi, CensoredTrace) {
  MapHandle m("circle-intermittent");
  hypt_trace* t = nullptr;
  ASSERT_EQ(hypt_trace_generate(m.p, 0.25, 10, 0.1, &t), HYPT_OK);
  EXPECT_EQ(hypt_trace_censored_at(t), 1);
  hypt_trace_free(t);
  EXPECT_EQ(hypt_trace_generate(m.p, 0.3, 0, 0.1, &t), HYPT_INVALID_ARGUMENT);
}

TEST(CApi, Ensemble) {
  hypt_ensemble_config c{"doubling", {0.5, 0.1, 0.25}, 200, 50, 1, 2};
  hypt_report* r = nullptr;
  ASSERT_EQ(hypt_ensemble_run(&c, &r), HYPT_OK);
  double mean = 0.0;
  ASSERT_EQ(hypt_report_truncated_mean(r, 100, &mean), HYPT_OK);
  EXPECT_EQ(mean, 1.0);
  EXPECT_EQ(hypt_report_truncated_mean(r, 12345, &mean), HYPT_OUT_OF_RANGE);
  char* s = nullptr;
  ASSERT_EQ(hypt_report_histogram_csv(r, "ensemble", nullptr, &s), HYPT_OK);
  EXPECT_NE(take(s).find("\n1,50,1\n"), std::string::npos);
  ASSERT_EQ(hypt_report_tail_csv(r, "ensemble", nullptr, &s), HYPT_OK);
  EXPECT_NE(take(s).find("n,count,fraction,n_times_fraction"), std::string::npos);
  ASSERT_EQ(hypt_report_json(r, "ensemble", nullptr, &s), HYPT_OK);
  EXPECT_NE(take(s).find("\"seed\": 1"), std::string::npos);
  hypt_report_free(r);

  c.map = "nope";
  EXPECT_EQ(hypt_ensemble_run(&c, &r), HYPT_UNKNOWN_MAP);
}

TEST(CApi, Recurrence) {
  hypt_recurrence_summary s{};
  ASSERT_EQ(hypt_recurrence_run(0.25, 10000, &s), HYPT_OK);
  EXPECT_TRUE(s.induction_holds);
  EXPECT_TRUE(s.termwise_bound_holds);
  EXPECT_TRUE(s.dominates_harmonic);
  EXPECT_TRUE(s.monotone);
  EXPECT_LE(s.rational_max_rel_error, 1e-12);
  EXPECT_LE(s.quad_rel_error, 1e-12);
  EXPECT_EQ(hypt_recurrence_run(0.75, 10, &s), HYPT_INVALID_ARGUMENT);
  EXPECT_NE(std::string(hypt_last_error()).find("(0, 1/2)"), std::string::npos);

  char* csv = nullptr;
  ASSERT_EQ(hypt_recurrence_csv(0.25, 10, 1, "recurrence", nullptr, &csv), HYPT_OK);
  const std::string text = take(csv);
  EXPECT_NE(text.find("\n1,0.75,0.25,0.140625,0.140625,0.0625\n"), std::string::npos);
  ASSERT_EQ(hypt_recurrence_table_csv(0.25, 100, &csv), HYPT_OK);
  EXPECT_FALSE(take(csv).empty());
}

TEST(CApi, Integral) {
  MapHandle m("circle-intermittent");
  hypt_integral r{};
  ASSERT_EQ(hypt_integral_log_dist(m.p, 1.0, 1.0, &r), HYPT_OK);
  EXPECT_NEAR(r.value, 1.0 + std::log(2.0), 1e-6);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(hypt_integral_log_dist(m.p, 0.5, 1.0, &r), HYPT_INVALID_ARGUMENT);
}

TEST(CApi, VerifySubset) {
  ASSERT_EQ(hypt_criterion_count(), 10u);
  EXPECT_STREQ(hypt_criterion_name(2), "oracle-equivalence");
  hypt_verify* v = nullptr;
  ASSERT_EQ(hypt_verify_run("empty,quadrature", 1, 0, 0, &v), HYPT_OK);
  ASSERT_EQ(hypt_verify_count(v), 2u);
  EXPECT_EQ(hypt_verify_id(v, 0), 4);
  EXPECT_STREQ(hypt_verify_name(v, 1), "quadrature");
  EXPECT_TRUE(hypt_verify_passed(v, 0)) << hypt_verify_detail(v, 0);
  EXPECT_TRUE(hypt_verify_passed(v, 1)) << hypt_verify_detail(v, 1);
  EXPECT_GE(hypt_verify_seconds(v, 0), 0.0);
  hypt_verify_free(v);
  EXPECT_EQ(hypt_verify_run("no-such-criterion", 1, 0, 0, &v), HYPT_INVALID_ARGUMENT);
}

TEST(CApi, PerturbedDetectorFailsOracleCriterion) {
  hypt_verify* v = nullptr;
  ASSERT_EQ(hypt_verify_run("oracle", 1, 0, 1, &v), HYPT_OK);
  ASSERT_EQ(hypt_verify_count(v), 1u);
  EXPECT_FALSE(hypt_verify_passed(v, 0));
  hypt_verify_free(v);
}

}  // namespace
