#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypt/error.hpp"
#include "hypt/report_io.hpp"

namespace hypt {
namespace {

using nlohmann::json;

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

TEST(Provenance, FnvVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Provenance, DigestFollowsConfig) {
  const ArtifactMeta a{"simulate", R"({"n":10})"};
  const ArtifactMeta b{"simulate", R"({"n":11})"};
  EXPECT_EQ(a.digest(), fnv1a_hex(a.config_json));
  EXPECT_NE(a.digest(), b.digest());
  EXPECT_EQ(tool_version(), "0.1.0");

  std::ostringstream out;
  write_csv_preamble(out, a);
  EXPECT_EQ(out.str(), "# tool: hypt 0.1.0\n# command: simulate\n# config_digest: " +
                           a.digest() + "\n# config: {\"n\":10}\n");
}

TEST(FormatDouble, RoundTripsAndSpecials) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(kInfinity), "inf");
  EXPECT_EQ(format_double(-kInfinity), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(TraceCsv, DoublingAllHyperbolic) {
  auto m = make_map("doubling");
  const auto t = generate_orbit(*m, 0.3, 100, 0.1);
  const auto r = hyperbolic_times_stream(t, {0.5, 0.1, 0.25});
  std::ostringstream out;
  write_trace_csv(out, t, r, {"simulate", "{}"});
  const auto lines = data_lines(out.str());
  ASSERT_EQ(lines.size(), 102u);
  EXPECT_EQ(lines[0], "step,x,log_inv,neglog_dist,is_hyperbolic");
  EXPECT_EQ(lines[1].back(), '0');  // step 0 is never a time
  for (std::size_t i = 2; i < lines.size(); ++i) EXPECT_EQ(lines[i].back(), '1') << lines[i];
  EXPECT_NE(out.str().find("# first_hyperbolic_time: 1\n"), std::string::npos);
  EXPECT_EQ(out.str().find("censored_at_singularity"), std::string::npos);
}

TEST(TraceCsv, CensoredNoted) {
  auto m = make_map("circle-intermittent");
  const auto t = generate_orbit(*m, 0.25, 10, 0.1);
  const auto r = hyperbolic_times_stream(t, m->default_params());
  std::ostringstream out;
  write_trace_csv(out, t, r, {"simulate", "{}"});
  EXPECT_NE(out.str().find("# censored_at_singularity: step 1\n"), std::string::npos);
  const auto lines = data_lines(out.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2], "1,0,inf,inf,1");
}

TEST(RecordJson, RunLengthAndFrequency) {
  HyperbolicTimeRecord r;
  r.params = {0.5, 0.1, 0.25};
  r.horizon = 1000;
  r.times = {1, 2, 3, 7, 9, 10};
  r.first = first_hyperbolic_time(r);
  const auto doc = json::parse(record_json(r, {"simulate", R"({"x0":0.3})"}));
  EXPECT_EQ(doc["times_rle"], json::parse("[[1,3],[7,1],[9,2]]"));
  EXPECT_EQ(doc["time_count"], 6);
  EXPECT_EQ(doc["first"], "1");
  EXPECT_EQ(doc["meta"]["config"]["x0"], 0.3);
  ASSERT_EQ(doc["frequency"].size(), 2u);
  EXPECT_EQ(doc["frequency"][0]["n"], 100);
  EXPECT_DOUBLE_EQ(doc["frequency"][0]["frequency"].get<double>(), 0.06);
  EXPECT_EQ(doc["frequency"][1]["n"], 1000);
}

TEST(EnsembleOutput, HistogramAndTail) {
  std::vector<FirstTime> h = {{1, false}, {1, false}, {5, false}, {100, true}};
  const auto s = summarize_first_times(h, 100);
  std::ostringstream hist, tail;
  write_histogram_csv(hist, s, {"ensemble", "{}"});
  write_tail_csv(tail, s, {"ensemble", "{}"});
  EXPECT_EQ(data_lines(hist.str()),
            (std::vector<std::string>{"k,count,fraction", "1,2,0.5", "5,1,0.25", ">100,1,0.25"}));
  const auto t = data_lines(tail.str());
  EXPECT_EQ(t[0], "n,count,fraction,n_times_fraction");
  EXPECT_EQ(t.back(), "100,1,0.25,25");
}

TEST(EnsembleOutput, JsonFields) {
  EnsembleConfig c;
  c.map_name = "doubling";
  c.params = {0.5, 0.1, 0.25};
  c.orbit_length = 200;
  c.ensemble_size = 20;
  c.seed = 9;
  const auto report = run_ensemble(c);
  const auto doc = json::parse(
      ensemble_json(report, tail_growth_diagnostic(report.first_times), {"ensemble", "{}"}));
  EXPECT_EQ(doc["config"]["seed"], 9);
  EXPECT_EQ(doc["first_time"]["histogram"], json::parse("[[1,20]]"));
  EXPECT_EQ(doc["tail_diagnostic"]["classification"], "integrable-like");
  EXPECT_EQ(doc["meta"]["version"], "0.1.0");
  EXPECT_EQ(doc["birkhoff"].size(), 2u);
}

TEST(RecurrenceCsv, StrideRows) {
  const auto seq = iterate_gap(0.75, 25);
  std::ostringstream out;
  write_recurrence_csv(out, seq, 10, {"recurrence", "{}"});
  const auto lines = data_lines(out.str());
  ASSERT_EQ(lines.size(), 5u);  // header, 1, 10, 20, 25
  EXPECT_EQ(lines[0], "n,y_n,x_n,term,S_n,harmonic_bound");
  EXPECT_EQ(lines[1], "1,0.75,0.25,0.140625,0.140625,0.0625");
  EXPECT_EQ(lines[4].substr(0, 3), "25,");
  std::ostringstream bad;
  EXPECT_THROW(write_recurrence_csv(bad, seq, 0, {}), Error);
}

}  // namespace
}  // namespace hypt
