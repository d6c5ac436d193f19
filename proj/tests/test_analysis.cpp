/*
 * Copyright 2026 The PowerSensor3 Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ps3/analysis.hpp"
#include "ps3/dump.hpp"
#include "ps3/error.hpp"

namespace ps3 {
namespace {

using namespace std::chrono_literals;

TEST(PowerError, WorstCaseRows) {
  struct Row {
    double U, I, Eu, Ei, expected;
  };
  // Expected values computed by hand from the propagation formula.
  const Row rows[] = {
      {12, 10, 0.0286, 0.35, 4.2},
      {3.3, 10, 0.0199, 0.35, 1.2},
      {20, 10, 0.0286, 0.35, 7.0},
      {12, 20, 0.0286, 0.41, 5.0},
  };
  for (const auto& r : rows) {
    const double ep = power_error({r.Eu, r.Ei, r.U, r.I});
    const double oracle = std::hypot(std::hypot(r.U * r.Ei, r.I * r.Eu), r.Ei * r.Eu);
    EXPECT_DOUBLE_EQ(ep, oracle);
    EXPECT_NEAR(ep, r.expected, 0.05) << r.U << " V " << r.I << " A";
  }
  EXPECT_NEAR(power_error({0.0286, 0.35, 12, 10}), 4.21, 0.005);
  EXPECT_NEAR(power_error({0.0286, 0.35, 20, 10}), 7.01, 0.005);
  EXPECT_EQ(power_error({0, 0, 12, 10}), 0.0);
  EXPECT_THROW(power_error({-1, 0, 12, 10}), AnalysisError);
}

TEST(Decimate, ConstantSeries) {
  const std::vector<double> s(1000, 12.0);
  for (std::size_t f : {1, 2, 4, 20, 40}) {
    const auto d = decimate_stats(s, f);
    EXPECT_EQ(d.std, 0.0);
    EXPECT_EQ(d.pp, 0.0);
    EXPECT_EQ(d.factor * d.out_rate, 20000.0);
  }
}

TEST(Decimate, TrailingPartialBlockDropped) {
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7};
  const auto out = decimate(s, 2);
  EXPECT_EQ(out, (std::vector<double>{1.5, 3.5, 5.5}));
  EXPECT_EQ(decimate_stats(s, 2).points, 3u);
}

TEST(Decimate, Errors) {
  EXPECT_THROW(decimate_stats({}, 1), AnalysisError);
  const std::vector<double> s{1, 2, 3};
  EXPECT_THROW(decimate_stats(s, 0), AnalysisError);
  EXPECT_THROW(decimate_stats(s, 2), AnalysisError);  // one block only
}

TEST(Decimate, StdFollowsInverseSqrtFactor) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(12.0, 0.7);
  std::vector<double> s(131072);
  for (auto& v : s) v = g(rng);
  const auto base = decimate_stats(s, 1);
  EXPECT_NEAR(base.pp, base.max - base.min, 1e-12);
  for (std::size_t f : {2, 4, 20, 40}) {
    const double ratio = base.std / decimate_stats(s, f).std;
    const double expected = std::sqrt(static_cast<double>(f));
    EXPECT_NEAR(ratio, expected, 0.1 * expected) << f;
  }
}

std::vector<double> step_series(std::size_t before, std::size_t after, double lo, double hi) {
  std::vector<double> s(before, lo);
  s.insert(s.end(), after, hi);
  return s;
}

TEST(RiseTime, IdealStepWithinOneSample) {
  const auto s = step_series(100, 100, 39.6, 96.0);
  const auto r = rise_time(s, 20000);
  EXPECT_LE(r.seconds, 50e-6);
  EXPECT_DOUBLE_EQ(r.low_level, 39.6);
  EXPECT_DOUBLE_EQ(r.high_level, 96.0);
}

TEST(RiseTime, ConstantSeriesHasNoStep) {
  const std::vector<double> s(400, 5.0);
  EXPECT_THROW(rise_time(s, 20000), AnalysisError);
  EXPECT_THROW(step_response(s, 20000), AnalysisError);
}

TEST(RiseTime, LinearRampIsEightyPercentOfDuration) {
  std::vector<double> s(100, 0.0);
  for (int i = 0; i <= 100; ++i) s.push_back(i / 100.0);
  s.insert(s.end(), 100, 1.0);
  // The ramp starts at index 100 and spans 100 samples.
  const auto r = rise_time(s, 20000);
  EXPECT_NEAR(r.seconds, 80.0 / 20000, 1e-12);
  EXPECT_NEAR(r.t_low, 110.0, 1e-9);
  EXPECT_NEAR(r.t_high, 190.0, 1e-9);
}

TEST(RiseTime, StepBuriedInNoiseIsRejected) {
  std::mt19937 rng(1);
  std::normal_distribution<double> g(0, 1);
  auto s = step_series(200, 200, 0.0, 2.0);
  for (auto& v : s) v += g(rng);
  EXPECT_THROW(rise_time(s, 20000), AnalysisError);
}

TEST(StepResponse, FindsFirstRisingEdgeOfSquareWave) {
  std::vector<double> s;
  for (int period = 0; period < 5; ++period) {
    s.insert(s.end(), 100, 39.6);
    s.insert(s.end(), 100, 96.0);
  }
  const auto r = step_response(s, 20000);
  EXPECT_LE(r.seconds, 100e-6);
  EXPECT_NEAR(r.t_low, 99.1, 1e-9);
  EXPECT_DOUBLE_EQ(r.low_level, 39.6);
  EXPECT_DOUBLE_EQ(r.high_level, 96.0);
  EXPECT_EQ(r.edges.size(), 9u);
}

// Builds dump text from records, as the host would write it.
std::string make_dump(const std::vector<double>& watts, std::map<std::size_t, char> markers = {},
                      std::int64_t t0_us = 1000) {
  std::string text = format_dump_header(default_config_block());
  for (std::size_t i = 0; i < watts.size(); ++i) {
    DumpRecord r;
    r.device_time = std::chrono::microseconds(t0_us + 50 * static_cast<std::int64_t>(i));
    r.pair_enabled = {true, false, false, false};
    r.pairs[0] = {12.0, watts[i] / 12.0, watts[i], r.device_time};
    r.total_watts = watts[i];
    if (auto it = markers.find(i); it != markers.end()) r.marker = it->second;
    text += format_dump_line(r);
  }
  return text;
}

Dump parse(const std::string& text) {
  std::istringstream in(text);
  return read_dump(in);
}

TEST(DumpReader, RoundTripsHostFormat) {
  const auto d = parse(make_dump({1.5, 2.25, 3.0}, {{1, 'A'}}));
  ASSERT_EQ(d.samples.size(), 3u);
  EXPECT_TRUE(d.warnings.empty());
  EXPECT_EQ(d.header.size(), 10u);
  EXPECT_EQ(d.samples[1].time_us, 1050);
  EXPECT_EQ(d.samples[1].total_watts_e4, 22500);
  EXPECT_EQ(d.samples[1].marker, 'A');
  EXPECT_FALSE(d.samples[0].pairs[1].has_value());
  EXPECT_DOUBLE_EQ(d.samples[2].pairs[0]->watts, 3.0);
}

TEST(DumpReader, CorruptLineWarnsWithLineNumber) {
  auto text = make_dump(std::vector<double>(10, 12.0));
  text.insert(text.find("S 0.001250"), "S 0.0012 garbage\n");
  const auto d = parse(text);
  EXPECT_EQ(d.samples.size(), 10u);
  ASSERT_EQ(d.warnings.size(), 1u);
  EXPECT_EQ(d.warnings[0].line, 16u);
  const auto s = summarize(d);
  EXPECT_EQ(s.warnings, 1u);
  EXPECT_EQ(s.total.count, 10u);
}

TEST(Markers, OneSecondAtTwelveWatts) {
  const auto d = parse(make_dump(std::vector<double>(30000, 12.0), {{5000, 'a'}, {25000, 'b'}}));
  const auto e = energy_between_markers(d, 'a', 'b');
  EXPECT_DOUBLE_EQ(e.seconds, 1.0);
  EXPECT_NEAR(e.joules, 12.0, 1e-9);
  EXPECT_NEAR(e.watts, 12.0, 1e-9);
}

TEST(Markers, SamePositionAndErrors) {
  const auto d = parse(make_dump(std::vector<double>(100, 12.0), {{10, 'a'}, {50, 'b'}}));
  const auto same = energy_between_markers(d, 'a', 'a');
  EXPECT_EQ(same.joules, 0.0);
  EXPECT_EQ(same.seconds, 0.0);
  EXPECT_THROW(energy_between_markers(d, 'a', 'z'), AnalysisError);
  EXPECT_THROW(energy_between_markers(d, 'b', 'a'), AnalysisError);
}

TEST(Markers, SplitSumIsExact) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> w(0.0, 300.0);
  std::vector<double> watts(5000);
  for (auto& v : watts) v = w(rng);
  const auto d = parse(make_dump(watts));
  const auto n = d.samples.size();
  const double full = integrate(d, 0, n).joules;
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = rng() % n;
    const double left = integrate(d, 0, k).joules;
    const double right = integrate(d, k, n).joules;
    // Both halves are exact multiples of 1e-10 J, so the sum is exact in
    // fixed point; compare the integer counts.
    EXPECT_EQ(std::llround(left * 1e10) + std::llround(right * 1e10), std::llround(full * 1e10));
  }
}

TEST(Markers, IntervalsBetweenConsecutiveMarkers) {
  const auto d = parse(make_dump(std::vector<double>(1000, 10.0), {{0, 'x'}, {200, 'y'}, {600, 'z'}}));
  const auto rows = marker_intervals(d);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].from, 'x');
  EXPECT_EQ(rows[1].to, 'z');
  EXPECT_NEAR(rows[1].energy.joules, 400 * 50e-6 * 10.0, 1e-9);
}

TEST(Summarize, ConstantDump) {
  const auto d = parse(make_dump(std::vector<double>(20000, 12.0)));
  const auto s = summarize(d);
  EXPECT_DOUBLE_EQ(s.total.mean, 12.0);
  EXPECT_EQ(s.total.std, 0.0);
  EXPECT_EQ(s.total.pp, 0.0);
  ASSERT_TRUE(s.pairs[0].has_value());
  EXPECT_FALSE(s.pairs[1].has_value());
  EXPECT_NEAR(s.total.joules, 12.0 * 19999 * 50e-6, 1e-9);
  EXPECT_NEAR(s.pairs[0]->joules, s.total.joules, 1e-9);
}

TEST(Summarize, FullSpanMatchesMarkerEnergy) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(12.0, 0.56);
  std::vector<double> w(20000);
  for (auto& v : w) v = g(rng);
  const auto d = parse(make_dump(w, {{0, 'A'}, {19999, 'B'}}));
  const auto s = summarize(d);
  const auto e = energy_between_markers(d, 'A', 'B');
  EXPECT_NEAR(s.total.joules, e.joules, 50e-6 * s.total.max);
  EXPECT_NEAR(s.total.std, 0.56, 0.056);
}

TEST(Format, CsvHeaders) {
  const auto d = parse(make_dump(std::vector<double>(100, 12.0), {{0, 'a'}, {50, 'b'}}));
  EXPECT_EQ(format_summary(summarize(d), true).rfind("series,count,mean_w", 0), 0u);
  const auto rows = marker_intervals(d);
  EXPECT_EQ(format_marker_intervals(rows, true).rfind("from,to,start_s", 0), 0u);
  const DecimationStats ds[] = {decimate_stats(d.total_watts(), 1)};
  EXPECT_EQ(format_decimation(ds, true).rfind("factor,rate_hz", 0), 0u);
}

}  // namespace
}  // namespace ps3
