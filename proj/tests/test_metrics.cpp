// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The propsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "propsense/control.hpp"
#include "propsense/error.hpp"
#include "propsense/metrics.hpp"

namespace {

using namespace propsense;
using namespace propsense::metrics;

std::vector<double> ticks(std::size_t n, double rate = 10.0) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = static_cast<double>(i) / rate;
  return t;
}

TEST(OpenLoop, PerfectAndBiased) {
  const std::vector<double> truth{0.1, 0.2, 0.3};
  const auto zero = open_loop_errors(truth, truth);
  EXPECT_EQ(zero.avg, 0.0);
  EXPECT_EQ(zero.std, 0.0);
  EXPECT_EQ(zero.max, 0.0);
  const std::vector<double> biased{0.11, 0.21, 0.31};
  const auto b = open_loop_errors(biased, truth);
  EXPECT_NEAR(b.avg, 0.01, 1e-15);
  EXPECT_NEAR(b.std, 0.0, 1e-15);
  EXPECT_NEAR(b.max, 0.01, 1e-15);
  EXPECT_EQ(b.count, 3u);
}

TEST(OpenLoop, AbsoluteErrorStatistics) {
  const std::vector<double> truth{0.0, 0.0, 0.0, 0.0};
  const std::vector<double> est{0.01, -0.03, 0.01, -0.01};
  const auto s = open_loop_errors(est, truth);
  EXPECT_NEAR(s.avg, 0.015, 1e-15);
  EXPECT_NEAR(s.std, std::sqrt(3 * 0.005 * 0.005 + 0.015 * 0.015) / 2.0, 1e-15);
  EXPECT_NEAR(s.max, 0.03, 1e-15);
}

TEST(OpenLoop, RejectsEmptyOrMismatched) {
  EXPECT_THROW(open_loop_errors({}, {}), ConfigError);
  const std::vector<double> a{1.0}, b{1.0, 2.0};
  EXPECT_THROW(open_loop_errors(a, b), ConfigError);
}

TEST(Align, NearestWithinSkew) {
  const std::vector<TimedValue> truth{{0.0, 1.0}, {0.1, 2.0}, {0.2, 3.0}};
  const std::vector<TimedValue> est{{0.04, 10.0}, {0.16, 20.0}, {0.5, 30.0}};
  const auto p = align_nearest(est, truth, 0.1);
  EXPECT_EQ(p.estimates, (std::vector<double>{10.0, 20.0}));
  EXPECT_EQ(p.truth, (std::vector<double>{1.0, 3.0}));
  EXPECT_TRUE(align_nearest(est, {}, 0.1).estimates.empty());
}

TEST(RiseTime, InstantaneousStep) {
  const auto t = ticks(10);
  std::vector<double> x(10, 0.2);
  x[0] = x[1] = x[2] = 0.12;
  EXPECT_DOUBLE_EQ(*rise_time(t, x, 0.0, 0.12, 0.2), 0.0);
}

TEST(RiseTime, LinearRampIsEightTenths) {
  const auto t = ticks(101);
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    x[i] = 0.12 + 0.08 * t[i] / 10.0;
  EXPECT_NEAR(*rise_time(t, x, 0.0, 0.12, 0.2), 8.0, 1e-9);
}

TEST(RiseTime, ExponentialMatchesClosedFormWithinOneTick) {
  const auto t = ticks(50);
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    x[i] = 0.2 - 0.08 * std::pow(0.2, static_cast<double>(i));
  const double closed = (std::log(0.1) - std::log(0.9)) / std::log(0.2) / 10.0;
  EXPECT_NEAR(*rise_time(t, x, 0.0, 0.12, 0.2), closed, 0.1);
}

TEST(RiseTime, DownwardStepAndNeverReached) {
  const auto t = ticks(20);
  std::vector<double> x(t.size(), 0.2);
  for (std::size_t i = 5; i < t.size(); ++i)
    x[i] = 0.12;
  EXPECT_DOUBLE_EQ(*rise_time(t, x, 0.0, 0.2, 0.12), 0.0);
  std::vector<double> stuck(t.size(), 0.15);
  EXPECT_FALSE(rise_time(t, stuck, 0.0, 0.12, 0.2));
}

TEST(RiseTime, ScaleInvariant) {
  const auto t = ticks(60);
  std::vector<double> x(t.size()), y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    x[i] = 0.2 - 0.08 * std::exp(-0.3 * static_cast<double>(i)) * std::cos(0.5 * i);
    y[i] = 3.0 * x[i];
  }
  EXPECT_DOUBLE_EQ(*rise_time(t, x, 0.0, 0.12, 0.2), *rise_time(t, y, 0.0, 0.36, 0.6));
  EXPECT_NEAR(overshoot_pct(t, x, 0.0, 6.0, 0.12, 0.2), overshoot_pct(t, y, 0.0, 6.0, 0.36, 0.6), 1e-9);
}

TEST(Overshoot, PeakBeyondTarget) {
  const auto t = ticks(5);
  const std::vector<double> x{0.12, 0.19, 0.23, 0.21, 0.2};
  EXPECT_NEAR(overshoot_pct(t, x, 0.0, 1.0, 0.12, 0.2), 37.5, 1e-9);
  const std::vector<double> mono{0.12, 0.15, 0.18, 0.19, 0.2};
  EXPECT_EQ(overshoot_pct(t, mono, 0.0, 1.0, 0.12, 0.2), 0.0);
  const std::vector<double> down{0.2, 0.13, 0.10, 0.12, 0.12};
  EXPECT_NEAR(overshoot_pct(t, down, 0.0, 1.0, 0.2, 0.12), 25.0, 1e-9);
}

control::ControlTrace square_trace(double offset) {
  const auto p = control::CommandProfile::square();
  control::ControlTrace trace;
  for (std::size_t n = 0; n < 1000; ++n) {
    const double t = n / 10.0;
    const double c = control::command_at(p, t);
    trace.rows.push_back({t, c, c + offset, c + offset, 0.0, false});
  }
  return trace;
}

TEST(SquareWave, ConstantOffsetGivesExactSteadyStateError) {
  const auto m = square_wave_metrics(square_trace(0.004), control::CommandProfile::square());
  EXPECT_EQ(m.steps, 4u);
  EXPECT_NEAR(m.steady_state_error, 0.004, 1e-15);
  EXPECT_NEAR(m.steady_state_std, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(m.rise_time, 0.0);
}

TEST(SquareWave, OracleLoopMetrics) {
  control::ClosedLoopSetup s;
  s.scene = sim::vehicle_scene(0.12);
  s.method = est::Method::oracle;
  s.plant.velocity_limit = 0.06;
  s.estimator = est::EstimatorConfig::for_scene(s.scene);
  const auto trace = control::run_closed_loop(s);
  const auto m = square_wave_metrics(trace, s.profile);
  EXPECT_EQ(m.steps, 4u);
  EXPECT_EQ(m.undefined_rise, 0u);
  EXPECT_LT(m.steady_state_error, 1e-12);
  EXPECT_EQ(m.overshoot_pct, 0.0);
  // 0.06 m/s over 80% of an 80 mm step.
  EXPECT_NEAR(m.rise_time, 0.064 / 0.06, 0.1);
}

TEST(SquareWave, UndefinedRiseIsCountedAndNaN) {
  auto trace = square_trace(0.0);
  for (auto &r : trace.rows)
    r.true_distance = 0.16;
  const auto m = square_wave_metrics(trace, control::CommandProfile::square());
  EXPECT_EQ(m.undefined_rise, m.steps);
  EXPECT_TRUE(std::isnan(m.rise_time));
  EXPECT_THROW(square_wave_metrics(trace, control::CommandProfile::sine()), ConfigError);
}

TEST(Tracking, ReferencesAndWarmup) {
  auto trace = square_trace(0.002);
  trace.rows[0].true_distance = 9.0;
  trace.rows[15].estimated = trace.rows[15].true_distance + 0.01;
  MetricOptions cmd;
  const auto a = tracking_errors(trace, cmd);
  EXPECT_NEAR(a.max, 0.002, 1e-15);
  MetricOptions truth;
  truth.reference = ErrorReference::truth;
  const auto b = tracking_errors(trace, truth);
  EXPECT_NEAR(b.max, 0.01, 1e-12);
  MetricOptions late;
  late.warmup = 1000.0;
  EXPECT_THROW(tracking_errors(trace, late), ConfigError);
}

TEST(MeanDefined, SkipsNaN) {
  const std::vector<double> v{1.0, std::nan(""), 3.0};
  EXPECT_DOUBLE_EQ(mean_defined(v), 2.0);
  const std::vector<double> none{std::nan("")};
  EXPECT_TRUE(std::isnan(mean_defined(none)));
}

} // namespace
