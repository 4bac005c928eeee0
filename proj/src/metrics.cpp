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

#include "propsense/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "propsense/error.hpp"

namespace propsense::metrics {
namespace {

constexpr double kLevelTolerance = 1e-9;

ErrorStats stats_of(const std::vector<double> &abs_errors) {
  ErrorStats s;
  s.count = abs_errors.size();
  if (abs_errors.empty())
    return s;
  double sum = 0.0;
  for (double e : abs_errors) {
    sum += e;
    s.max = std::max(s.max, e);
  }
  s.avg = sum / static_cast<double>(s.count);
  double var = 0.0;
  for (double e : abs_errors)
    var += (e - s.avg) * (e - s.avg);
  s.std = std::sqrt(var / static_cast<double>(s.count));
  return s;
}

double signed_error(const control::TraceRow &row, ErrorReference ref) {
  return ref == ErrorReference::commanded ? row.true_distance - row.commanded
                                          : row.estimated - row.true_distance;
}

} // namespace

ErrorStats open_loop_errors(std::span<const double> estimates, std::span<const double> truth) {
  if (estimates.empty())
    throw ConfigError("open_loop_errors: empty series");
  if (estimates.size() != truth.size())
    throw ConfigError("open_loop_errors: series lengths differ");
  std::vector<double> abs_errors(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i)
    abs_errors[i] = std::abs(estimates[i] - truth[i]);
  return stats_of(abs_errors);
}

AlignedPairs align_nearest(std::span<const TimedValue> estimates, std::span<const TimedValue> truth,
                           double max_skew) {
  AlignedPairs out;
  if (truth.empty())
    return out;
  for (const TimedValue &e : estimates) {
    const auto it = std::lower_bound(truth.begin(), truth.end(), e.t,
                                     [](const TimedValue &v, double t) { return v.t < t; });
    const TimedValue *best = nullptr;
    if (it != truth.end())
      best = &*it;
    if (it != truth.begin()) {
      const TimedValue *before = &*(it - 1);
      if (best == nullptr || std::abs(before->t - e.t) <= std::abs(best->t - e.t))
        best = before;
    }
    if (best != nullptr && std::abs(best->t - e.t) <= max_skew + 1e-12) {
      out.estimates.push_back(e.value);
      out.truth.push_back(best->value);
    }
  }
  return out;
}

std::optional<double> rise_time(std::span<const double> t, std::span<const double> x,
                                double step_start, double from_level, double to_level) {
  if (t.size() != x.size())
    throw ConfigError("rise_time: time and value series differ in length");
  const double span = to_level - from_level;
  if (span == 0.0)
    return std::nullopt;
  std::optional<double> t10;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < step_start)
      continue;
    const double progress = (x[i] - from_level) / span;
    if (!t10 && progress >= 0.1 - kLevelTolerance)
      t10 = t[i];
    if (t10 && progress >= 0.9 - kLevelTolerance)
      return t[i] - *t10;
  }
  return std::nullopt;
}

double overshoot_pct(std::span<const double> t, std::span<const double> x, double step_start,
                     double step_end, double from_level, double to_level) {
  if (t.size() != x.size())
    throw ConfigError("overshoot_pct: time and value series differ in length");
  const double span = to_level - from_level;
  if (span == 0.0)
    return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < step_start || t[i] >= step_end)
      continue;
    worst = std::max(worst, (x[i] - to_level) / span);
  }
  return 100.0 * worst;
}

StepMetrics square_wave_metrics(const control::ControlTrace &trace,
                                const control::CommandProfile &profile,
                                const MetricOptions &options) {
  if (profile.kind != control::ProfileKind::square)
    throw ConfigError("square_wave_metrics: profile is not a square wave");
  std::vector<double> t, x;
  t.reserve(trace.rows.size());
  x.reserve(trace.rows.size());
  for (const auto &row : trace.rows) {
    t.push_back(row.t);
    x.push_back(row.true_distance);
  }

  StepMetrics m;
  double rise_sum = 0.0;
  std::size_t rise_count = 0;
  double overshoot_sum = 0.0;
  const auto dwells = static_cast<std::size_t>(std::ceil(profile.duration / profile.dwell - 1e-9));
  for (std::size_t k = 1; k < dwells; ++k) {
    const double start = static_cast<double>(k) * profile.dwell;
    if (start < options.warmup)
      continue;
    const double end = std::min(start + profile.dwell, profile.duration + 1e-9);
    const double from = control::command_at(profile, start - 0.5 * profile.dwell);
    const double to = control::command_at(profile, start);
    ++m.steps;
    if (const auto r = rise_time(t, x, start, from, to)) {
      rise_sum += *r;
      ++rise_count;
    } else {
      ++m.undefined_rise;
    }
    overshoot_sum += overshoot_pct(t, x, start, end, from, to);
  }
  m.rise_time = rise_count > 0 ? rise_sum / static_cast<double>(rise_count)
                               : std::numeric_limits<double>::quiet_NaN();
  m.overshoot_pct = m.steps > 0 ? overshoot_sum / static_cast<double>(m.steps) : 0.0;

  std::vector<double> errors;
  for (const auto &row : trace.rows) {
    if (row.t < options.warmup)
      continue;
    const double into_dwell = std::fmod(row.t, profile.dwell);
    if (into_dwell < profile.dwell - options.steady_window - 1e-9)
      continue;
    const double e = signed_error(row, options.reference);
    if (std::isfinite(e))
      errors.push_back(e);
  }
  if (!errors.empty()) {
    double sum_abs = 0.0, sum = 0.0;
    for (double e : errors) {
      sum_abs += std::abs(e);
      sum += e;
    }
    const double n = static_cast<double>(errors.size());
    m.steady_state_error = sum_abs / n;
    const double mean = sum / n;
    double var = 0.0;
    for (double e : errors)
      var += (e - mean) * (e - mean);
    m.steady_state_std = std::sqrt(var / n);
  }
  return m;
}

ErrorStats tracking_errors(const control::ControlTrace &trace, const MetricOptions &options) {
  std::vector<double> abs_errors;
  for (const auto &row : trace.rows) {
    if (row.t < options.warmup)
      continue;
    const double e = signed_error(row, options.reference);
    if (std::isfinite(e))
      abs_errors.push_back(std::abs(e));
  }
  if (abs_errors.empty())
    throw ConfigError("tracking_errors: no samples after warm-up");
  return stats_of(abs_errors);
}

double mean_defined(std::span<const double> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values)
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  return n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

} // namespace propsense::metrics
