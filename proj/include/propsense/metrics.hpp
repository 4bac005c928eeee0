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

// Error statistics for open-loop estimate streams and closed-loop traces.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "propsense/control.hpp"

namespace propsense::metrics {

struct ErrorStats {
  double avg = 0.0; // mean |e|
  double std = 0.0; // population std of |e|
  double max = 0.0;
  std::size_t count = 0;
};

// Throws ConfigError for empty or unequal-length inputs.
ErrorStats open_loop_errors(std::span<const double> estimates, std::span<const double> truth);

struct TimedValue {
  double t;
  double value;
};

struct AlignedPairs {
  std::vector<double> estimates;
  std::vector<double> truth;
};

// Nearest-sample matching of each estimate to a truth sample; pairs further
// apart than max_skew are dropped. `truth` must be sorted by time.
AlignedPairs align_nearest(std::span<const TimedValue> estimates, std::span<const TimedValue> truth,
                           double max_skew);

// Time between the first samples at or past 10% and 90% of the way from
// from_level to to_level, searching t >= step_start. nullopt if either level
// is never reached.
std::optional<double> rise_time(std::span<const double> t, std::span<const double> x,
                                double step_start, double from_level, double to_level);

// Largest excursion beyond to_level over [step_start, step_end), as a
// percentage of |to_level - from_level|; 0 if the target is never passed.
double overshoot_pct(std::span<const double> t, std::span<const double> x, double step_start,
                     double step_end, double from_level, double to_level);

enum class ErrorReference {
  commanded, // true position vs commanded target
  truth,     // estimate vs true position
};

struct StepMetrics {
  double steady_state_error = 0.0; // mean |e| over steady-state windows
  double steady_state_std = 0.0;   // std of signed e over the same samples
  double rise_time = 0.0;          // mean over steps that reached 90%
  double overshoot_pct = 0.0;      // mean over steps
  std::size_t steps = 0;
  std::size_t undefined_rise = 0;  // steps excluded from rise_time
};

struct MetricOptions {
  double steady_window = 10.0; // trailing seconds of each dwell
  double warmup = 1.0;         // ignored head of every run
  ErrorReference reference = ErrorReference::commanded;
};

StepMetrics square_wave_metrics(const control::ControlTrace &trace,
                                const control::CommandProfile &profile,
                                const MetricOptions &options = {});

// avg / std / max of the tracking error after warm-up (e.g. for the sine test).
ErrorStats tracking_errors(const control::ControlTrace &trace, const MetricOptions &options = {});

// Mean of a metric across runs, skipping NaN.
double mean_defined(std::span<const double> values);

} // namespace propsense::metrics
