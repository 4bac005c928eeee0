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

// Proportional wall-distance control at a fixed tick rate, command profiles,
// and the closed-loop harness (render -> estimate -> control -> plant).

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "propsense/estimators.hpp"
#include "propsense/simulator.hpp"

namespace propsense::control {

struct PController {
  double kp = 0.8;
  double rate = 10.0; // Hz

  void validate() const;
};

// x_c = K_p (x_t - x_p)
double control_step(const PController &ctrl, double target, double measured) noexcept;

enum class ProfileKind { square, sine, constant, sweep };

struct CommandProfile {
  ProfileKind kind = ProfileKind::square;
  double duration = 100.0;
  // square: low for the first dwell, then alternating
  double low = 0.120;
  double high = 0.200;
  double dwell = 20.0;
  // sine: center + amplitude sin(2 pi t / period)
  double center = 0.175;
  double amplitude = 0.035;
  double period = 20.0;
  // constant uses `level`; sweep ramps linearly from `low` to `high`
  double level = 0.15;

  static CommandProfile square();
  static CommandProfile sine();
  static CommandProfile constant(double level, double duration);
  static CommandProfile sweep(double from, double to, double duration);

  void validate() const;
};

// Target distance at time t; throws RangeError outside [0, duration].
double command_at(const CommandProfile &profile, double t);

struct TraceRow {
  double t;
  double commanded;
  double true_distance;
  double estimated; // NaN when no estimate was available yet
  double correction;
  bool stale;
};

struct ControlTrace {
  est::Method method = est::Method::oracle;
  std::vector<TraceRow> rows;
};

struct ClosedLoopSetup {
  sim::SimScene scene; // template; translated to the plant position every tick
  est::Method method = est::Method::beam;
  CommandProfile profile = CommandProfile::square();
  PController controller;
  sim::Plant plant;
  est::EstimatorConfig estimator;
};

// Sequential tick loop. Audio for tick n covers samples [n S, (n + 1) S) with
// S = scene.rate / controller.rate, rendered at the plant position held
// during that tick, so the estimate logged at tick n only sees audio up to n.
ControlTrace run_closed_loop(const ClosedLoopSetup &setup);

// Independent repetitions with seeds setup.scene.seed + r (the plant noise
// generator is reseeded the same way). Runs execute concurrently.
std::vector<ControlTrace> run_repeats(const ClosedLoopSetup &setup, std::size_t repeats);

} // namespace propsense::control
