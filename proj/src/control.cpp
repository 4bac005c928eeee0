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

#include "propsense/control.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include "propsense/error.hpp"

namespace propsense::control {

void PController::validate() const {
  if (!(kp >= 0.0) || !std::isfinite(kp))
    throw ConfigError("controller: kp must be finite and non-negative");
  if (!(rate > 0.0))
    throw ConfigError("controller: rate must be positive");
}

double control_step(const PController &ctrl, double target, double measured) noexcept {
  return ctrl.kp * (target - measured);
}

CommandProfile CommandProfile::square() {
  CommandProfile p;
  p.kind = ProfileKind::square;
  p.duration = 100.0;
  return p;
}

CommandProfile CommandProfile::sine() {
  CommandProfile p;
  p.kind = ProfileKind::sine;
  p.duration = 80.0;
  return p;
}

CommandProfile CommandProfile::constant(double level, double duration) {
  CommandProfile p;
  p.kind = ProfileKind::constant;
  p.level = level;
  p.duration = duration;
  return p;
}

CommandProfile CommandProfile::sweep(double from, double to, double duration) {
  CommandProfile p;
  p.kind = ProfileKind::sweep;
  p.low = from;
  p.high = to;
  p.duration = duration;
  return p;
}

void CommandProfile::validate() const {
  if (!(duration > 0.0))
    throw ConfigError("profile: duration must be positive");
  switch (kind) {
  case ProfileKind::square:
    if (!(low > 0.0 && high > 0.0 && dwell > 0.0))
      throw ConfigError("profile: square levels and dwell must be positive");
    break;
  case ProfileKind::sine:
    if (!(period > 0.0 && center - std::abs(amplitude) > 0.0))
      throw ConfigError("profile: sine must stay at positive distances");
    break;
  case ProfileKind::constant:
    if (!(level > 0.0))
      throw ConfigError("profile: constant level must be positive");
    break;
  case ProfileKind::sweep:
    if (!(low > 0.0 && high > 0.0))
      throw ConfigError("profile: sweep endpoints must be positive");
    break;
  }
}

double command_at(const CommandProfile &p, double t) {
  if (!(t >= 0.0 && t <= p.duration))
    throw RangeError("command_at: t = " + std::to_string(t) + " outside [0, " +
                     std::to_string(p.duration) + "]");
  switch (p.kind) {
  case ProfileKind::square: {
    const auto dwell_index = static_cast<long long>(std::floor(t / p.dwell + 1e-12));
    return dwell_index % 2 == 0 ? p.low : p.high;
  }
  case ProfileKind::sine:
    return p.center + p.amplitude * std::sin(2.0 * std::numbers::pi * t / p.period);
  case ProfileKind::constant:
    return p.level;
  case ProfileKind::sweep:
    return p.low + (p.high - p.low) * (t / p.duration);
  }
  return p.level;
}

ControlTrace run_closed_loop(const ClosedLoopSetup &setup) {
  setup.controller.validate();
  setup.profile.validate();
  setup.plant.validate();
  setup.scene.validate();
  const bool acoustic = setup.method != est::Method::oracle;
  if (acoustic && std::abs(setup.estimator.output_rate - setup.controller.rate) > 1e-9)
    throw ConfigError("closed loop: estimator output_rate must equal the control rate");

  const double samples_per_tick = setup.scene.rate / setup.controller.rate;
  if (acoustic && samples_per_tick < 1.0)
    throw HarnessError("closed loop: control tick shorter than one audio sample");

  std::optional<est::StreamingEstimator> estimator;
  if (acoustic)
    estimator.emplace(setup.method, setup.estimator);

  ControlTrace trace;
  trace.method = setup.method;
  sim::Plant plant = setup.plant;
  const auto ticks = static_cast<std::size_t>(std::floor(setup.profile.duration * setup.controller.rate + 1e-9));
  trace.rows.reserve(ticks);

  for (std::size_t n = 0; n < ticks; ++n) {
    const double t = static_cast<double>(n) / setup.controller.rate;
    const double commanded = command_at(setup.profile, t);
    const double truth = plant.position;
    double measured = std::numeric_limits<double>::quiet_NaN();
    bool stale = false;
    if (acoustic) {
      const auto first = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * samples_per_tick));
      const auto last = static_cast<std::int64_t>(std::llround(static_cast<double>(n + 1) * samples_per_tick));
      if (last <= first)
        throw HarnessError("closed loop: estimator starved of audio");
      const sim::SimScene here = setup.scene.at_wall_distance(truth);
      estimator->push(sim::render_frame(here, first, static_cast<std::size_t>(last - first)));
      if (const auto e = estimator->estimate(t)) {
        measured = e->distance;
        stale = e->stale;
      } else {
        stale = true;
      }
    } else {
      measured = truth;
    }
    const double correction = std::isnan(measured) ? 0.0 : control_step(setup.controller, commanded, measured);
    trace.rows.push_back({t, commanded, truth, measured, correction, stale});
    plant = sim::plant_step(std::move(plant), correction);
  }
  return trace;
}

std::vector<ControlTrace> run_repeats(const ClosedLoopSetup &setup, std::size_t repeats) {
  std::vector<std::future<ControlTrace>> jobs;
  jobs.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    ClosedLoopSetup copy = setup;
    copy.scene.seed = setup.scene.seed + r;
    copy.plant.rng.seed(setup.scene.seed + r);
    jobs.push_back(std::async(std::launch::async, [copy = std::move(copy)] { return run_closed_loop(copy); }));
  }
  std::vector<ControlTrace> out;
  out.reserve(repeats);
  for (auto &j : jobs)
    out.push_back(j.get());
  return out;
}

} // namespace propsense::control
