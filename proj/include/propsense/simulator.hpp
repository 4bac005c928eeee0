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

// Synthetic two-microphone audio: uncorrelated white-noise sources heard over a
// direct path and one rigid-wall reflection, plus independent ambient noise,
// and a first-order kinematic plant that moves the array.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "propsense/geometry.hpp"
#include "propsense/signal.hpp"

namespace propsense::sim {

using geometry::MicArray;
using geometry::ScenePoint;

// Counter-based Gaussian white noise: sample i is a pure function of
// (key, i), so any index can be evaluated without history.
class NoiseStream {
public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  double operator()(std::int64_t index) const noexcept;
  void fill(std::int64_t first, std::span<double> out) const noexcept;

private:
  std::uint64_t key_;
};

// Stream ids: sources use their index, ambient channel m uses this + m.
inline constexpr std::uint64_t kAmbientStreamBase = 0x10000;

struct Source {
  ScenePoint position;
  double gain = 0.01;
  bool enabled = true;
};

enum class Attenuation { spherical, none };

// Amplitude factor of a path of length r.
double path_gain(double r, Attenuation law) noexcept;
inline constexpr double kMinSpreadingRadius = 0.05;

struct SimScene {
  std::vector<Source> sources;
  double wall_y = 0.0;
  double reflection_coeff = 1.0;
  MicArray array{{0.0, -0.1475}, {0.0, -0.1625}};
  double ambient_noise_rms = 0.0;
  double c = 343.0;
  double rate = 48000.0;
  std::uint64_t seed = 0;
  Attenuation attenuation = Attenuation::spherical;
  // Source the reference (propeller) beam points at.
  std::size_t reference_source = 0;

  // Throws ConfigError when the scene cannot be rendered.
  void validate() const;

  // Distance from the array center to the wall.
  double wall_distance() const noexcept;

  // Rigid translation of sources and array along the wall normal so the array
  // center sits `distance` from the wall.
  SimScene at_wall_distance(double distance) const;

  std::size_t enabled_count() const noexcept;
};

// Reference geometry with sources P0 and P3, a
// 15 mm vertical array and the wall at y = 0.
SimScene reference_scene(bool with_p0 = true, bool with_p3 = true);

// Quad-rotor template: two front rotors 0.35 m behind the rear microphone and
// two rear rotors, everything rigidly attached to the array.
SimScene vehicle_scene(double wall_distance);

// Windowed-sinc taps realising a delay of `frac` samples in [0, 1), ordered
// for correlation: y[n] = sum_k taps[k] x[n - D - half + k].
inline constexpr std::size_t kSincTaps = 31;
std::vector<double> fractional_delay_taps(double frac);

signal::SampleFrame render_frame(const SimScene &scene, std::int64_t start_sample,
                                 std::size_t length);

struct Plant {
  double position = 0.12; // wall distance of the array center [m]
  double velocity_limit = 0.06; // m/s
  double position_noise_rms = 0.0;
  double update_rate = 10.0;
  std::mt19937_64 rng{0};

  void validate() const;
};

inline constexpr double kMinPlantPosition = 0.02;

Plant plant_step(Plant plant, double commanded_correction);

} // namespace propsense::sim
