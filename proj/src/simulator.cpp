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

#include "propsense/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "propsense/error.hpp"
#include "propsense/kernels.hpp"

namespace propsense::sim {
namespace {

constexpr std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::size_t kHalfTaps = kSincTaps / 2;

} // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix(splitmix(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

double NoiseStream::operator()(std::int64_t index) const noexcept {
  const std::uint64_t h1 = splitmix(key_ ^ splitmix(static_cast<std::uint64_t>(index)));
  const std::uint64_t h2 = splitmix(h1 ^ 0x632be59bd9b4e019ULL);
  constexpr double scale = 1.0 / 9007199254740992.0; // 2^-53
  const double u1 = static_cast<double>((h1 >> 11) + 1) * scale; // (0, 1]
  const double u2 = static_cast<double>(h2 >> 11) * scale;       // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void NoiseStream::fill(std::int64_t first, std::span<double> out) const noexcept {
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (*this)(first + static_cast<std::int64_t>(i));
}

double path_gain(double r, Attenuation law) noexcept {
  return law == Attenuation::spherical ? 1.0 / std::max(r, kMinSpreadingRadius) : 1.0;
}

void SimScene::validate() const {
  if (!(rate > 0.0))
    throw ConfigError("scene: rate must be positive");
  if (!(c > 0.0))
    throw ConfigError("scene: sound speed must be positive");
  if (!(reflection_coeff >= 0.0 && reflection_coeff <= 1.0))
    throw ConfigError("scene: reflection_coeff must be in [0, 1]");
  if (!(ambient_noise_rms >= 0.0))
    throw ConfigError("scene: ambient_noise_rms must be non-negative");
  for (const Source &s : sources)
    if (!(s.gain >= 0.0) || !std::isfinite(s.position.x) || !std::isfinite(s.position.y))
      throw ConfigError("scene: source gains must be >= 0 with finite positions");
  if (enabled_count() == 0)
    throw ConfigError("scene: no enabled sources");
  const double side = array.center().y - wall_y;
  if (side == 0.0)
    throw ConfigError("scene: array center lies on the wall");
  for (const auto &m : array.mics())
    if ((m.y - wall_y) * side <= 0.0)
      throw ConfigError("scene: microphones must be on one side of the wall");
  for (const Source &s : sources)
    if ((s.position.y - wall_y) * side <= 0.0)
      throw ConfigError("scene: sources must be on the array's side of the wall");
  if (reference_source >= sources.size())
    throw ConfigError("scene: reference_source out of range");
}

double SimScene::wall_distance() const noexcept { return std::abs(wall_y - array.center().y); }

SimScene SimScene::at_wall_distance(double distance) const {
  if (!(distance > 0.0))
    throw ConfigError("scene: wall distance must be positive");
  const double side = array.center().y <= wall_y ? -1.0 : 1.0;
  const double dy = (wall_y + side * distance) - array.center().y;
  SimScene out = *this;
  out.array = array.translated(0.0, dy);
  for (Source &s : out.sources)
    s.position.y += dy;
  return out;
}

std::size_t SimScene::enabled_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(sources.begin(), sources.end(), [](const Source &s) { return s.enabled; }));
}

SimScene reference_scene(bool with_p0, bool with_p3) {
  SimScene scene;
  scene.sources = {
      {{-0.1375, -0.255}, 0.01, with_p0},
      {{-0.1375, -0.731314}, 0.01, with_p3},
  };
  scene.reference_source = with_p0 || !with_p3 ? 0 : 1;
  return scene;
}

SimScene vehicle_scene(double wall_distance) {
  // Built at a 0.1 m stand-off, then moved.
  constexpr double front_behind_rear_mic = 0.35;
  constexpr double rotor_pitch = 0.476314; // front-to-rear rotor spacing of the test frame
  constexpr double half_width = 0.1375;
  SimScene scene;
  scene.array = MicArray({0.0, -0.1 + 0.0075}, {0.0, -0.1 - 0.0075});
  const double front_y = -0.1 - 0.0075 - front_behind_rear_mic;
  scene.sources = {
      {{-half_width, front_y}, 0.01, true},
      {{half_width, front_y}, 0.01, true},
      {{-half_width, front_y - rotor_pitch}, 0.01, true},
      {{half_width, front_y - rotor_pitch}, 0.01, true},
  };
  scene.reference_source = 0;
  return scene.at_wall_distance(wall_distance);
}

std::vector<double> fractional_delay_taps(double frac) {
  std::vector<double> taps(kSincTaps);
  const double half_width = static_cast<double>(kHalfTaps) + 1.0;
  for (std::size_t k = 0; k < kSincTaps; ++k) {
    const double j = static_cast<double>(kHalfTaps) - static_cast<double>(k);
    const double t = j - frac;
    const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * t / half_width));
    taps[k] = sinc * window;
  }
  return taps;
}

namespace {

struct Path {
  double delay_samples;
  double amplitude;
};

void render_path(const Path &p, const std::vector<double> &noise, std::int64_t noise_first,
                 std::int64_t start, std::span<double> out) {
  const double whole = std::floor(p.delay_samples);
  const std::vector<double> taps = fractional_delay_taps(p.delay_samples - whole);
  const std::int64_t first =
      start - static_cast<std::int64_t>(whole) - static_cast<std::int64_t>(kHalfTaps);
  const double *in = noise.data() + (first - noise_first);
  kernels::active().fir_accumulate(in, taps.data(), taps.size(), p.amplitude, out.data(),
                                   out.size());
}

} // namespace

signal::SampleFrame render_frame(const SimScene &scene, std::int64_t start_sample,
                                 std::size_t length) {
  scene.validate();
  signal::SampleFrame frame = signal::SampleFrame::zeros(scene.rate, 2, length);
  if (length == 0)
    return frame;
  const auto len = static_cast<std::int64_t>(length);

  for (std::size_t s = 0; s < scene.sources.size(); ++s) {
    const Source &src = scene.sources[s];
    if (!src.enabled || src.gain == 0.0)
      continue;
    const ScenePoint image = geometry::image_source(src.position, scene.wall_y);

    std::array<std::vector<Path>, 2> paths;
    double max_delay = 0.0;
    double min_delay = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < 2; ++m) {
      const ScenePoint &mic = scene.array.mic(m);
      const double rd = geometry::distance(src.position, mic);
      paths[m].push_back({rd / scene.c * scene.rate, src.gain * path_gain(rd, scene.attenuation)});
      if (scene.reflection_coeff > 0.0) {
        const double ri = geometry::distance(image, mic);
        paths[m].push_back({ri / scene.c * scene.rate,
                            scene.reflection_coeff * src.gain * path_gain(ri, scene.attenuation)});
      }
      for (const Path &p : paths[m]) {
        max_delay = std::max(max_delay, p.delay_samples);
        min_delay = std::min(min_delay, p.delay_samples);
      }
    }

    const auto half = static_cast<std::int64_t>(kHalfTaps);
    const std::int64_t noise_first =
        start_sample - static_cast<std::int64_t>(std::floor(max_delay)) - half;
    const std::int64_t noise_last =
        start_sample + len - 1 - static_cast<std::int64_t>(std::floor(min_delay)) + half;
    std::vector<double> noise(static_cast<std::size_t>(noise_last - noise_first + 1));
    NoiseStream(scene.seed, s).fill(noise_first, noise);

    for (std::size_t m = 0; m < 2; ++m)
      for (const Path &p : paths[m])
        render_path(p, noise, noise_first, start_sample, frame.channel(m));
  }

  if (scene.ambient_noise_rms > 0.0) {
    std::vector<double> ambient(length);
    for (std::size_t m = 0; m < 2; ++m) {
      NoiseStream(scene.seed, kAmbientStreamBase + m).fill(start_sample, ambient);
      kernels::active().fir_accumulate(ambient.data(), &scene.ambient_noise_rms, 1, 1.0,
                                       frame.channel(m).data(), length);
    }
  }
  return frame;
}

void Plant::validate() const {
  if (!(position > 0.0))
    throw ConfigError("plant: position must be positive");
  if (!(velocity_limit > 0.0))
    throw ConfigError("plant: velocity_limit must be positive");
  if (!(update_rate > 0.0))
    throw ConfigError("plant: update_rate must be positive");
  if (!(position_noise_rms >= 0.0))
    throw ConfigError("plant: position_noise_rms must be non-negative");
}

Plant plant_step(Plant plant, double commanded_correction) {
  const double max_step = plant.velocity_limit / plant.update_rate;
  double next = plant.position + std::clamp(commanded_correction, -max_step, max_step);
  if (plant.position_noise_rms > 0.0) {
    std::normal_distribution<double> jitter(0.0, plant.position_noise_rms);
    next += jitter(plant.rng);
  }
  plant.position = std::max(next, kMinPlantPosition);
  return plant;
}

} // namespace propsense::sim
