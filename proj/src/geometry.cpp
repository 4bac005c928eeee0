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

#include "propsense/geometry.hpp"

#include <cmath>

#include "propsense/error.hpp"

namespace propsense::geometry {
namespace {

bool finite(const ScenePoint &p) { return std::isfinite(p.x) && std::isfinite(p.y); }

} // namespace

double distance(const ScenePoint &a, const ScenePoint &b) noexcept {
  return std::hypot(b.x - a.x, b.y - a.y);
}

LookDirection::LookDirection(double ux, double uy) {
  const double norm = std::hypot(ux, uy);
  if (!std::isfinite(norm) || norm == 0.0)
    throw GeometryError("look direction needs a finite, non-zero vector");
  ux_ = ux / norm;
  uy_ = uy / norm;
}

MicArray::MicArray(ScenePoint mic0, ScenePoint mic1) : mics_{mic0, mic1} {
  if (!finite(mic0) || !finite(mic1))
    throw GeometryError("microphone coordinates must be finite");
  if (!(spacing() > 0.0))
    throw GeometryError("microphones must not coincide");
}

ScenePoint MicArray::center() const noexcept {
  return {0.5 * (mics_[0].x + mics_[1].x), 0.5 * (mics_[0].y + mics_[1].y)};
}

double MicArray::spacing() const noexcept { return distance(mics_[0], mics_[1]); }

MicArray MicArray::translated(double dx, double dy) const {
  return MicArray({mics_[0].x + dx, mics_[0].y + dy}, {mics_[1].x + dx, mics_[1].y + dy});
}

ScenePoint image_source(const ScenePoint &source, double wall_y) noexcept {
  return {source.x, 2.0 * wall_y - source.y};
}

double propagation_delay(const ScenePoint &from, const ScenePoint &to, double c) {
  if (!(c > 0.0))
    throw ConfigError("sound speed must be positive");
  return distance(from, to) / c;
}

LookDirection look_direction_to(const ScenePoint &from, const ScenePoint &to) {
  if (from == to)
    throw GeometryError("look direction between coincident points");
  return LookDirection(to.x - from.x, to.y - from.y);
}

double specular_path_length(const ScenePoint &source, const ScenePoint &receiver, double wall_y) {
  const double hs = wall_y - source.y;
  const double hr = wall_y - receiver.y;
  if (hs * hr < 0.0)
    throw GeometryError("specular path: source and receiver lie on opposite sides of the wall");
  const double total = std::abs(hs) + std::abs(hr);
  if (total == 0.0)
    return distance(source, receiver);
  // Bounce point splits the horizontal offset in proportion to the heights.
  const double bx = source.x + (receiver.x - source.x) * std::abs(hs) / total;
  const ScenePoint bounce{bx, wall_y};
  return distance(source, bounce) + distance(bounce, receiver);
}

double reflected_minus_direct_delay(const ScenePoint &source, const ScenePoint &receiver,
                                    double wall_y, double c) {
  return propagation_delay(image_source(source, wall_y), receiver, c) -
         propagation_delay(source, receiver, c);
}

} // namespace propsense::geometry
