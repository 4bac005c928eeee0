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

// Planar scene geometry: the wall is the line y = wall_y.

#pragma once

#include <array>

namespace propsense::geometry {

struct ScenePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const ScenePoint &, const ScenePoint &) = default;
};

double distance(const ScenePoint &a, const ScenePoint &b) noexcept;

class LookDirection {
public:
  // Normalizes (ux, uy); throws GeometryError for a zero or non-finite vector.
  LookDirection(double ux, double uy);

  double ux() const noexcept { return ux_; }
  double uy() const noexcept { return uy_; }
  double dot(double x, double y) const noexcept { return ux_ * x + uy_ * y; }

private:
  double ux_;
  double uy_;
};

class MicArray {
public:
  // Throws GeometryError for coincident or non-finite microphones.
  MicArray(ScenePoint mic0, ScenePoint mic1);

  const std::array<ScenePoint, 2> &mics() const noexcept { return mics_; }
  const ScenePoint &mic(std::size_t i) const { return mics_.at(i); }
  ScenePoint center() const noexcept;
  double spacing() const noexcept;

  // Same array shifted by (dx, dy).
  MicArray translated(double dx, double dy) const;

private:
  std::array<ScenePoint, 2> mics_;
};

// Mirror of `source` across the wall.
ScenePoint image_source(const ScenePoint &source, double wall_y) noexcept;

// Travel time of a straight path at sound speed c (> 0).
double propagation_delay(const ScenePoint &from, const ScenePoint &to, double c);

LookDirection look_direction_to(const ScenePoint &from, const ScenePoint &to);

// Path length source -> wall -> receiver via the explicit specular point.
double specular_path_length(const ScenePoint &source, const ScenePoint &receiver, double wall_y);

// Delay of the wall-reflected path relative to the direct path at `receiver`.
double reflected_minus_direct_delay(const ScenePoint &source, const ScenePoint &receiver,
                                    double wall_y, double c);

} // namespace propsense::geometry
