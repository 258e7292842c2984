// Copyright 2026 The scalerecon Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "scalerecon/geometry/geometry.hpp"

namespace scalerecon::sup {

class SupervisionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultCapFactor = 50.0;

/// Metric-to-normalized conversion for one scene.
struct ScaleTarget {
  double scale = 1.0;       // meters per normalized unit
  double depth_cap = 0.0;   // meters; depths above it were clamped
  int frames = 0;
  int width = 0;
  int height = 0;
  std::vector<double> depth;         // [N, H, W] normalized, 0 where invalid
  std::vector<double> points;        // [N, H, W, 3] normalized, frame-0 coordinates
  std::vector<std::uint8_t> valid;   // [N, H, W]
  std::vector<geom::Pose> poses;     // translations normalized
};

/// Median of the valid depths (mean of the two middle values for an even
/// count). Throws when nothing is valid.
double median_valid_depth(std::span<const double> depths);

/// Clamps depths to cap_factor times the scene's median valid depth, lifts
/// every valid pixel into the frame-0 world and sets the scale to the mean
/// distance of those points from the origin. Poses must be frame-0 anchored.
ScaleTarget compute_scale_target(std::span<const double> depths, std::span<const geom::Intrinsics> intrinsics,
                                 std::span<const geom::Pose> poses, double cap_factor = kDefaultCapFactor);

}  // namespace scalerecon::sup
