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
#include <vector>

#include "scalerecon/autodiff/ops.hpp"
#include "scalerecon/geometry/geometry.hpp"
#include "scalerecon/model/model.hpp"
#include "scalerecon/supervision/scale_target.hpp"

namespace scalerecon::sup {

using ad::Tensor;

struct LossWeights {
  double huber_delta = 0.1;
  double conf_alpha = 0.2;
};

/// Mean Huber penalty over the 9 camera components of every frame. Predicted
/// quaternions are sign-flipped to w >= 0 before differencing.
/// pred, target: [N, 9] as (quat, translation, fov).
Tensor loss_camera(const Tensor& pred, const Tensor& target, double delta);

/// Confidence-weighted depth loss plus a first-order gradient term:
///   mean_valid(c |d - d*| - alpha log c)
///   + mean over valid x-pairs |dx d - dx d*| + mean over valid y-pairs |dy d - dy d*|
/// pred, conf, gt: [N, H, W]; valid has N*H*W entries.
Tensor loss_depth(const Tensor& pred, const Tensor& conf, const Tensor& gt, std::span<const std::uint8_t> valid,
                  double alpha);

/// As loss_depth with a per-pixel L1 over the 3 point coordinates and the
/// gradient term summed over channels. pred, gt: [N, H, W, 3]; conf: [N, H, W].
Tensor loss_pmap(const Tensor& pred, const Tensor& conf, const Tensor& gt, std::span<const std::uint8_t> valid,
                 double alpha);

/// |log S* - log S|, or a constant zero (no graph) when not supervised.
Tensor loss_scale(const Tensor& scale_pred, double scale_gt, bool supervise);

/// Camera targets [N, 9] in normalized units.
Tensor camera_targets(std::span<const geom::Pose> normalized_poses, std::span<const geom::Intrinsics> intrinsics);

struct LossReport {
  double camera = 0.0;
  double depth = 0.0;
  double pmap = 0.0;
  double scale = 0.0;
  double total = 0.0;
  bool scale_supervised = false;
};

/// Targets for one scene as constant tensors.
struct SceneTargets {
  Tensor camera;  // [N, 9]
  Tensor depth;   // [N, H, W]
  Tensor points;  // [N, H, W, 3]
  std::vector<std::uint8_t> valid;
  double scale = 1.0;
};

SceneTargets make_targets(const ScaleTarget& target, std::span<const geom::Intrinsics> intrinsics);

struct Losses {
  Tensor total;
  LossReport report;
};

Losses compute_losses(const model::ModelOutput& out, const SceneTargets& targets, bool supervise_scale,
                      const LossWeights& weights = {});

}  // namespace scalerecon::sup
