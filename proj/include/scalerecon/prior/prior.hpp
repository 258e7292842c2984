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

// Camera priors: encoders for known poses and intrinsics, routing of their
// embeddings onto tokens, and the training-time prior sampler.

#include <span>
#include <stdexcept>
#include <vector>

#include "scalerecon/autodiff/ops.hpp"
#include "scalerecon/autodiff/parameters.hpp"
#include "scalerecon/common/random.hpp"
#include "scalerecon/geometry/geometry.hpp"
#include "scalerecon/model/config.hpp"

namespace scalerecon::prior {

class PriorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Known camera information for one scene. Each list is either empty or has
/// one entry per frame.
struct PriorBundle {
  std::vector<geom::Pose> poses;  // metric, frame-0 anchored
  std::vector<geom::Intrinsics> intrinsics;
  /// Divisor for pose translations. 0 means "derive from the poses": the
  /// mean camera-center norm, or 1 when that is zero.
  double pose_scale = 0.0;

  bool has_pose() const { return !poses.empty(); }
  bool has_intrinsics() const { return !intrinsics.empty(); }
  bool empty() const { return !has_pose() && !has_intrinsics(); }
  /// Throws PriorError unless each list is empty or has `frames` entries.
  void validate(std::size_t frames) const;
  double resolved_pose_scale() const;
};

/// Embeddings produced from a bundle. Undefined tensors mean "absent".
struct PriorEmbeddings {
  ad::Tensor pose;  // [N, 1, C]
  ad::Tensor ray;   // [N, P, C]
};

/// Registers the encoder weights (group kScaleAndPriors).
void add_prior_parameters(ad::ParameterStore& params, const model::ModelConfig& config, Rng& rng);

/// Per-frame pose vector: 6D rotation (or canonical quaternion) followed by
/// translation / scale_norm. Shape [N, 9] or [N, 7].
ad::Tensor pose_features(std::span<const geom::Pose> poses, double scale_norm, model::PoseEncoding encoding);

/// Two-layer MLP over pose_features; output [N, 1, C].
ad::Tensor encode_pose(const ad::ParameterStore& params, const model::ModelConfig& config,
                       std::span<const geom::Pose> poses, double scale_norm);

/// Raymap cut into the image patch grid: [N, P, 3 * patch^2], values ordered
/// (channel, row, column) within a patch like image patches.
ad::Tensor patchified_raymaps(std::span<const geom::Intrinsics> intrinsics, const model::ModelConfig& config);

/// Linear projection of each raymap patch; output [N, P, C].
ad::Tensor encode_intrinsics(const ad::ParameterStore& params, const model::ModelConfig& config,
                             std::span<const geom::Intrinsics> intrinsics);

/// Encodes whatever the bundle carries.
PriorEmbeddings encode_bundle(const ad::ParameterStore& params, const model::ModelConfig& config,
                              const PriorBundle& bundle);

enum class Destination { kMainTokens, kScaleHead };

/// The token streams a prior can reach. Class and register tokens are
/// carried so tests can confirm routing never touches them.
struct TokenStreams {
  ad::Tensor class_token;  // [N, 1, C]
  ad::Tensor camera;       // [N, 1, C]
  ad::Tensor registers;    // [N, R, C]
  ad::Tensor patches;      // [N, P, C]
};

/// Adds pose embeddings to camera tokens and ray embeddings to patch tokens.
/// With `pose_into_class` (no camera token in the scale head) pose embeddings
/// go to the class token instead.
void route(TokenStreams& tokens, const PriorEmbeddings& embeddings, Destination destination,
           bool pose_into_class = false);

struct PriorConfig {
  bool inject_any = false;
  bool use_pose = false;
  bool use_intrinsics = false;
  bool supervise_scale = false;
};

struct PriorProbabilities {
  double inject = 0.5;
  double per_type = 0.9;
  double supervise = 0.95;
};

/// Always consumes four uniform draws so the stream position does not depend
/// on the outcome.
PriorConfig sample_prior_config(Rng& rng, bool batch_is_metric, const PriorProbabilities& p = {});

}  // namespace scalerecon::prior
