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

// Multi-view reconstruction network with a metric-scale head.
//
// Every stage works on all N frames of a scene at once; tensors carry the
// frame index as their leading axis. Frame 0 defines the world frame.

#include <stdexcept>
#include <vector>

#include "scalerecon/autodiff/ops.hpp"
#include "scalerecon/autodiff/parameters.hpp"
#include "scalerecon/model/config.hpp"
#include "scalerecon/prior/prior.hpp"

namespace scalerecon::model {

using ad::Tensor;

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EmbeddedImages {
  Tensor class_token;  // [N, 1, C]
  Tensor patches;      // [N, P, C]
};

/// Camera and patch tokens after the aggregator. Class and register tokens
/// take part in attention but are not exported.
struct AggregatedTokens {
  Tensor camera;   // [N, 1, C]
  Tensor patches;  // [N, P, C]
};

struct CameraOutput {
  Tensor quat;         // [N, 4], unit norm; frame 0 is (1, 0, 0, 0)
  Tensor translation;  // [N, 3], normalized units; frame 0 is zero
  Tensor fov;          // [N, 2], radians in (0, pi)

  /// [N, 9] = (quat, translation, fov).
  Tensor packed() const;
};

struct DenseOutput {
  Tensor depth;       // [N, H, W], > 0
  Tensor depth_conf;  // [N, H, W], > 0
  Tensor points;      // [N, H, W, 3], frame-0 coordinates
  Tensor point_conf;  // [N, H, W], > 0
};

struct ModelOutput {
  EmbeddedImages embedded;
  AggregatedTokens aggregated;
  CameraOutput camera;
  DenseOutput dense;
  Tensor scale;  // scalar S > 0; the constant 1 when the scale head is disabled
};

struct MetricOutput {
  Tensor depth;        // [N, H, W]
  Tensor points;       // [N, H, W, 3]
  Tensor translation;  // [N, 3]
};

class UniScaleModel {
 public:
  /// Validates the config and initializes every parameter from config.seed.
  explicit UniScaleModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  ad::ParameterStore& params() { return params_; }
  const ad::ParameterStore& params() const { return params_; }

  /// images: [N, 3, H, W] in [0, 1].
  EmbeddedImages patchify_embed(const Tensor& images) const;

  /// Learned camera and register tokens around the embedded patches, with
  /// the main-path prior embeddings applied when given.
  prior::TokenStreams assemble_tokens(const EmbeddedImages& embedded,
                                      const prior::PriorEmbeddings* priors = nullptr) const;

  AggregatedTokens aggregate(const prior::TokenStreams& tokens) const;

  CameraOutput camera_head(const Tensor& camera_tokens) const;
  DenseOutput dense_head(const Tensor& patch_tokens) const;

  /// Softmax weights over patches, [N, P, 1].
  Tensor pool_weights(const Tensor& patch_tokens) const;
  /// Weighted sum of patch tokens, [N, 1, C].
  Tensor attention_pool(const Tensor& patch_tokens) const;

  /// Mean over frames of exp(MLP(concat of normalized tokens)). Prior
  /// embeddings, when given, are added to the aggregated camera tokens (or
  /// class tokens when the camera input is disabled) and to the aggregated
  /// patches before pooling.
  Tensor scale_head(const AggregatedTokens& aggregated, const Tensor& class_tokens,
                    const prior::PriorEmbeddings* priors = nullptr) const;

  ModelOutput forward(const Tensor& images, const prior::PriorBundle& priors = {}) const;

 private:
  Tensor attention(const Tensor& x, const std::string& prefix) const;
  Tensor block(const Tensor& x, const std::string& prefix) const;
  const Tensor& param(const std::string& name) const { return params_.get(name); }

  ModelConfig config_;
  ad::ParameterStore params_;
};

/// Multiplies depth, points and translations by S. Rotations and fields of
/// view are scale-free and left alone.
MetricOutput metricize(const DenseOutput& dense, const CameraOutput& camera, const Tensor& scale);

/// [N, H, W, r*r*c] -> [N, H*r, W*r, c].
Tensor pixel_shuffle(const Tensor& x, std::size_t factor);

}  // namespace scalerecon::model
