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
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace scalerecon::model {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PoseEncoding { kRot6D, kQuaternion };

struct ModelConfig {
  int image_size = 64;
  int patch_size = 8;  // multiple of 4: the dense head upsamples x2, x2, x(patch/4)
  int embed_dim = 64;
  int aggregator_blocks = 4;  // even blocks attend within a frame, odd ones across frames
  int attention_heads = 4;
  int register_count = 4;
  int mlp_ratio = 2;
  int dense_channels1 = 32;
  int dense_channels2 = 16;
  std::uint64_t seed = 0;

  PoseEncoding pose_encoding = PoseEncoding::kRot6D;
  bool scale_head = true;
  bool scale_use_camera = true;
  bool scale_use_patch = true;
  bool scale_use_class = true;
  bool prior_injection = true;
  bool prior_into_scale_head = true;

  int grid() const { return image_size / patch_size; }
  int patch_count() const { return grid() * grid(); }
  int tokens_per_frame() const { return 2 + register_count + patch_count(); }
  int patch_values() const { return 3 * patch_size * patch_size; }
  int pose_input_width() const { return pose_encoding == PoseEncoding::kRot6D ? 9 : 7; }
  int scale_input_count() const {
    return int(scale_use_camera) + int(scale_use_patch) + int(scale_use_class);
  }

  /// Throws ConfigError on inconsistent extents.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ModelConfig& c);

/// Ablation variants.
std::span<const std::string_view> variant_names();
/// Applies one named variant on top of `base`. Throws ConfigError for an
/// unknown name.
ModelConfig with_variant(ModelConfig base, std::string_view variant);

}  // namespace scalerecon::model
