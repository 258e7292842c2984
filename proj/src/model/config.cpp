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

#include "scalerecon/model/config.hpp"

#include <array>
#include <set>

namespace scalerecon::model {

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("model config: " + msg); };
  if (image_size <= 0 || patch_size <= 0) fail("image_size and patch_size must be positive");
  if (image_size % patch_size != 0) fail("image_size must be divisible by patch_size");
  if (patch_size % 4 != 0) fail("patch_size must be a multiple of 4");
  if (embed_dim <= 0 || attention_heads <= 0 || embed_dim % attention_heads != 0) {
    fail("embed_dim must be a positive multiple of attention_heads");
  }
  if (aggregator_blocks < 1) fail("aggregator_blocks must be at least 1");
  if (register_count < 0) fail("register_count must be nonnegative");
  if (mlp_ratio < 1) fail("mlp_ratio must be at least 1");
  if (dense_channels1 < 1 || dense_channels2 < 1) fail("dense channel counts must be positive");
  if (scale_head && scale_input_count() == 0) fail("the scale head needs at least one input token type");
}

namespace {

const char* encoding_name(PoseEncoding e) { return e == PoseEncoding::kRot6D ? "rot6d" : "quat"; }

PoseEncoding parse_encoding(const std::string& s) {
  if (s == "rot6d") return PoseEncoding::kRot6D;
  if (s == "quat") return PoseEncoding::kQuaternion;
  throw ConfigError("model config: pose_encoding must be \"rot6d\" or \"quat\", got \"" + s + "\"");
}

}  // namespace

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{
      {"image_size", c.image_size},
      {"patch_size", c.patch_size},
      {"embed_dim", c.embed_dim},
      {"aggregator_blocks", c.aggregator_blocks},
      {"attention_heads", c.attention_heads},
      {"register_count", c.register_count},
      {"mlp_ratio", c.mlp_ratio},
      {"dense_channels1", c.dense_channels1},
      {"dense_channels2", c.dense_channels2},
      {"seed", c.seed},
      {"pose_encoding", encoding_name(c.pose_encoding)},
      {"scale_head", c.scale_head},
      {"scale_use_camera", c.scale_use_camera},
      {"scale_use_patch", c.scale_use_patch},
      {"scale_use_class", c.scale_use_class},
      {"prior_injection", c.prior_injection},
      {"prior_into_scale_head", c.prior_into_scale_head},
  };
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  if (!j.is_object()) throw ConfigError("model config: expected a JSON object");
  nlohmann::json defaults;
  to_json(defaults, ModelConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("model config: unknown key \"" + key + "\"");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("image_size", c.image_size);
    get("patch_size", c.patch_size);
    get("embed_dim", c.embed_dim);
    get("aggregator_blocks", c.aggregator_blocks);
    get("attention_heads", c.attention_heads);
    get("register_count", c.register_count);
    get("mlp_ratio", c.mlp_ratio);
    get("dense_channels1", c.dense_channels1);
    get("dense_channels2", c.dense_channels2);
    get("seed", c.seed);
    if (j.contains("pose_encoding")) c.pose_encoding = parse_encoding(j.at("pose_encoding").get<std::string>());
    get("scale_head", c.scale_head);
    get("scale_use_camera", c.scale_use_camera);
    get("scale_use_patch", c.scale_use_patch);
    get("scale_use_class", c.scale_use_class);
    get("prior_injection", c.prior_injection);
    get("prior_into_scale_head", c.prior_into_scale_head);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
}

namespace {

constexpr std::array<std::string_view, 8> kVariants = {
    "full",
    "no-camera-token",
    "no-class-token",
    "no-agg-patch-token",
    "no-prior-into-scale-head",
    "no-prior-injection",
    "no-scale-head",
    "quat-pose-encoder",
};

}  // namespace

std::span<const std::string_view> variant_names() { return kVariants; }

ModelConfig with_variant(ModelConfig c, std::string_view v) {
  if (v == "full") {
  } else if (v == "no-camera-token") {
    c.scale_use_camera = false;
  } else if (v == "no-class-token") {
    c.scale_use_class = false;
  } else if (v == "no-agg-patch-token") {
    c.scale_use_patch = false;
  } else if (v == "no-prior-into-scale-head") {
    c.prior_into_scale_head = false;
  } else if (v == "no-prior-injection") {
    c.prior_injection = false;
  } else if (v == "no-scale-head") {
    c.scale_head = false;
  } else if (v == "quat-pose-encoder") {
    c.pose_encoding = PoseEncoding::kQuaternion;
  } else {
    throw ConfigError("unknown ablation variant \"" + std::string(v) + "\"");
  }
  return c;
}

}  // namespace scalerecon::model
