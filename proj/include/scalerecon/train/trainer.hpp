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
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalerecon/autodiff/checkpoint.hpp"
#include "scalerecon/autodiff/optim.hpp"
#include "scalerecon/model/model.hpp"
#include "scalerecon/prior/prior.hpp"
#include "scalerecon/supervision/losses.hpp"
#include "scalerecon/synth/scene.hpp"

namespace scalerecon::train {

class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer and sampling settings. The defaults are sized for training
/// from scratch on a desk: the fine-tuning rates (1e-6 backbone, 5e-5 scale
/// head and prior encoders, 1000 warmup steps) are far too small to move a
/// randomly initialized network in a few thousand steps.
struct TrainConfig {
  std::int64_t steps = 2000;
  std::int64_t checkpoint_every = 500;  // 0 disables periodic checkpoints
  std::uint64_t seed = 0;
  double lr_backbone = 2e-3;
  double lr_scale_and_priors = 2e-3;
  double lr_warmup_start = 1e-8;
  std::int64_t warmup_steps = 100;
  /// Cosine decay after warmup down to this fraction of the peak at `steps`;
  /// 1 keeps the rate constant.
  double lr_final_fraction = 0.05;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  double huber_delta = 0.1;
  double conf_alpha = 0.2;
  double p_inject = 0.5;
  double p_per_type = 0.9;
  double p_supervise = 0.95;

  void validate() const;
  ad::GroupSchedules schedules() const;
  ad::AdamWConfig adamw() const;
  prior::PriorProbabilities probabilities() const { return {p_inject, p_per_type, p_supervise}; }
  sup::LossWeights loss_weights() const { return {huber_delta, conf_alpha}; }
  bool operator==(const TrainConfig&) const = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, TrainConfig& c);

/// One scene prepared for the network: images, normalized targets and the
/// full set of priors the sampler may draw from.
struct TrainExample {
  ad::Tensor images;  // [N, 3, H, W]
  sup::SceneTargets targets;
  bool metric = true;
  std::vector<geom::Pose> poses;  // as stored (meters for metric scenes)
  std::vector<geom::Intrinsics> intrinsics;
  double scale = 1.0;  // scale target of the stored depths
};

TrainExample make_example(const synth::SceneSample& sample);

/// Priors selected by a sampled configuration. During training pose
/// translations are divided by the scene's ground-truth scale target.
prior::PriorBundle select_priors(const TrainExample& example, const prior::PriorConfig& config);

struct StepRecord {
  std::int64_t step = 0;  // optimizer steps applied before this one
  std::uint64_t seed = 0;
  std::size_t scene = 0;
  prior::PriorConfig priors;
  sup::LossReport losses;
  double grad_norm = 0.0;
  double lr_backbone = 0.0;
  double lr_scale_and_priors = 0.0;
  bool applied = false;

  nlohmann::json to_json() const;
};

class Trainer {
 public:
  Trainer(const model::ModelConfig& model_config, const TrainConfig& train_config,
          std::vector<synth::SceneSample> scenes);

  /// Rebuilds the trainer from a checkpoint written by `checkpoint()`.
  /// Throws ad::FormatError when the file is not a trainer checkpoint.
  static Trainer resume(const ad::Checkpoint& checkpoint, std::vector<synth::SceneSample> scenes);

  StepRecord step();

  /// Steps until `steps()` reaches `target`, appending one JSON line per
  /// step to `log` (when given) and writing a checkpoint into
  /// `checkpoint_dir` (when non-empty) every `checkpoint_every` steps and at
  /// the end.
  void run(std::int64_t target, std::ostream* log, const std::filesystem::path& checkpoint_dir);

  ad::Checkpoint checkpoint() const;

  /// Attempted steps, including rejected ones.
  std::int64_t steps() const { return steps_; }
  const ad::AdamWState& optimizer() const { return optimizer_; }
  model::UniScaleModel& model() { return *model_; }
  const model::UniScaleModel& model() const { return *model_; }
  const TrainConfig& config() const { return config_; }

 private:
  TrainConfig config_;
  std::unique_ptr<model::UniScaleModel> model_;
  std::vector<TrainExample> examples_;
  ad::AdamWState optimizer_;
  Rng rng_;
  std::int64_t steps_ = 0;
};

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::int64_t step);

/// Model configuration stored in a checkpoint header.
model::ModelConfig checkpoint_model_config(const ad::Checkpoint& checkpoint);

/// Model with parameters restored from a trainer checkpoint.
std::unique_ptr<model::UniScaleModel> load_model(const ad::Checkpoint& checkpoint);

}  // namespace scalerecon::train
