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

// Ablation harness: each variant is trained next to the full model under
// identical seeds and evaluated on the same held-out scenes.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalerecon/eval/metrics.hpp"
#include "scalerecon/eval/report.hpp"
#include "scalerecon/train/trainer.hpp"

namespace scalerecon::eval {

struct AblationSpec {
  model::ModelConfig base;
  train::TrainConfig train;
  EvalConfig eval;  // inlier threshold and view limit; mode and priors are swept
  std::vector<std::string> variants;  // "full" is always run first
};

struct VariantResult {
  std::string variant;
  model::ModelConfig model;
  std::vector<double> loss;        // total training loss per step
  std::vector<double> depth_loss;  // depth term per step
  // Image-only and K+P, aligned and (on metric scenes) metric.
  EvalReport aligned_none, aligned_kp;
  std::optional<EvalReport> metric_none, metric_kp;
};

struct AblationResult {
  std::vector<VariantResult> variants;

  nlohmann::json to_json() const;
  /// Variant rows with metric and aligned rel / tau, image-only and with
  /// both priors.
  std::string table() const;
  /// Training loss against step for every variant, smoothed over `window`
  /// steps.
  std::string loss_chart(std::size_t window) const;
};

/// Throws model::ConfigError for an unknown variant name.
AblationResult run_ablation(const AblationSpec& spec, const std::vector<synth::SceneSample>& train_scenes,
                            const std::vector<NamedScene>& eval_scenes, std::ostream* progress = nullptr);

/// Trailing moving average.
std::vector<double> moving_average(const std::vector<double>& x, std::size_t window);

}  // namespace scalerecon::eval
