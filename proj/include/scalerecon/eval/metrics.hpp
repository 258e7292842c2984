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

// Depth evaluation in metric and median-aligned modes.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalerecon/model/model.hpp"
#include "scalerecon/synth/scene.hpp"

namespace scalerecon::eval {

class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultInlierThreshold = 1.03;

/// Mean of |pred - gt| / gt over masked pixels, times 100.
double absrel(std::span<const double> pred, std::span<const double> gt, std::span<const std::uint8_t> mask);

/// Percentage of masked pixels with max(pred / gt, gt / pred) < threshold.
double inlier_ratio(std::span<const double> pred, std::span<const double> gt, std::span<const std::uint8_t> mask,
                    double threshold = kDefaultInlierThreshold);

/// pred * median(gt) / median(pred) over the mask (one frame).
std::vector<double> median_align(std::span<const double> pred, std::span<const double> gt,
                                 std::span<const std::uint8_t> mask);

enum class EvalMode { kMetric, kAligned };

const char* mode_name(EvalMode mode);
EvalMode parse_mode(const std::string& name);

struct EvalConfig {
  EvalMode mode = EvalMode::kAligned;
  bool use_pose = false;
  bool use_intrinsics = false;
  double inlier_threshold = kDefaultInlierThreshold;
  /// Evaluate on the first `max_frames` views of each scene (0 = all).
  int max_frames = 0;

  void validate() const;
  std::string prior_label() const;
};

struct SceneResult {
  std::string path;
  double rel = 0.0;
  double tau = 0.0;
  double scale_pred = 1.0;
  std::optional<double> scale_gt;  // absent for non-metric scenes
};

struct EvalReport {
  EvalConfig config;
  std::vector<SceneResult> scenes;  // ordered by path
  double mean_rel = 0.0;
  double mean_tau = 0.0;
  // S_pred / S_gt over metric scenes (zero counts when none).
  std::size_t scale_count = 0;
  double scale_ratio_mean = 0.0;
  double scale_ratio_min = 0.0;
  double scale_ratio_max = 0.0;

  nlohmann::json to_json() const;
};

struct NamedScene {
  std::string path;
  synth::SceneSample sample;
};

/// Scores a predicted depth stack [N, H, W] against a scene's stored depth.
/// `pred_depth` must already be in the scene's units for metric mode; the
/// aligned mode rescales every frame by its own median ratio.
SceneResult score_depth(std::span<const double> pred_depth, const synth::SceneSample& scene, const EvalConfig& config);

/// Runs the model on each scene with the configured priors, metricizes with
/// the predicted scale and scores the depth. Rejects metric mode on
/// non-metric scenes.
SceneResult evaluate_scene(const model::UniScaleModel& net, const NamedScene& scene, const EvalConfig& config);

/// Scenes run on up to `jobs` threads over the read-only model; the report
/// does not depend on `jobs`.
EvalReport evaluate(const model::UniScaleModel& net, std::vector<NamedScene> scenes, const EvalConfig& config,
                    std::size_t jobs = 1);

/// Aggregates per-scene results (sorted by path) into a report.
EvalReport summarize(std::vector<SceneResult> results, const EvalConfig& config);

/// The four prior configurations: none, intrinsics, poses, both.
std::vector<EvalConfig> prior_sweep(const EvalConfig& base);

/// Loads the scenes of one split listed in a manifest.
std::vector<NamedScene> load_split(const std::filesystem::path& manifest_path, const std::string& split);

}  // namespace scalerecon::eval
