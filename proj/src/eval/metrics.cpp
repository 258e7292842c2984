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

#include "scalerecon/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scalerecon/common/parallel.hpp"

namespace scalerecon::eval {

namespace {

void check_inputs(const char* op, std::span<const double> pred, std::span<const double> gt,
                  std::span<const std::uint8_t> mask) {
  if (pred.size() != gt.size() || gt.size() != mask.size()) {
    throw EvalError(std::string(op) + ": prediction, ground truth and mask sizes differ");
  }
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    any = true;
    if (!(gt[i] > 0.0)) throw EvalError(std::string(op) + ": ground truth must be positive on the mask");
  }
  if (!any) throw EvalError(std::string(op) + ": empty mask");
}

double masked_median(std::span<const double> x, std::span<const std::uint8_t> mask) {
  std::vector<double> v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask[i]) v.push_back(x[i]);
  }
  if (v.empty()) throw EvalError("median_align: empty mask");
  const std::size_t hi = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + hi, v.end());
  if (v.size() % 2 == 1) return v[hi];
  return 0.5 * (*std::max_element(v.begin(), v.begin() + hi) + v[hi]);
}

}  // namespace

double absrel(std::span<const double> pred, std::span<const double> gt, std::span<const std::uint8_t> mask) {
  check_inputs("absrel", pred, gt, mask);
  double total = 0.0, n = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    total += std::abs(pred[i] - gt[i]) / gt[i];
    n += 1.0;
  }
  return 100.0 * total / n;
}

double inlier_ratio(std::span<const double> pred, std::span<const double> gt, std::span<const std::uint8_t> mask,
                    double threshold) {
  if (!(threshold > 1.0)) throw EvalError("inlier_ratio: threshold must exceed 1");
  check_inputs("inlier_ratio", pred, gt, mask);
  double inliers = 0.0, n = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    n += 1.0;
    if (pred[i] > 0.0 && std::max(pred[i] / gt[i], gt[i] / pred[i]) < threshold) inliers += 1.0;
  }
  return 100.0 * inliers / n;
}

std::vector<double> median_align(std::span<const double> pred, std::span<const double> gt,
                                 std::span<const std::uint8_t> mask) {
  check_inputs("median_align", pred, gt, mask);
  const double mp = masked_median(pred, mask);
  if (!(mp > 0.0)) throw EvalError("median_align: prediction median must be positive");
  const double ratio = masked_median(gt, mask) / mp;
  std::vector<double> out(pred.begin(), pred.end());
  for (double& x : out) x *= ratio;
  return out;
}

const char* mode_name(EvalMode m) { return m == EvalMode::kMetric ? "metric" : "aligned"; }

EvalMode parse_mode(const std::string& s) {
  if (s == "metric") return EvalMode::kMetric;
  if (s == "aligned") return EvalMode::kAligned;
  throw EvalError("eval mode must be \"metric\" or \"aligned\", got \"" + s + "\"");
}

void EvalConfig::validate() const {
  if (!(inlier_threshold > 1.0)) throw EvalError("eval config: inlier threshold must exceed 1");
  if (max_frames < 0) throw EvalError("eval config: max_frames must be nonnegative");
}

std::string EvalConfig::prior_label() const {
  if (use_pose && use_intrinsics) return "K+P";
  if (use_pose) return "P";
  if (use_intrinsics) return "K";
  return "none";
}

SceneResult score_depth(std::span<const double> pred, const synth::SceneSample& scene, const EvalConfig& config) {
  config.validate();
  if (config.mode == EvalMode::kMetric && !scene.metric) {
    throw EvalError("metric evaluation requested on a non-metric scene");
  }
  const std::size_t px = static_cast<std::size_t>(scene.width) * scene.height;
  const std::size_t frames = pred.size() / px;
  if (pred.size() % px != 0 || frames == 0 || frames > static_cast<std::size_t>(scene.frames)) {
    throw EvalError("score_depth: prediction size does not match the scene");
  }
  const std::vector<double> gt(scene.depths.begin(), scene.depths.begin() + frames * px);
  std::vector<std::uint8_t> mask(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) mask[i] = gt[i] > 0.0;

  std::vector<double> compared(pred.begin(), pred.end());
  if (config.mode == EvalMode::kAligned) {
    for (std::size_t f = 0; f < frames; ++f) {
      const auto sub = [&](auto& v) { return std::span(v).subspan(f * px, px); };
      if (std::none_of(mask.begin() + f * px, mask.begin() + (f + 1) * px, [](auto m) { return m != 0; })) continue;
      const auto aligned = median_align(sub(compared), sub(gt), sub(mask));
      std::copy(aligned.begin(), aligned.end(), compared.begin() + f * px);
    }
  }
  SceneResult r;
  r.rel = absrel(compared, gt, mask);
  r.tau = inlier_ratio(compared, gt, mask, config.inlier_threshold);
  r.scale_gt = scene.scale;
  return r;
}

SceneResult evaluate_scene(const model::UniScaleModel& net, const NamedScene& ns, const EvalConfig& config) {
  const synth::SceneSample& s = ns.sample;
  if (config.mode == EvalMode::kMetric && !s.metric) {
    throw EvalError("scene " + ns.path + ": metric evaluation requested on a non-metric scene");
  }
  if (s.width != net.config().image_size || s.height != net.config().image_size) {
    throw EvalError("scene " + ns.path + ": image size does not match the model");
  }
  const int frames = config.max_frames > 0 ? std::min(config.max_frames, s.frames) : s.frames;
  const std::size_t px = static_cast<std::size_t>(s.width) * s.height;
  const std::size_t N = frames;
  const std::vector<double> images(s.images.begin(), s.images.begin() + N * 3 * px);
  prior::PriorBundle priors;
  if (config.use_pose) priors.poses.assign(s.poses.begin(), s.poses.begin() + frames);
  if (config.use_intrinsics) priors.intrinsics.assign(frames, s.intrinsics);

  ad::NoGradGuard no_grad;
  const ad::Tensor input = ad::Tensor::from(
      {N, 3, static_cast<std::size_t>(s.height), static_cast<std::size_t>(s.width)}, images);
  const model::ModelOutput out = net.forward(input, priors);
  const model::MetricOutput metric = model::metricize(out.dense, out.camera, out.scale);
  const auto d = metric.depth.data();
  SceneResult r = score_depth(std::vector<double>(d.begin(), d.end()), s, config);
  r.path = ns.path;
  r.scale_pred = out.scale.item();
  return r;
}

EvalReport summarize(std::vector<SceneResult> results, const EvalConfig& config) {
  if (results.empty()) throw EvalError("evaluate: no scenes");
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  EvalReport rep;
  rep.config = config;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (const auto& r : results) {
    rep.mean_rel += r.rel;
    rep.mean_tau += r.tau;
    if (r.scale_gt) {
      const double ratio = r.scale_pred / *r.scale_gt;
      sum += ratio;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++rep.scale_count;
    }
  }
  rep.mean_rel /= static_cast<double>(results.size());
  rep.mean_tau /= static_cast<double>(results.size());
  if (rep.scale_count > 0) {
    rep.scale_ratio_mean = sum / static_cast<double>(rep.scale_count);
    rep.scale_ratio_min = lo;
    rep.scale_ratio_max = hi;
  }
  rep.scenes = std::move(results);
  return rep;
}

EvalReport evaluate(const model::UniScaleModel& net, std::vector<NamedScene> scenes, const EvalConfig& config,
                    std::size_t jobs) {
  config.validate();
  std::vector<SceneResult> results(scenes.size());
  parallel_for(scenes.size(), jobs, [&](std::size_t i) { results[i] = evaluate_scene(net, scenes[i], config); });
  return summarize(std::move(results), config);
}

std::vector<EvalConfig> prior_sweep(const EvalConfig& base) {
  std::vector<EvalConfig> out;
  for (auto [pose, intrinsics] : {std::pair{false, false}, {false, true}, {true, false}, {true, true}}) {
    EvalConfig c = base;
    c.use_pose = pose;
    c.use_intrinsics = intrinsics;
    out.push_back(c);
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json scenes_json = nlohmann::json::array();
  for (const auto& s : scenes) {
    scenes_json.push_back({{"path", s.path},
                           {"rel", s.rel},
                           {"tau", s.tau},
                           {"scale_pred", s.scale_pred},
                           {"scale_gt", s.scale_gt ? nlohmann::json(*s.scale_gt) : nlohmann::json(nullptr)}});
  }
  nlohmann::json j{
      {"mode", mode_name(config.mode)},
      {"priors", config.prior_label()},
      {"use_pose", config.use_pose},
      {"use_intrinsics", config.use_intrinsics},
      {"inlier_threshold", config.inlier_threshold},
      {"max_frames", config.max_frames},
      {"mean_rel", mean_rel},
      {"mean_tau", mean_tau},
      {"scenes", scenes_json},
  };
  if (scale_count > 0) {
    j["scale_ratio"] = {
        {"count", scale_count}, {"mean", scale_ratio_mean}, {"min", scale_ratio_min}, {"max", scale_ratio_max}};
  }
  return j;
}

std::vector<NamedScene> load_split(const std::filesystem::path& manifest_path, const std::string& split) {
  const synth::Manifest m = synth::read_manifest(manifest_path);
  std::vector<NamedScene> out;
  for (const auto& e : m.split(split)) {
    out.push_back({e.path, synth::read_scene(manifest_path.parent_path() / e.path)});
  }
  return out;
}

}  // namespace scalerecon::eval
