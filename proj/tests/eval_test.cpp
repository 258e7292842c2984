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

#include <gtest/gtest.h>

#include <cmath>

#include "scalerecon/eval/ablation.hpp"
#include "scalerecon/eval/metrics.hpp"
#include "scalerecon/eval/report.hpp"
#include "scalerecon/train/model_check.hpp"

namespace {

using namespace scalerecon;
using eval::EvalConfig;
using eval::EvalMode;

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

std::vector<std::uint8_t> all_valid(std::size_t n) { return std::vector<std::uint8_t>(n, 1); }

synth::SceneSample tiny_scene(std::uint64_t seed, bool metric = true) {
  synth::SceneSpec spec;
  spec.seed = seed;
  spec.frames = 2;
  spec.image_size = 16;
  spec.metric = metric;
  return synth::generate_scene(spec);
}

std::vector<eval::NamedScene> tiny_named(std::size_t n, std::uint64_t seed0) {
  std::vector<eval::NamedScene> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"scene_" + std::to_string(i), tiny_scene(seed0 + i)});
  return out;
}

TEST(AbsRel, UniformOverestimateGivesTen) {
  const std::vector<double> gt{1.0, 2.5, 7.0, 0.3};
  std::vector<double> pred;
  for (double g : gt) pred.push_back(1.1 * g);
  EXPECT_NEAR(eval::absrel(pred, gt, all_valid(4)), 10.0, 1e-12);
  EXPECT_EQ(eval::absrel(gt, gt, all_valid(4)), 0.0);
}

TEST(AbsRel, MatchesDirectSummationOnRandomMaskedGrid) {
  Rng rng(4);
  std::vector<double> pred(25), gt(25);
  std::vector<std::uint8_t> mask(25);
  for (int i = 0; i < 25; ++i) {
    gt[i] = uniform(rng, 0.5, 10.0);
    pred[i] = uniform(rng, 0.1, 12.0);
    mask[i] = bernoulli(rng, 0.7);
  }
  double sum = 0.0;
  int n = 0;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      const int i = 5 * r + c;
      if (!mask[i]) continue;
      sum += std::abs(pred[i] - gt[i]) / gt[i];
      ++n;
    }
  }
  ASSERT_GT(n, 0);
  EXPECT_NEAR(eval::absrel(pred, gt, mask), 100.0 * sum / n, 1e-12);
}

TEST(InlierRatio, UniformOffsetsAndHandCount) {
  const std::vector<double> gt(6, 2.0);
  std::vector<double> far(6, 2.1);  // ratio 1.05
  EXPECT_EQ(eval::inlier_ratio(far, gt, all_valid(6), 1.03), 0.0);
  EXPECT_EQ(eval::inlier_ratio(gt, gt, all_valid(6), 1.03), 100.0);
  // Ratios 1, 1.02, 1.04, 1/1.02, 1/1.05, and a masked-out outlier.
  const std::vector<double> pred{2.0, 2.04, 2.08, 2.0 / 1.02, 2.0 / 1.05, 40.0};
  const std::vector<std::uint8_t> mask{1, 1, 1, 1, 1, 0};
  EXPECT_NEAR(eval::inlier_ratio(pred, gt, mask, 1.03), 60.0, 1e-12);
  EXPECT_NEAR(eval::inlier_ratio(pred, gt, mask, 1.045), 80.0, 1e-12);
}

TEST(Metrics, RejectBadInputs) {
  const std::vector<double> v{1.0, 2.0};
  EXPECT_THROW(eval::absrel(v, v, std::vector<std::uint8_t>{0, 0}), eval::EvalError);
  EXPECT_THROW(eval::absrel(v, std::vector<double>{1.0, 0.0}, all_valid(2)), eval::EvalError);
  EXPECT_THROW(eval::absrel(v, std::vector<double>{1.0}, all_valid(2)), eval::EvalError);
  EXPECT_THROW(eval::inlier_ratio(v, v, all_valid(2), 1.0), eval::EvalError);
  EXPECT_THROW(eval::median_align(std::vector<double>{0.0, 0.0}, v, all_valid(2)), eval::EvalError);
  EXPECT_THROW(eval::parse_mode("relative"), eval::EvalError);
  EXPECT_EQ(eval::parse_mode("metric"), EvalMode::kMetric);
}

TEST(MedianAlign, RecoversScaledGroundTruth) {
  Rng rng(9);
  std::vector<double> gt(31);
  for (auto& g : gt) g = uniform(rng, 0.5, 9.0);
  for (double c : {0.25, 4.0}) {  // powers of two scale exactly
    std::vector<double> pred;
    for (double g : gt) pred.push_back(c * g);
    EXPECT_EQ(eval::median_align(pred, gt, all_valid(gt.size())), gt);
  }
  for (double c : {0.37, 3.7, 120.0}) {
    std::vector<double> pred;
    for (double g : gt) pred.push_back(c * g);
    const auto a = eval::median_align(pred, gt, all_valid(gt.size()));
    for (std::size_t i = 0; i < gt.size(); ++i) EXPECT_NEAR(a[i], gt[i], 1e-14 * gt[i]);
  }
}

TEST(MedianAlign, IdempotentAndUsesEvenMedian) {
  Rng rng(10);
  std::vector<double> gt(20), pred(20);
  for (int i = 0; i < 20; ++i) gt[i] = uniform(rng, 1.0, 5.0), pred[i] = uniform(rng, 0.2, 3.0);
  const auto once = eval::median_align(pred, gt, all_valid(20));
  const auto twice = eval::median_align(once, gt, all_valid(20));
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(twice[i], once[i], 1e-14 * once[i]);

  // Medians 2.5 and 5 for an even count: ratio 0.5.
  const auto a = eval::median_align(std::vector<double>{4, 6, 1, 9}, std::vector<double>{1, 2, 3, 4}, all_valid(4));
  EXPECT_EQ(a, (std::vector<double>{2, 3, 0.5, 4.5}));
}

TEST(ScoreDepth, AlignedRelIsScaleInvariant) {
  const synth::SceneSample s = tiny_scene(31);
  Rng rng(2);
  std::vector<double> pred;
  for (std::size_t i = 0; i < s.depths.size(); ++i) pred.push_back(uniform(rng, 0.5, 6.0));
  EvalConfig c;
  const auto base = eval::score_depth(pred, s, c);
  for (double k : {1e-3, 0.7, 13.0, 5e4}) {
    std::vector<double> scaled;
    for (double p : pred) scaled.push_back(k * p);
    const auto r = eval::score_depth(scaled, s, c);
    EXPECT_NEAR(r.rel, base.rel, 1e-12);
    EXPECT_NEAR(r.tau, base.tau, 1e-12);
  }
}

TEST(ScoreDepth, AlignsEachFrameSeparately) {
  const synth::SceneSample s = tiny_scene(32);
  const std::size_t px = 16 * 16;
  std::vector<double> pred = s.depths_f64();
  for (std::size_t i = 0; i < px; ++i) pred[i] *= 2.0;
  for (std::size_t i = px; i < 2 * px; ++i) pred[i] *= 0.125;
  EvalConfig c;
  const auto aligned = eval::score_depth(pred, s, c);
  EXPECT_EQ(aligned.rel, 0.0);
  EXPECT_EQ(aligned.tau, 100.0);
  c.mode = EvalMode::kMetric;
  EXPECT_GT(eval::score_depth(pred, s, c).rel, 50.0);
}

TEST(ScoreDepth, GroundTruthScoresPerfectlyInBothModes) {
  const synth::SceneSample s = tiny_scene(33);
  for (EvalMode m : {EvalMode::kMetric, EvalMode::kAligned}) {
    EvalConfig c;
    c.mode = m;
    const auto r = eval::score_depth(s.depths_f64(), s, c);
    EXPECT_EQ(r.rel, 0.0);
    EXPECT_EQ(r.tau, 100.0);
  }
  const synth::SceneSample nm = tiny_scene(34, false);
  EvalConfig c;
  EXPECT_EQ(eval::score_depth(nm.depths_f64(), nm, c).rel, 0.0);
  c.mode = EvalMode::kMetric;
  EXPECT_THROW(eval::score_depth(nm.depths_f64(), nm, c), eval::EvalError);
}

TEST(Evaluate, PriorSweepGivesFourDeterministicRows) {
  const model::UniScaleModel net(train::micro_model_config());
  const auto scenes = tiny_named(3, 40);
  EvalConfig base;
  base.mode = EvalMode::kMetric;
  const auto configs = eval::prior_sweep(base);
  ASSERT_EQ(configs.size(), 4u);
  std::vector<std::string> labels;
  std::vector<eval::EvalReport> reports;
  for (const auto& c : configs) {
    reports.push_back(eval::evaluate(net, scenes, c));
    labels.push_back(reports.back().config.prior_label());
    EXPECT_EQ(reports.back().scenes.size(), 3u);
    EXPECT_EQ(reports.back().scale_count, 3u);
    EXPECT_GE(reports.back().mean_rel, 0.0);
    EXPECT_GE(reports.back().mean_tau, 0.0);
    EXPECT_LE(reports.back().mean_tau, 100.0);
  }
  EXPECT_EQ(labels, (std::vector<std::string>{"none", "K", "P", "K+P"}));
  EXPECT_NE(reports[0].mean_rel, reports[3].mean_rel);
  EXPECT_EQ(eval::evaluate(net, scenes, configs[3]).to_json().dump(), reports[3].to_json().dump());

  // Scene order does not matter.
  auto reversed = scenes;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(eval::evaluate(net, reversed, configs[1]).to_json().dump(), reports[1].to_json().dump());

  const std::string table = eval::format_table(reports);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 6);
  const std::string csv = eval::to_csv(reports);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Evaluate, MetricModeRejectsNonMetricScenes) {
  const model::UniScaleModel net(train::micro_model_config());
  std::vector<eval::NamedScene> scenes{{"a", tiny_scene(50)}, {"b", tiny_scene(51, false)}};
  EvalConfig c;
  c.mode = EvalMode::kMetric;
  EXPECT_THROW(eval::evaluate(net, scenes, c), eval::EvalError);
  c.mode = EvalMode::kAligned;
  const auto r = eval::evaluate(net, scenes, c);
  EXPECT_EQ(r.scale_count, 1u);
}

TEST(Evaluate, PriorsOffMatchesZeroEmbeddings) {
  const model::UniScaleModel net(train::micro_model_config());
  const eval::NamedScene ns{"z", tiny_scene(60)};
  EvalConfig c;
  c.mode = EvalMode::kMetric;
  const auto off = eval::evaluate_scene(net, ns, c);

  ad::NoGradGuard no_grad;
  const ad::Tensor images = ns.sample.images_tensor();
  const auto& cfg = net.config();
  const std::size_t N = 2, P = cfg.patch_count(), C = cfg.embed_dim;
  prior::PriorEmbeddings zero{ad::Tensor::zeros({N, 1, C}), ad::Tensor::zeros({N, P, C})};
  const auto embedded = net.patchify_embed(images);
  const auto aggregated = net.aggregate(net.assemble_tokens(embedded, &zero));
  const auto camera = net.camera_head(aggregated.camera);
  const auto dense = net.dense_head(aggregated.patches);
  const auto scale = net.scale_head(aggregated, embedded.class_token, &zero);
  const auto metric = model::metricize(dense, camera, scale);
  const auto d = metric.depth.data();
  const auto zeroed = eval::score_depth(std::vector<double>(d.begin(), d.end()), ns.sample, c);
  EXPECT_EQ(zeroed.rel, off.rel);
  EXPECT_EQ(zeroed.tau, off.tau);
  EXPECT_EQ(scale.item(), off.scale_pred);
}

TEST(Evaluate, ViewSweepLimitsFrames) {
  const model::UniScaleModel net(train::micro_model_config());
  const auto scenes = tiny_named(2, 70);
  const auto sweep = eval::views_sweep(net, scenes, EvalConfig{}, {1, 2});
  ASSERT_EQ(sweep.size(), 2u);
  EXPECT_EQ(sweep[0].config.max_frames, 1);
  const std::string svg = eval::views_chart(sweep, false);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_THROW(eval::views_sweep(net, scenes, EvalConfig{}, {0}), eval::EvalError);
}

TEST(Report, ChartsAndDepthImages) {
  const std::string svg = eval::svg_line_chart("t <x>", "step", "loss", {{"a", {1, 2, 3}, {3, 2, NAN}}, {"b", {1}, {1}}});
  EXPECT_EQ(occurrences(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find("t &lt;x&gt;"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  const std::string img = eval::svg_depth_image({1, 2, 0, 4}, 2, 2, "d");
  EXPECT_NE(img.find("#ffffff"), std::string::npos);  // nearest pixel
  EXPECT_NE(img.find("#000000"), std::string::npos);  // farthest pixel
  EXPECT_THROW(eval::svg_depth_image({1, 2, 3}, 2, 2, "d"), eval::EvalError);
  EXPECT_EQ(eval::moving_average({2, 4, 6, 8}, 2), (std::vector<double>{2, 3, 5, 7}));
}

TEST(Ablation, TrainsVariantsUnderIdenticalSeeds) {
  eval::AblationSpec spec;
  spec.base = train::micro_model_config();
  spec.train.steps = 3;
  spec.train.warmup_steps = 1;
  spec.variants = {"quat-pose-encoder", "no-scale-head", "quat-pose-encoder"};
  std::vector<synth::SceneSample> train_scenes{tiny_scene(80), tiny_scene(81)};
  const auto eval_scenes = tiny_named(2, 90);
  const auto result = eval::run_ablation(spec, train_scenes, eval_scenes);
  ASSERT_EQ(result.variants.size(), 3u);
  EXPECT_EQ(result.variants[0].variant, "full");
  for (const auto& v : result.variants) {
    EXPECT_EQ(v.loss.size(), 3u);
    ASSERT_TRUE(v.metric_none.has_value());
  }
  EXPECT_EQ(result.variants[2].model.scale_head, false);
  for (const auto& s : result.variants[2].metric_none->scenes) EXPECT_EQ(s.scale_pred, 1.0);

  // Identical seeds: a rerun of the full model reproduces its curve.
  spec.variants = {};
  const auto again = eval::run_ablation(spec, train_scenes, eval_scenes);
  EXPECT_EQ(again.variants[0].loss, result.variants[0].loss);

  const std::string chart = result.loss_chart(2);
  EXPECT_EQ(occurrences(chart, "<polyline"), 3u);
  const std::string table = result.table();
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_TRUE(result.to_json().is_array());

  spec.variants = {"no-such-variant"};
  EXPECT_THROW(eval::run_ablation(spec, train_scenes, eval_scenes), model::ConfigError);
}

}  // namespace
