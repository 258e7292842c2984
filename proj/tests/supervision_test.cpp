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

#include <algorithm>
#include <cmath>

#include "scalerecon/autodiff/gradcheck.hpp"
#include "scalerecon/supervision/losses.hpp"
#include "scalerecon/supervision/scale_target.hpp"
#include "scalerecon/synth/scene.hpp"
#include "test_support.hpp"

using namespace scalerecon;
using namespace scalerecon::sup;
using geom::Pose;
using geom::Vec3;

namespace {

synth::SceneSample scene(std::uint64_t seed, int size = 32, int frames = 4) {
  synth::SceneSpec s;
  s.seed = seed;
  s.image_size = size;
  s.frames = frames;
  return synth::generate_scene(s);
}

ScaleTarget target_of(const synth::SceneSample& s) {
  return compute_scale_target(s.depths_f64(), s.intrinsics_per_frame(), s.poses);
}

double mean_norm(const ScaleTarget& t) {
  double total = 0.0, count = 0.0;
  for (std::size_t i = 0; i < t.valid.size(); ++i) {
    if (!t.valid[i]) continue;
    const double* x = &t.points[3 * i];
    total += std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    count += 1.0;
  }
  return total / count;
}

}  // namespace

TEST(MedianDepth, OddEvenAndInvalid) {
  const std::vector<double> odd = {3.0, 0.0, 1.0, 2.0};
  EXPECT_EQ(median_valid_depth(odd), 2.0);
  const std::vector<double> even = {4.0, 1.0, 0.0, 3.0, 2.0};
  EXPECT_EQ(median_valid_depth(even), 2.5);
  const std::vector<double> none = {0.0, 0.0};
  EXPECT_THROW(median_valid_depth(none), SupervisionError);
}

TEST(ScaleTarget, SinglePixelByHand) {
  const geom::Intrinsics K{1.0, 1.0, 0.5, 0.5, 1, 1};
  const std::vector<double> depth = {2.0};
  const std::vector<geom::Intrinsics> Ks = {K};
  const std::vector<Pose> poses = {Pose::identity()};
  const ScaleTarget t = compute_scale_target(depth, Ks, poses);
  EXPECT_EQ(t.scale, 2.0);
  EXPECT_EQ(t.depth[0], 1.0);
  EXPECT_EQ(t.points[2], 1.0);
}

TEST(ScaleTarget, TwoFramesByHand) {
  // Frame 1 sits 3 m along x from frame 0 and sees a point at depth 4.
  const geom::Intrinsics K{1.0, 1.0, 0.5, 0.5, 1, 1};
  const std::vector<double> depth = {4.0, 4.0};
  const std::vector<geom::Intrinsics> Ks = {K, K};
  Pose p1;
  p1.translation = Vec3(3, 0, 0);
  const std::vector<Pose> poses = {Pose::identity(), p1};
  const ScaleTarget t = compute_scale_target(depth, Ks, poses);
  EXPECT_DOUBLE_EQ(t.scale, (4.0 + 5.0) / 2.0);
  EXPECT_DOUBLE_EQ(t.poses[1].translation.x(), 3.0 / 4.5);
}

TEST(ScaleTarget, NormalizedPointsHaveUnitMeanNorm) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ScaleTarget t = target_of(scene(seed));
    EXPECT_NEAR(mean_norm(t), 1.0, 1e-6) << seed;
  }
}

TEST(ScaleTarget, HomogeneousUnderSceneScaling) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const synth::SceneSample s = scene(seed);
    const ScaleTarget base = target_of(s);
    for (double c : {0.1, 3.0, 100.0}) {
      std::vector<double> depth = s.depths_f64();
      for (double& d : depth) d *= c;
      std::vector<Pose> poses = s.poses;
      for (Pose& p : poses) p.translation *= c;
      const ScaleTarget t = compute_scale_target(depth, s.intrinsics_per_frame(), poses);
      EXPECT_NEAR(t.scale / (c * base.scale), 1.0, 1e-9) << c;
      for (std::size_t i = 0; i < t.depth.size(); ++i) {
        ASSERT_NEAR(t.depth[i], base.depth[i], 1e-9 * std::max(1.0, base.depth[i]));
      }
    }
  }
}

TEST(ScaleTarget, OutliersAreClampedBruteForce) {
  Rng rng(5);
  const int W = 6, H = 5;
  const geom::Intrinsics K{4.0, 4.5, 3.0, 2.5, W, H};
  std::vector<double> depth(2 * W * H);
  for (double& d : depth) d = uniform(rng, 1.0, 3.0);
  depth[3] = 0.0;
  depth[7] = 1e6;
  depth[40] = 5e4;
  Pose p1;
  p1.rotation = testing_support::random_rotation(rng);
  p1.translation = Vec3(0.5, -0.2, 0.3);
  const std::vector<geom::Intrinsics> Ks = {K, K};
  const std::vector<Pose> poses = {Pose::identity(), p1};
  const ScaleTarget t = compute_scale_target(depth, Ks, poses);

  std::vector<double> valid;
  for (double d : depth) {
    if (d > 0.0) valid.push_back(d);
  }
  std::sort(valid.begin(), valid.end());
  const std::size_t n = valid.size();
  const double median = n % 2 ? valid[n / 2] : 0.5 * (valid[n / 2 - 1] + valid[n / 2]);
  const double cap = 50.0 * median;
  EXPECT_DOUBLE_EQ(t.depth_cap, cap);
  double total = 0.0;
  for (int f = 0; f < 2; ++f) {
    for (int v = 0; v < H; ++v) {
      for (int u = 0; u < W; ++u) {
        const double d = std::min(depth[(f * H + v) * W + u], cap);
        if (d <= 0.0) continue;
        const Vec3 cam(d * ((u + 0.5) - K.cx) / K.fx, d * ((v + 0.5) - K.cy) / K.fy, d);
        total += poses[f].apply(cam).norm();
      }
    }
  }
  EXPECT_NEAR(t.scale, total / static_cast<double>(n), 1e-12 * t.scale);
  EXPECT_NEAR(t.depth[7], cap / t.scale, 1e-12);
  EXPECT_EQ(t.valid[3], 0);
}

TEST(ScaleTarget, Rejections) {
  const geom::Intrinsics K{1.0, 1.0, 0.5, 0.5, 1, 1};
  const std::vector<geom::Intrinsics> Ks = {K};
  Pose shifted;
  shifted.translation = Vec3(1, 0, 0);
  const std::vector<Pose> bad_anchor = {shifted};
  const std::vector<double> depth = {1.0};
  EXPECT_THROW(compute_scale_target(depth, Ks, bad_anchor), SupervisionError);
  const std::vector<Pose> ok = {Pose::identity()};
  const std::vector<double> empty = {0.0};
  EXPECT_THROW(compute_scale_target(empty, Ks, ok), SupervisionError);
  const std::vector<double> wrong_size = {1.0, 2.0};
  EXPECT_THROW(compute_scale_target(wrong_size, Ks, ok), SupervisionError);
}

// Losses -------------------------------------------------------------------

TEST(CameraLoss, HuberHandValues) {
  const Tensor target = Tensor::from({1, 9}, {1, 0, 0, 0, 0, 0, 0, 1, 1});
  // Residuals: 0.05 (quadratic) in t_x, 0.3 (linear) in fov_x.
  const Tensor pred = Tensor::from({1, 9}, {1, 0, 0, 0, 0.05, 0, 0, 1.3, 1});
  const double expected = (0.5 * 0.05 * 0.05 + 0.1 * (0.3 - 0.05)) / 9.0;
  EXPECT_NEAR(loss_camera(pred, target, 0.1).item(), expected, 1e-15);
}

TEST(CameraLoss, QuaternionSignIsIgnored) {
  const geom::Vec4 q = geom::canonicalize_quat(geom::Vec4(0.3, -0.5, 0.2, 0.7).normalized());
  const Tensor target = Tensor::from({1, 9}, {q[0], q[1], q[2], q[3], 0.1, 0.2, 0.3, 1.0, 0.9});
  const Tensor flipped = Tensor::from({1, 9}, {-q[0], -q[1], -q[2], -q[3], 0.1, 0.2, 0.3, 1.0, 0.9});
  EXPECT_EQ(loss_camera(flipped, target, 0.1).item(), 0.0);
}

TEST(DepthLoss, OptimalConfidenceIsAlphaOverResidual) {
  const double alpha = 0.2, r = 0.5;
  const Tensor gt = Tensor::from({1, 1, 1}, {2.0});
  const Tensor pred = Tensor::from({1, 1, 1}, {2.0 + r});
  const std::vector<std::uint8_t> valid = {1};
  const double c_star = alpha / r;
  Tensor conf = Tensor::from({1, 1, 1}, {c_star}, true);
  Tensor loss = loss_depth(pred, conf, gt, valid, alpha);
  EXPECT_NEAR(loss.item(), c_star * r - alpha * std::log(c_star), 1e-15);
  loss.backward();
  EXPECT_NEAR(conf.grad()[0], 0.0, 1e-15);
  for (double c : {0.5 * c_star, 2.0 * c_star}) {
    const Tensor other = Tensor::from({1, 1, 1}, {c});
    EXPECT_GT(loss_depth(pred, other, gt, valid, alpha).item(), c_star * r - alpha * std::log(c_star));
  }
}

TEST(DepthLoss, PerfectPredictionLeavesConfidenceTerm) {
  Rng rng(1);
  const Tensor gt = testing_support::random_tensor({2, 3, 4}, rng, 1.0, 2.0);
  const Tensor conf = Tensor::full({2, 3, 4}, 1.5);
  const std::vector<std::uint8_t> valid(24, 1);
  EXPECT_NEAR(loss_depth(gt, conf, gt, valid, 0.2).item(), -0.2 * std::log(1.5), 1e-15);
}

TEST(PointLoss, ThreeByThreeBruteForce) {
  Rng rng(8);
  const std::size_t N = 1, H = 3, W = 3;
  const Tensor pred = testing_support::random_tensor({N, H, W, 3}, rng);
  const Tensor gt = testing_support::random_tensor({N, H, W, 3}, rng);
  const Tensor conf = testing_support::random_tensor({N, H, W}, rng, 0.5, 2.0);
  const std::vector<std::uint8_t> valid = {1, 1, 0, 1, 1, 1, 0, 1, 1};
  const double alpha = 0.3;
  auto P = [&](const Tensor& t, std::size_t v, std::size_t u, std::size_t c) { return t.at((v * W + u) * 3 + c); };
  auto ok = [&](std::size_t v, std::size_t u) { return valid[v * W + u] != 0; };

  double data = 0.0, n = 0.0;
  for (std::size_t v = 0; v < H; ++v) {
    for (std::size_t u = 0; u < W; ++u) {
      if (!ok(v, u)) continue;
      double r = 0.0;
      for (std::size_t c = 0; c < 3; ++c) r += std::abs(P(pred, v, u, c) - P(gt, v, u, c));
      const double cf = conf.at(v * W + u);
      data += cf * r - alpha * std::log(cf);
      n += 1.0;
    }
  }
  double gx = 0.0, nx = 0.0, gy = 0.0, ny = 0.0;
  for (std::size_t v = 0; v < H; ++v) {
    for (std::size_t u = 0; u < W; ++u) {
      for (int axis = 0; axis < 2; ++axis) {
        const std::size_t v2 = v + (axis == 1), u2 = u + (axis == 0);
        if (v2 >= H || u2 >= W || !ok(v, u) || !ok(v2, u2)) continue;
        double g = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
          g += std::abs((P(pred, v2, u2, c) - P(pred, v, u, c)) - (P(gt, v2, u2, c) - P(gt, v, u, c)));
        }
        (axis == 0 ? gx : gy) += g;
        (axis == 0 ? nx : ny) += 1.0;
      }
    }
  }
  const double expected = data / n + gx / nx + gy / ny;
  EXPECT_NEAR(loss_pmap(pred, conf, gt, valid, alpha).item(), expected, 1e-13);
}

TEST(PointLoss, GradientsMatchFiniteDifferences) {
  Rng rng(9);
  const Tensor gt = testing_support::random_tensor({2, 3, 4, 3}, rng);
  const Tensor conf = testing_support::random_tensor({2, 3, 4}, rng, 0.5, 2.0);
  std::vector<std::uint8_t> valid(24, 1);
  valid[5] = valid[17] = 0;
  const Tensor pred = testing_support::random_tensor({2, 3, 4, 3}, rng);
  ad::GradCheckOptions options;
  options.tolerance = 1e-6;
  auto report =
      ad::finite_diff_check([&](const Tensor& p) { return loss_pmap(p, conf, gt, valid, 0.2); }, pred, options);
  EXPECT_TRUE(report.passed) << report.summary();
}

TEST(LossShapes, Rejections) {
  const Tensor a = Tensor::zeros({1, 2, 2});
  const Tensor c = Tensor::full({1, 2, 2}, 1.0);
  const std::vector<std::uint8_t> all(4, 1), none(4, 0), short_mask(3, 1);
  EXPECT_THROW(loss_depth(a, c, Tensor::zeros({1, 2, 3}), all, 0.2), SupervisionError);
  EXPECT_THROW(loss_depth(a, c, a, none, 0.2), SupervisionError);
  EXPECT_THROW(loss_depth(a, c, a, short_mask, 0.2), SupervisionError);
  EXPECT_THROW(loss_camera(Tensor::zeros({2, 8}), Tensor::zeros({2, 8}), 0.1), SupervisionError);
  EXPECT_THROW(loss_scale(Tensor::scalar(-1.0), 1.0, true), SupervisionError);
}

TEST(ScaleLoss, LogRatio) {
  EXPECT_NEAR(loss_scale(Tensor::scalar(2.0), 8.0, true).item(), std::log(4.0), 1e-15);
  EXPECT_EQ(loss_scale(Tensor::scalar(2.0), 8.0, false).item(), 0.0);
}

namespace {

model::ModelConfig micro() {
  model::ModelConfig c;
  c.image_size = 16;
  c.patch_size = 4;
  c.embed_dim = 16;
  c.attention_heads = 2;
  c.aggregator_blocks = 2;
  c.register_count = 2;
  c.dense_channels1 = 8;
  c.dense_channels2 = 4;
  c.seed = 3;
  return c;
}

// Gradient reaching every scale-head parameter from one loss evaluation.
double scale_head_grad_magnitude(bool supervise) {
  model::UniScaleModel m(micro());
  // Make the scale head's output depend on its inputs.
  Rng rng(4);
  for (auto& e : m.params().entries()) {
    for (double& v : e.tensor.mutable_data()) v += 0.05 * normal(rng);
  }
  const synth::SceneSample s = scene(1, 16, 2);
  const ScaleTarget target = target_of(s);
  const auto intrinsics = s.intrinsics_per_frame();
  const SceneTargets t = make_targets(target, intrinsics);
  prior::PriorBundle priors;
  priors.poses = s.poses;
  priors.intrinsics = intrinsics;
  m.params().zero_grad();
  const Losses l = compute_losses(m.forward(s.images_tensor(), priors), t, supervise);
  l.total.backward();
  double total = 0.0;
  for (const auto& e : m.params().entries()) {
    if (e.name.rfind("scale_head.", 0) != 0 || !e.tensor.has_grad()) continue;
    for (double g : e.tensor.grad()) total += std::abs(g);
  }
  return total;
}

}  // namespace

TEST(ScaleMasking, UnsupervisedBatchGivesZeroScaleHeadGradient) {
  EXPECT_EQ(scale_head_grad_magnitude(false), 0.0);
  EXPECT_GT(scale_head_grad_magnitude(true), 0.0);
}

TEST(ComputeLosses, ReportMatchesTotal) {
  model::UniScaleModel m(micro());
  const synth::SceneSample s = scene(2, 16, 2);
  const SceneTargets t = make_targets(target_of(s), s.intrinsics_per_frame());
  const Losses l = compute_losses(m.forward(s.images_tensor()), t, true);
  EXPECT_TRUE(l.report.scale_supervised);
  EXPECT_DOUBLE_EQ(l.report.total, l.report.camera + l.report.depth + l.report.pmap + l.report.scale);
  EXPECT_NEAR(l.report.scale, std::abs(std::log(t.scale)), 1e-12);  // S = 1 at init
}
