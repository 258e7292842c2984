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

#include "scalerecon/prior/prior.hpp"
#include "test_support.hpp"

using namespace scalerecon;
using namespace scalerecon::prior;
using ad::Tensor;

namespace {

model::ModelConfig small_config() {
  model::ModelConfig c;
  c.image_size = 16;
  c.patch_size = 4;
  c.embed_dim = 8;
  c.attention_heads = 2;
  return c;
}

ad::ParameterStore make_params(const model::ModelConfig& c, std::uint64_t seed = 3) {
  ad::ParameterStore ps;
  Rng rng(seed);
  add_prior_parameters(ps, c, rng);
  return ps;
}

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

geom::Pose random_pose(Rng& rng) {
  return {testing_support::random_rotation(rng), geom::Vec3(normal(rng), normal(rng), normal(rng))};
}

}  // namespace

TEST(PriorSampler, ProbabilitiesAndMasking) {
  Rng rng(99);
  const int n = 100000;
  int inject = 0, pose = 0, intr = 0, supervise = 0;
  for (int i = 0; i < n; ++i) {
    auto c = sample_prior_config(rng, true);
    inject += c.inject_any;
    pose += c.use_pose;
    intr += c.use_intrinsics;
    supervise += c.supervise_scale;
    if (!c.inject_any) {
      EXPECT_FALSE(c.use_pose);
      EXPECT_FALSE(c.use_intrinsics);
    }
  }
  EXPECT_NEAR(inject / double(n), 0.5, 0.006);
  EXPECT_NEAR(pose / double(inject), 0.9, 0.006);
  EXPECT_NEAR(intr / double(inject), 0.9, 0.006);
  EXPECT_NEAR(supervise / double(n), 0.95, 0.003);

  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(sample_prior_config(rng, false).supervise_scale);
}

TEST(PriorSampler, DefaultsAndReproducibility) {
  PriorProbabilities p;
  EXPECT_EQ(p.inject, 0.5);
  EXPECT_EQ(p.per_type, 0.9);
  EXPECT_EQ(p.supervise, 0.95);
  Rng a(5), b(5);
  for (int i = 0; i < 200; ++i) {
    auto x = sample_prior_config(a, i % 3 != 0);
    auto y = sample_prior_config(b, i % 3 != 0);
    EXPECT_EQ(x.inject_any, y.inject_any);
    EXPECT_EQ(x.use_pose, y.use_pose);
    EXPECT_EQ(x.use_intrinsics, y.use_intrinsics);
    EXPECT_EQ(x.supervise_scale, y.supervise_scale);
  }
  EXPECT_EQ(a(), b());
}

TEST(PoseEncoder, ZeroedMlpGivesBias) {
  auto c = small_config();
  auto ps = make_params(c);
  for (const char* name : {"pose_encoder.w1", "pose_encoder.b1", "pose_encoder.w2"}) {
    for (auto& v : ps.get(name).mutable_data()) v = 0.0;
  }
  auto bias = ps.get("pose_encoder.b2").mutable_data();
  for (std::size_t i = 0; i < bias.size(); ++i) bias[i] = 0.25 * double(i);
  std::vector<geom::Pose> poses = {geom::Pose::identity()};
  Tensor e = encode_pose(ps, c, poses, 1.0);
  ASSERT_EQ(e.shape(), (ad::Shape{1, 1, 8}));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(e.at(i), 0.25 * double(i));
}

TEST(PoseEncoder, FeaturesFollowTheDocumentedLayout) {
  Rng rng(1);
  geom::Pose pose = random_pose(rng);
  Tensor g = pose_features({&pose, 1}, 2.0, model::PoseEncoding::kRot6D);
  ASSERT_EQ(g.shape(), (ad::Shape{1, 9}));
  for (int col = 0; col < 2; ++col) {
    for (int row = 0; row < 3; ++row) EXPECT_EQ(g.at(3 * col + row), pose.rotation(row, col));
  }
  for (int k = 0; k < 3; ++k) EXPECT_EQ(g.at(6 + k), pose.translation[k] / 2.0);
  Tensor q = pose_features({&pose, 1}, 2.0, model::PoseEncoding::kQuaternion);
  ASSERT_EQ(q.shape(), (ad::Shape{1, 7}));
  EXPECT_GE(q.at(0), 0.0);
  EXPECT_THROW(pose_features({&pose, 1}, 0.0, model::PoseEncoding::kRot6D), PriorError);
}

TEST(PoseEncoder, TranslationScaleCancelsWithMatchingNorm) {
  auto c = small_config();
  auto ps = make_params(c);
  Rng rng(2);
  std::vector<geom::Pose> a = {random_pose(rng), random_pose(rng)};
  std::vector<geom::Pose> b = a;
  for (auto& p : b) p.translation *= 4.0;
  EXPECT_EQ(values(encode_pose(ps, c, a, 1.5)), values(encode_pose(ps, c, b, 6.0)));
}

TEST(PoseEncoder, InvariantToQuaternionSign) {
  Rng rng(3);
  for (auto enc : {model::PoseEncoding::kRot6D, model::PoseEncoding::kQuaternion}) {
    auto c = small_config();
    c.pose_encoding = enc;
    auto ps = make_params(c);
    for (int i = 0; i < 20; ++i) {
      geom::Vec4 q(normal(rng), normal(rng), normal(rng), normal(rng));
      std::vector<geom::Pose> a = {{geom::quat_to_matrix(q), geom::Vec3(1, 2, 3)}};
      std::vector<geom::Pose> b = {{geom::quat_to_matrix(-q), geom::Vec3(1, 2, 3)}};
      auto ea = values(encode_pose(ps, c, a, 1.0));
      auto eb = values(encode_pose(ps, c, b, 1.0));
      for (std::size_t k = 0; k < ea.size(); ++k) EXPECT_NEAR(ea[k], eb[k], 1e-12);
    }
  }
}

TEST(IntrinsicsEncoder, ShapesDeterminismAndSensitivity) {
  auto c = small_config();
  auto ps = make_params(c);
  geom::Intrinsics K{14.0, 14.0, 8.0, 8.0, 16, 16};
  std::vector<geom::Intrinsics> ks = {K, K};
  Tensor e = encode_intrinsics(ps, c, ks);
  ASSERT_EQ(e.shape(), (ad::Shape{2, 16, 8}));
  EXPECT_EQ(values(encode_intrinsics(ps, c, ks)), values(e));
  for (std::size_t i = 0; i < 16 * 8; ++i) EXPECT_EQ(e.at(i), e.at(16 * 8 + i));

  std::vector<geom::Intrinsics> narrow = {{28.0, 28.0, 8.0, 8.0, 16, 16}};
  std::vector<geom::Intrinsics> one = {K};
  auto a = values(encode_intrinsics(ps, c, one));
  auto b = values(encode_intrinsics(ps, c, narrow));
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += std::abs(a[i] - b[i]);
  EXPECT_GT(diff, 1e-6);

  std::vector<geom::Intrinsics> wrong = {{14.0, 14.0, 16.0, 16.0, 32, 32}};
  EXPECT_THROW(encode_intrinsics(ps, c, wrong), PriorError);
}

TEST(IntrinsicsEncoder, CenteredRaymapIsPointSymmetric) {
  auto c = small_config();
  geom::Intrinsics K{11.0, 13.0, 8.0, 8.0, 16, 16};
  auto rays = geom::make_raymap(K);
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 16; ++u) {
      const std::size_t i = 3 * (v * 16 + u);
      const std::size_t j = 3 * ((15 - v) * 16 + (15 - u));
      EXPECT_EQ(rays[i], -rays[j]);
      EXPECT_EQ(rays[i + 1], -rays[j + 1]);
      EXPECT_EQ(rays[i + 2], rays[j + 2]);
    }
  }
  // Patch layout: value (channel, row, column) of patch (gy, gx).
  std::vector<geom::Intrinsics> ks = {K};
  Tensor patches = patchified_raymaps(ks, c);
  const std::size_t gy = 2, gx = 1, ch = 1, dy = 3, dx = 2;
  const std::size_t pix = (gy * 4 + dy) * 16 + gx * 4 + dx;
  EXPECT_EQ(patches.at((gy * 4 + gx) * 48 + (ch * 4 + dy) * 4 + dx), rays[3 * pix + ch]);
}

TEST(Route, EmptyBundleLeavesTokensBitExact) {
  Rng rng(4);
  TokenStreams t{testing_support::random_tensor({2, 1, 8}, rng), testing_support::random_tensor({2, 1, 8}, rng),
                 testing_support::random_tensor({2, 4, 8}, rng), testing_support::random_tensor({2, 16, 8}, rng)};
  TokenStreams before = t;
  route(t, PriorEmbeddings{}, Destination::kMainTokens);
  route(t, PriorEmbeddings{}, Destination::kScaleHead);
  EXPECT_EQ(t.camera.id(), before.camera.id());
  EXPECT_EQ(t.patches.id(), before.patches.id());

  PriorEmbeddings zeros{Tensor::zeros({2, 1, 8}), Tensor::zeros({2, 16, 8})};
  route(t, zeros, Destination::kMainTokens);
  EXPECT_EQ(values(t.camera), values(before.camera));
  EXPECT_EQ(values(t.patches), values(before.patches));
}

TEST(Route, DestinationsAndUntouchedStreams) {
  Rng rng(5);
  TokenStreams t{testing_support::random_tensor({2, 1, 8}, rng), testing_support::random_tensor({2, 1, 8}, rng),
                 testing_support::random_tensor({2, 4, 8}, rng), testing_support::random_tensor({2, 16, 8}, rng)};
  const TokenStreams before = t;
  PriorEmbeddings pose_only{testing_support::random_tensor({2, 1, 8}, rng), Tensor()};
  route(t, pose_only, Destination::kMainTokens);
  EXPECT_EQ(t.patches.id(), before.patches.id());
  EXPECT_EQ(t.class_token.id(), before.class_token.id());
  EXPECT_EQ(t.registers.id(), before.registers.id());
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(t.camera.at(i), before.camera.at(i) + pose_only.pose.at(i));

  // Same embedding reaches both destinations.
  TokenStreams s = before;
  route(s, pose_only, Destination::kScaleHead);
  EXPECT_EQ(values(s.camera), values(t.camera));

  // Adding and removing an embedding restores the tokens to rounding error.
  TokenStreams r = before;
  PriorEmbeddings both{pose_only.pose, testing_support::random_tensor({2, 16, 8}, rng)};
  route(r, both, Destination::kMainTokens);
  PriorEmbeddings negated{ad::scale(both.pose, -1.0), ad::scale(both.ray, -1.0)};
  route(r, negated, Destination::kMainTokens);
  for (std::size_t i = 0; i < r.patches.numel(); ++i) EXPECT_NEAR(r.patches.at(i), before.patches.at(i), 1e-15);

  TokenStreams k = before;
  route(k, pose_only, Destination::kScaleHead, /*pose_into_class=*/true);
  EXPECT_EQ(k.camera.id(), before.camera.id());
  EXPECT_NE(values(k.class_token), values(before.class_token));

  EXPECT_THROW(route(k, pose_only, static_cast<Destination>(7)), PriorError);
  PriorEmbeddings wrong{Tensor::zeros({2, 1, 4}), Tensor()};
  EXPECT_THROW(route(k, wrong, Destination::kMainTokens), PriorError);
}

TEST(PriorBundle, ValidationAndPoseScale) {
  PriorBundle b;
  EXPECT_TRUE(b.empty());
  EXPECT_EQ(b.resolved_pose_scale(), 1.0);
  b.poses = {geom::Pose::identity(), {geom::Mat3::Identity(), geom::Vec3(3, 4, 0)}};
  EXPECT_NO_THROW(b.validate(2));
  EXPECT_THROW(b.validate(3), PriorError);
  EXPECT_EQ(b.resolved_pose_scale(), 2.5);
  b.pose_scale = 7.0;
  EXPECT_EQ(b.resolved_pose_scale(), 7.0);
  b.poses = {geom::Pose::identity()};
  b.pose_scale = 0.0;
  EXPECT_EQ(b.resolved_pose_scale(), 1.0);
}
