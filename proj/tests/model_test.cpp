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
#include <numeric>

#include "scalerecon/model/model.hpp"
#include "test_support.hpp"

using namespace scalerecon;
using namespace scalerecon::model;
using ad::Tensor;
using testing_support::random_tensor;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.image_size = 16;
  c.patch_size = 4;
  c.embed_dim = 16;
  c.attention_heads = 2;
  c.aggregator_blocks = 2;
  c.dense_channels1 = 8;
  c.dense_channels2 = 4;
  c.seed = 7;
  return c;
}

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

void perturb(UniScaleModel& m, std::uint64_t seed, double amount = 0.1) {
  Rng rng(seed);
  for (auto& e : m.params().entries()) {
    for (auto& v : e.tensor.mutable_data()) v += amount * normal(rng);
  }
}

void zero(UniScaleModel& m, const std::string& name) {
  for (auto& v : m.params().get(name).mutable_data()) v = 0.0;
}

// Row r of an [N, R, C] tensor for frame f.
std::vector<double> row(const Tensor& t, std::size_t f, std::size_t r) {
  const std::size_t R = t.dim(1), C = t.dim(2);
  auto d = t.data();
  return {d.begin() + (f * R + r) * C, d.begin() + (f * R + r + 1) * C};
}

}  // namespace

TEST(ModelConfig, JsonRoundTripAndValidation) {
  ModelConfig c = tiny();
  c.pose_encoding = PoseEncoding::kQuaternion;
  c.scale_use_class = false;
  nlohmann::json j = c;
  EXPECT_EQ(j.get<ModelConfig>(), c);
  nlohmann::json bad = {{"embed_dimm", 3}};
  EXPECT_THROW(bad.get<ModelConfig>(), ConfigError);
  ModelConfig odd = tiny();
  odd.embed_dim = 15;
  EXPECT_THROW(odd.validate(), ConfigError);
  odd = tiny();
  odd.image_size = 18;
  EXPECT_THROW(odd.validate(), ConfigError);
  ModelConfig d;
  EXPECT_EQ(d.register_count, 4);
  EXPECT_EQ(d.patch_count(), 64);
}

TEST(ModelConfig, Variants) {
  EXPECT_EQ(variant_names().size(), 8u);
  for (auto v : variant_names()) EXPECT_NO_THROW(with_variant(tiny(), v).validate());
  EXPECT_FALSE(with_variant(tiny(), "no-scale-head").scale_head);
  EXPECT_EQ(with_variant(tiny(), "quat-pose-encoder").pose_input_width(), 7);
  EXPECT_THROW(with_variant(tiny(), "no-such-variant"), ConfigError);
}

TEST(PatchEmbed, DeterministicAndZeroImage) {
  UniScaleModel m(tiny());
  Rng rng(1);
  Tensor img = random_tensor({1, 3, 16, 16}, rng, 0.0, 1.0);
  auto a = m.patchify_embed(img);
  auto b = m.patchify_embed(img);
  EXPECT_EQ(values(a.patches), values(b.patches));
  EXPECT_EQ(values(a.class_token), values(b.class_token));
  EXPECT_EQ(a.patches.shape(), (ad::Shape{1, 16, 16}));

  auto z = m.patchify_embed(Tensor::zeros({2, 3, 16, 16}));
  for (double v : z.patches.data()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(m.patchify_embed(Tensor::zeros({1, 3, 16, 12})), ModelError);
}

TEST(PatchEmbed, PermutingPatchesPermutesTokens) {
  UniScaleModel m(tiny());
  Rng rng(2);
  Tensor img = random_tensor({1, 3, 16, 16}, rng, 0.0, 1.0);
  std::vector<std::size_t> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  // Output patch k takes the pixels of input patch perm[k].
  std::vector<double> moved(img.numel());
  for (std::size_t k = 0; k < 16; ++k) {
    const std::size_t src = perm[k];
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t dy = 0; dy < 4; ++dy) {
        for (std::size_t dx = 0; dx < 4; ++dx) {
          const std::size_t to = (c * 16 + (k / 4) * 4 + dy) * 16 + (k % 4) * 4 + dx;
          const std::size_t from = (c * 16 + (src / 4) * 4 + dy) * 16 + (src % 4) * 4 + dx;
          moved[to] = img.at(from);
        }
      }
    }
  }
  auto a = m.patchify_embed(img);
  auto b = m.patchify_embed(Tensor::from({1, 3, 16, 16}, moved));
  for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(row(b.patches, 0, k), row(a.patches, 0, perm[k]));
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(a.class_token.at(i), b.class_token.at(i), 1e-14);
}

TEST(AssembleTokens, LearnedTokensAndZeroPriors) {
  UniScaleModel m(tiny());
  Rng rng(3);
  auto emb = m.patchify_embed(random_tensor({3, 3, 16, 16}, rng, 0.0, 1.0));
  auto t = m.assemble_tokens(emb);
  auto first = values(m.params().get("camera.first"));
  auto rest = values(m.params().get("camera.rest"));
  EXPECT_EQ(row(t.camera, 0, 0), first);
  EXPECT_EQ(row(t.camera, 1, 0), rest);
  EXPECT_EQ(row(t.camera, 2, 0), rest);
  EXPECT_EQ(row(t.registers, 0, 2), row(ad::reshape(m.params().get("register.first"), {1, 4, 16}), 0, 2));
  EXPECT_EQ(t.registers.shape(), (ad::Shape{3, 4, 16}));
  EXPECT_EQ(values(t.patches), values(emb.patches));

  prior::PriorEmbeddings zeros{Tensor::zeros({3, 1, 16}), Tensor::zeros({3, 16, 16})};
  auto z = m.assemble_tokens(emb, &zeros);
  EXPECT_EQ(values(z.camera), values(t.camera));
  EXPECT_EQ(values(z.patches), values(t.patches));
}

TEST(Aggregate, ShapesAndSingleFrame) {
  UniScaleModel m(tiny());
  Rng rng(4);
  for (std::size_t n : {1u, 3u}) {
    auto t = m.assemble_tokens(m.patchify_embed(random_tensor({n, 3, 16, 16}, rng, 0.0, 1.0)));
    auto agg = m.aggregate(t);
    EXPECT_EQ(agg.camera.shape(), (ad::Shape{n, 1, 16}));
    EXPECT_EQ(agg.patches.shape(), (ad::Shape{n, 16, 16}));
    for (double v : agg.patches.data()) EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_THROW(m.aggregate(prior::TokenStreams{}), ModelError);
}

TEST(Aggregate, ZeroAttentionOutputLeavesMlpPath) {
  UniScaleModel m(tiny());
  perturb(m, 11);
  for (int b = 0; b < 2; ++b) {
    zero(m, "block" + std::to_string(b) + ".attn.proj.w");
    zero(m, "block" + std::to_string(b) + ".attn.proj.b");
  }
  Rng rng(5);
  auto t = m.assemble_tokens(m.patchify_embed(random_tensor({2, 3, 16, 16}, rng, 0.0, 1.0)));
  auto agg = m.aggregate(t);

  // Reference: token-wise residual MLPs only.
  Tensor x = ad::concat({t.class_token, t.camera, t.registers, t.patches + m.params().get("pos_embed")}, 1);
  for (int b = 0; b < 2; ++b) {
    const std::string n = "block" + std::to_string(b);
    auto& ps = m.params();
    Tensor h = ad::relu(ad::matmul(ad::layer_norm(x), ps.get(n + ".mlp1.w")) + ps.get(n + ".mlp1.b"));
    x = x + (ad::matmul(h, ps.get(n + ".mlp2.w")) + ps.get(n + ".mlp2.b"));
  }
  Tensor want = ad::slice(x, 1, 6, 16);
  for (std::size_t i = 0; i < want.numel(); ++i) EXPECT_NEAR(agg.patches.at(i), want.at(i), 1e-14);
}

TEST(CameraHead, AnchoredUnitAndBounded) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    UniScaleModel m(tiny());
    perturb(m, 100 + s, 1.0);
    Rng rng(s);
    auto cam = m.camera_head(random_tensor({4, 1, 16}, rng, -5.0, 5.0));
    EXPECT_EQ(cam.quat.at(0), 1.0);
    for (int k = 1; k < 4; ++k) EXPECT_EQ(cam.quat.at(k), 0.0);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(cam.translation.at(k), 0.0);
    for (std::size_t f = 0; f < 4; ++f) {
      double n = 0.0;
      for (int k = 0; k < 4; ++k) n += cam.quat.at(4 * f + k) * cam.quat.at(4 * f + k);
      EXPECT_NEAR(std::sqrt(n), 1.0, 1e-9);
    }
    for (double v : cam.fov.data()) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, M_PI);
    }
    EXPECT_EQ(cam.packed().shape(), (ad::Shape{4, 9}));
  }
}

TEST(DenseHead, ZeroFinalLayerGivesUnitDepth) {
  UniScaleModel m(tiny());
  zero(m, "dense_head.out.w");
  zero(m, "dense_head.out.b");
  Rng rng(6);
  auto d = m.dense_head(random_tensor({2, 16, 16}, rng));
  EXPECT_EQ(d.depth.shape(), (ad::Shape{2, 16, 16}));
  EXPECT_EQ(d.points.shape(), (ad::Shape{2, 16, 16, 3}));
  for (const Tensor* t : {&d.depth, &d.depth_conf, &d.point_conf}) {
    for (double v : t->data()) EXPECT_EQ(v, 1.0);
  }
}

TEST(DenseHead, GridShiftTranslatesOutput) {
  UniScaleModel m(tiny());
  perturb(m, 12);
  Rng rng(7);
  Tensor tokens = random_tensor({1, 16, 16}, rng);
  // Shift the 4x4 token grid right by one cell; column 0 gets fresh tokens.
  std::vector<double> shifted(tokens.numel());
  for (std::size_t gy = 0; gy < 4; ++gy) {
    for (std::size_t gx = 0; gx < 4; ++gx) {
      for (std::size_t c = 0; c < 16; ++c) {
        shifted[(gy * 4 + gx) * 16 + c] = gx == 0 ? uniform(rng, -1, 1) : tokens.at((gy * 4 + gx - 1) * 16 + c);
      }
    }
  }
  auto a = m.dense_head(tokens);
  auto b = m.dense_head(Tensor::from({1, 16, 16}, shifted));
  for (std::size_t v = 0; v < 16; ++v) {
    for (std::size_t u = 4; u < 16; ++u) {
      EXPECT_EQ(b.depth.at(v * 16 + u), a.depth.at(v * 16 + u - 4));
      EXPECT_EQ(b.points.at(3 * (v * 16 + u) + 2), a.points.at(3 * (v * 16 + u - 4) + 2));
    }
  }
}

TEST(AttentionPool, UniformSaturatedAndNormalized) {
  UniScaleModel m(tiny());
  Rng rng(8);
  Tensor patches = random_tensor({2, 16, 16}, rng);
  zero(m, "scale_head.pool.w");
  Tensor pooled = m.attention_pool(patches);
  Tensor mean = ad::mean(patches, 1, true);
  for (std::size_t i = 0; i < pooled.numel(); ++i) EXPECT_NEAR(pooled.at(i), mean.at(i), 1e-15);

  m.params().get("scale_head.pool.w").mutable_data()[0] = 1.0;
  std::vector<double> boosted(patches.data().begin(), patches.data().end());
  boosted[5 * 16] += 30.0;  // frame 0, patch 5, feature 0
  Tensor bp = Tensor::from({2, 16, 16}, boosted);
  Tensor w = m.pool_weights(bp);
  for (std::size_t f = 0; f < 2; ++f) {
    double s = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      EXPECT_GE(w.at(f * 16 + k), 0.0);
      s += w.at(f * 16 + k);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  Tensor top = m.attention_pool(bp);
  for (std::size_t c = 0; c < 16; ++c) EXPECT_NEAR(top.at(c), boosted[5 * 16 + c], 1e-9);
}

TEST(ScaleHead, ZeroInitGivesExactlyOne) {
  UniScaleModel m(tiny());
  Rng rng(9);
  auto out = m.forward(random_tensor({3, 3, 16, 16}, rng, 0.0, 1.0));
  EXPECT_EQ(out.scale.item(), 1.0);
}

TEST(ScaleHead, FrameDuplicationAndPositivity) {
  UniScaleModel m(tiny());
  perturb(m, 13, 0.5);
  Rng rng(10);
  AggregatedTokens agg{random_tensor({2, 1, 16}, rng), random_tensor({2, 16, 16}, rng)};
  Tensor cls = random_tensor({2, 1, 16}, rng);
  const double s = m.scale_head(agg, cls).item();
  EXPECT_GT(s, 0.0);
  EXPECT_NE(s, 1.0);
  AggregatedTokens twice{ad::concat({agg.camera, agg.camera}, 0), ad::concat({agg.patches, agg.patches}, 0)};
  EXPECT_NEAR(m.scale_head(twice, ad::concat({cls, cls}, 0)).item(), s, 1e-15 * s);

  AggregatedTokens wrong{agg.camera, random_tensor({3, 16, 16}, rng)};
  EXPECT_THROW(m.scale_head(wrong, cls), ModelError);
}

TEST(ScaleHead, InvariantToPatchPermutationWithMatchingRays) {
  UniScaleModel m(tiny());
  perturb(m, 14, 0.5);
  Rng rng(11);
  AggregatedTokens agg{random_tensor({1, 1, 16}, rng), random_tensor({1, 16, 16}, rng)};
  Tensor cls = random_tensor({1, 1, 16}, rng);
  prior::PriorEmbeddings e{random_tensor({1, 1, 16}, rng), random_tensor({1, 16, 16}, rng)};
  std::vector<std::size_t> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto permute_rows = [&](const Tensor& t) {
    std::vector<double> v(t.numel());
    for (std::size_t k = 0; k < 16; ++k) {
      auto r = row(t, 0, perm[k]);
      std::copy(r.begin(), r.end(), v.begin() + k * 16);
    }
    return Tensor::from(t.shape(), v);
  };
  AggregatedTokens pa{agg.camera, permute_rows(agg.patches)};
  prior::PriorEmbeddings pe{e.pose, permute_rows(e.ray)};
  const double a = m.scale_head(agg, cls, &e).item();
  const double b = m.scale_head(pa, cls, &pe).item();
  EXPECT_NEAR(a, b, 1e-13 * a);
}

TEST(Metricize, ScalesDepthPointsTranslation) {
  UniScaleModel m(tiny());
  perturb(m, 15);
  Rng rng(12);
  auto out = m.forward(random_tensor({2, 3, 16, 16}, rng, 0.0, 1.0));
  auto same = metricize(out.dense, out.camera, Tensor::scalar(1.0));
  EXPECT_EQ(values(same.depth), values(out.dense.depth));
  auto dbl = metricize(out.dense, out.camera, Tensor::scalar(2.0));
  for (std::size_t i = 0; i < dbl.depth.numel(); ++i) EXPECT_EQ(dbl.depth.at(i), 2.0 * out.dense.depth.at(i));
  for (std::size_t i = 0; i < dbl.translation.numel(); ++i) {
    EXPECT_EQ(dbl.translation.at(i) / 2.0, out.camera.translation.at(i));
  }
  for (std::size_t i = 0; i < dbl.points.numel(); ++i) EXPECT_EQ(dbl.points.at(i) / 2.0, out.dense.points.at(i));
  EXPECT_THROW(metricize(out.dense, out.camera, Tensor::scalar(0.0)), ModelError);
  EXPECT_THROW(metricize(out.dense, out.camera, Tensor::scalar(-1.0)), ModelError);
}

TEST(Forward, DeterministicAndSingleFrame) {
  UniScaleModel m(tiny());
  perturb(m, 16);
  Rng rng(13);
  Tensor img = random_tensor({1, 3, 16, 16}, rng, 0.0, 1.0);
  auto a = m.forward(img);
  auto b = m.forward(img);
  EXPECT_EQ(values(a.dense.depth), values(b.dense.depth));
  EXPECT_EQ(a.scale.item(), b.scale.item());
  EXPECT_EQ(a.camera.quat.at(0), 1.0);
  EXPECT_GT(a.scale.item(), 0.0);
}

TEST(Forward, LaterFramesAreExchangeable) {
  UniScaleModel m(tiny());
  perturb(m, 17, 0.3);
  Rng rng(14);
  Tensor img = random_tensor({4, 3, 16, 16}, rng, 0.0, 1.0);
  const std::vector<std::size_t> order = {0, 3, 1, 2};
  const std::size_t frame = 3 * 16 * 16;
  std::vector<double> swapped(img.numel());
  for (std::size_t f = 0; f < 4; ++f) {
    std::copy_n(img.data().begin() + order[f] * frame, frame, swapped.begin() + f * frame);
  }
  prior::PriorBundle priors;
  for (int f = 0; f < 4; ++f) priors.intrinsics.push_back({14.0 + f, 14.0, 8.0, 8.0, 16, 16});
  prior::PriorBundle swapped_priors = priors;
  for (std::size_t f = 0; f < 4; ++f) swapped_priors.intrinsics[f] = priors.intrinsics[order[f]];

  auto a = m.forward(img, priors);
  auto b = m.forward(Tensor::from({4, 3, 16, 16}, swapped), swapped_priors);
  EXPECT_NEAR(a.scale.item(), b.scale.item(), 1e-12);
  const std::size_t px = 16 * 16;
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t i = 0; i < px; ++i) {
      EXPECT_NEAR(b.dense.depth.at(f * px + i), a.dense.depth.at(order[f] * px + i), 1e-10);
    }
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(b.camera.quat.at(4 * f + k), a.camera.quat.at(4 * order[f] + k), 1e-10);
  }
}

TEST(Forward, PriorsChangeOutputsUnlessDisabled) {
  Rng rng(15);
  Tensor img = random_tensor({2, 3, 16, 16}, rng, 0.0, 1.0);
  prior::PriorBundle priors;
  priors.poses = {geom::Pose::identity(), {testing_support::random_rotation(rng), geom::Vec3(1, 0, 0)}};
  priors.intrinsics = {{14.0, 14.0, 8.0, 8.0, 16, 16}, {14.0, 14.0, 8.0, 8.0, 16, 16}};

  UniScaleModel m(tiny());
  perturb(m, 18);
  EXPECT_NE(values(m.forward(img, priors).dense.depth), values(m.forward(img).dense.depth));

  UniScaleModel off(with_variant(tiny(), "no-prior-injection"));
  EXPECT_EQ(values(off.forward(img, priors).dense.depth), values(off.forward(img).dense.depth));

  UniScaleModel none(with_variant(tiny(), "no-scale-head"));
  EXPECT_EQ(none.forward(img, priors).scale.item(), 1.0);

  priors.intrinsics.pop_back();
  EXPECT_THROW(m.forward(img, priors), prior::PriorError);
}

TEST(Forward, EveryVariantRuns) {
  Rng rng(16);
  Tensor img = random_tensor({2, 3, 16, 16}, rng, 0.0, 1.0);
  prior::PriorBundle priors;
  priors.poses = {geom::Pose::identity(), {geom::Mat3::Identity(), geom::Vec3(0.5, 0, 0)}};
  priors.intrinsics = {{14.0, 14.0, 8.0, 8.0, 16, 16}, {14.0, 14.0, 8.0, 8.0, 16, 16}};
  for (auto v : variant_names()) {
    UniScaleModel m(with_variant(tiny(), v));
    perturb(m, 19);
    auto out = m.forward(img, priors);
    EXPECT_GT(out.scale.item(), 0.0) << v;
    for (double d : out.dense.depth.data()) ASSERT_GT(d, 0.0) << v;
  }
}
