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

#include "scalerecon/model/model.hpp"

#include <cmath>
#include <string>
#include <span>

#include "scalerecon/common/random.hpp"

namespace scalerecon::model {

using ad::ParamGroup;
namespace ops = ad;

namespace {

constexpr double kPi = 3.14159265358979323846;

using Sz = std::size_t;

void add_linear(ad::ParameterStore& ps, const std::string& name, Sz in, Sz out, double stddev, Rng& rng,
                ParamGroup group = ParamGroup::kBackbone) {
  ps.add_normal(name + ".w", {in, out}, stddev, rng, group);
  ps.add_zeros(name + ".b", {out}, group);
}

void add_attention(ad::ParameterStore& ps, const std::string& name, Sz C, Rng& rng) {
  add_linear(ps, name + ".qkv", C, 3 * C, 1.0 / std::sqrt(double(C)), rng);
  add_linear(ps, name + ".proj", C, C, 0.02, rng);
}

// Fixed 2D sine-cosine table used to initialize the learnable position
// embedding: the first half of the channels encodes the patch row, the
// second half the column.
void init_sincos(std::span<double> table, Sz grid, Sz C) {
  const Sz quarter = C / 4;
  for (Sz row = 0; row < grid; ++row) {
    for (Sz col = 0; col < grid; ++col) {
      double* t = &table[(row * grid + col) * C];
      for (Sz k = 0; k < quarter; ++k) {
        const double omega = 1.0 / std::pow(10000.0, static_cast<double>(k) / static_cast<double>(quarter));
        t[k] = std::sin(row * omega);
        t[quarter + k] = std::cos(row * omega);
        t[2 * quarter + k] = std::sin(col * omega);
        t[3 * quarter + k] = std::cos(col * omega);
      }
    }
  }
}

}  // namespace

Tensor CameraOutput::packed() const { return ops::concat_last({quat, translation, fov}); }

UniScaleModel::UniScaleModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  Rng rng(config_.seed);
  const Sz C = config_.embed_dim;
  const Sz P = config_.patch_count();
  const Sz R = config_.register_count;
  const Sz hidden = C * config_.mlp_ratio;
  auto& ps = params_;

  add_linear(ps, "patch_embed", config_.patch_values(), C, 1.0 / std::sqrt(double(config_.patch_values())), rng);
  ps.add_normal("class.token", {C}, 0.02, rng, ParamGroup::kBackbone);
  ps.add_normal("class.mix", {C, C}, 1.0 / std::sqrt(double(C)), rng, ParamGroup::kBackbone);
  ps.add_normal("pos_embed", {P, C}, 0.02, rng, ParamGroup::kBackbone);
  init_sincos(ps.get("pos_embed").mutable_data(), config_.grid(), C);
  ps.add_normal("camera.first", {C}, 0.02, rng, ParamGroup::kBackbone);
  ps.add_normal("camera.rest", {C}, 0.02, rng, ParamGroup::kBackbone);
  if (R > 0) {
    ps.add_normal("register.first", {R, C}, 0.02, rng, ParamGroup::kBackbone);
    ps.add_normal("register.rest", {R, C}, 0.02, rng, ParamGroup::kBackbone);
  }
  for (int b = 0; b < config_.aggregator_blocks; ++b) {
    const std::string name = "block" + std::to_string(b);
    add_attention(ps, name + ".attn", C, rng);
    add_linear(ps, name + ".mlp1", C, hidden, std::sqrt(2.0 / double(C)), rng);
    add_linear(ps, name + ".mlp2", hidden, C, 0.02, rng);
  }

  add_attention(ps, "camera_head.attn", C, rng);
  add_linear(ps, "camera_head.out", C, 9, 0.02, rng);
  ps.get("camera_head.out.b").mutable_data()[0] = 1.0;  // identity rotation at init

  const Sz c1 = config_.dense_channels1;
  const Sz c2 = config_.dense_channels2;
  const Sz r = config_.patch_size / 4;
  add_linear(ps, "dense_head.up1", C, 4 * c1, std::sqrt(2.0 / double(C)), rng);
  add_linear(ps, "dense_head.up2", c1, 4 * c2, std::sqrt(2.0 / double(c1)), rng);
  add_linear(ps, "dense_head.out", c2, 6 * r * r, 0.01, rng);

  prior::add_prior_parameters(ps, config_, rng);

  const Sz in = C * config_.scale_input_count();
  add_linear(ps, "scale_head.pool", C, 1, 0.02, rng, ParamGroup::kScaleAndPriors);
  add_linear(ps, "scale_head.mlp1", in, C, std::sqrt(2.0 / double(in)), rng, ParamGroup::kScaleAndPriors);
  ps.add_zeros("scale_head.mlp2.w", {C, 1}, ParamGroup::kScaleAndPriors);
  ps.add_zeros("scale_head.mlp2.b", {1}, ParamGroup::kScaleAndPriors);
}

EmbeddedImages UniScaleModel::patchify_embed(const Tensor& images) const {
  const Sz S = config_.image_size;
  const Sz p = config_.patch_size;
  const Sz g = config_.grid();
  const auto& shape = images.shape();
  if (shape.size() != 4 || shape[0] < 1 || shape[1] != 3 || shape[2] != S || shape[3] != S) {
    throw ModelError("patchify_embed: expected images [N, 3, " + std::to_string(S) + ", " + std::to_string(S) +
                     "], got " + ad::shape_str(shape));
  }
  const Sz N = shape[0];
  Tensor x = ops::reshape(images, {N, 3, g, p, g, p});
  x = ops::permute(x, {0, 2, 4, 1, 3, 5});
  x = ops::reshape(x, {N, g * g, 3 * p * p});
  EmbeddedImages out;
  out.patches = ops::matmul(x, param("patch_embed.w")) + param("patch_embed.b");
  out.class_token = ops::matmul(ops::mean(out.patches, 1, true), param("class.mix")) + param("class.token");
  return out;
}

prior::TokenStreams UniScaleModel::assemble_tokens(const EmbeddedImages& embedded,
                                                   const prior::PriorEmbeddings* priors) const {
  const Sz N = embedded.patches.dim(0);
  const Sz C = config_.embed_dim;
  const Sz R = config_.register_count;
  auto per_frame = [&](const std::string& first, const std::string& rest, Sz rows) {
    Tensor head = ops::reshape(param(first), {1, rows, C});
    if (N == 1) return head;
    Tensor tail = Tensor::zeros({N - 1, rows, C}) + ops::reshape(param(rest), {rows, C});
    return ops::concat({head, tail}, 0);
  };
  prior::TokenStreams t;
  t.class_token = embedded.class_token;
  t.camera = per_frame("camera.first", "camera.rest", 1);
  if (R > 0) t.registers = per_frame("register.first", "register.rest", R);
  t.patches = embedded.patches;
  if (priors != nullptr) prior::route(t, *priors, prior::Destination::kMainTokens);
  return t;
}

Tensor UniScaleModel::attention(const Tensor& x, const std::string& prefix) const {
  const Sz C = config_.embed_dim;
  const Sz H = config_.attention_heads;
  const Sz dh = C / H;
  Tensor qkv = ops::matmul(x, param(prefix + ".qkv.w")) + param(prefix + ".qkv.b");
  std::vector<Tensor> heads;
  heads.reserve(H);
  const double inv = 1.0 / std::sqrt(double(dh));
  for (Sz h = 0; h < H; ++h) {
    Tensor q = ops::slice(qkv, -1, h * dh, dh);
    Tensor k = ops::slice(qkv, -1, C + h * dh, dh);
    Tensor v = ops::slice(qkv, -1, 2 * C + h * dh, dh);
    Tensor a = ops::softmax(ops::scale(ops::matmul(q, ops::transpose_last_two(k)), inv), -1);
    heads.push_back(ops::matmul(a, v));
  }
  Tensor o = H == 1 ? heads[0] : ops::concat_last(heads);
  return ops::matmul(o, param(prefix + ".proj.w")) + param(prefix + ".proj.b");
}

Tensor UniScaleModel::block(const Tensor& x, const std::string& prefix) const {
  Tensor y = x + attention(ops::layer_norm(x), prefix + ".attn");
  Tensor h = ops::relu(ops::matmul(ops::layer_norm(y), param(prefix + ".mlp1.w")) + param(prefix + ".mlp1.b"));
  return y + (ops::matmul(h, param(prefix + ".mlp2.w")) + param(prefix + ".mlp2.b"));
}

AggregatedTokens UniScaleModel::aggregate(const prior::TokenStreams& t) const {
  if (!t.patches.defined() || t.patches.rank() != 3 || t.patches.dim(0) == 0) {
    throw ModelError("aggregate: no frames");
  }
  const Sz N = t.patches.dim(0);
  const Sz C = config_.embed_dim;
  const Sz P = config_.patch_count();
  const Sz R = config_.register_count;
  const Sz T = config_.tokens_per_frame();
  std::vector<Tensor> parts = {t.class_token, t.camera};
  if (R > 0) parts.push_back(t.registers);
  parts.push_back(t.patches + param("pos_embed"));
  Tensor x = ops::concat(parts, 1);
  for (int b = 0; b < config_.aggregator_blocks; ++b) {
    const std::string name = "block" + std::to_string(b);
    if (b % 2 == 0) {
      x = block(x, name);
    } else {
      x = ops::reshape(block(ops::reshape(x, {1, N * T, C}), name), {N, T, C});
    }
  }
  AggregatedTokens out;
  out.camera = ops::slice(x, 1, 1, 1);
  out.patches = ops::slice(x, 1, 2 + R, P);
  return out;
}

CameraOutput UniScaleModel::camera_head(const Tensor& camera_tokens) const {
  const Sz N = camera_tokens.dim(0);
  const Sz C = config_.embed_dim;
  Tensor x = ops::reshape(camera_tokens, {1, N, C});
  x = x + attention(ops::layer_norm(x), "camera_head.attn");
  Tensor raw = ops::reshape(ops::matmul(ops::layer_norm(x), param("camera_head.out.w")) + param("camera_head.out.b"), {N, 9});

  // Frame 0 is pinned to the identity pose: its entries are multiplied by
  // zero and replaced by constants.
  std::vector<double> qmask(N * 4, 1.0), qoff(N * 4, 0.0), tmask(N * 3, 1.0);
  for (Sz k = 0; k < 4; ++k) qmask[k] = 0.0;
  for (Sz k = 0; k < 3; ++k) tmask[k] = 0.0;
  qoff[0] = 1.0;
  CameraOutput out;
  Tensor q = ops::l2_normalize(ops::slice(raw, 1, 0, 4));
  out.quat = q * Tensor::from({N, 4}, std::move(qmask)) + Tensor::from({N, 4}, std::move(qoff));
  out.translation =
      ops::slice(raw, 1, 4, 3) * Tensor::from({N, 3}, std::move(tmask)) + Tensor::zeros({N, 3});
  out.fov = ops::scale(ops::sigmoid(ops::slice(raw, 1, 7, 2)), kPi);
  return out;
}

Tensor pixel_shuffle(const Tensor& x, Sz r) {
  const auto& s = x.shape();
  if (s.size() != 4 || s[3] % (r * r) != 0) {
    throw ModelError("pixel_shuffle: cannot split " + ad::shape_str(s) + " by factor " + std::to_string(r));
  }
  const Sz c = s[3] / (r * r);
  Tensor y = ops::reshape(x, {s[0], s[1], s[2], r, r, c});
  y = ops::permute(y, {0, 1, 3, 2, 4, 5});
  return ops::reshape(y, {s[0], s[1] * r, s[2] * r, c});
}

DenseOutput UniScaleModel::dense_head(const Tensor& patch_tokens) const {
  const Sz N = patch_tokens.dim(0);
  const Sz g = config_.grid();
  const Sz S = config_.image_size;
  const Sz r = config_.patch_size / 4;
  Tensor x = ops::reshape(ops::layer_norm(patch_tokens), {N, g, g, Sz(config_.embed_dim)});
  x = pixel_shuffle(ops::relu(ops::matmul(x, param("dense_head.up1.w")) + param("dense_head.up1.b")), 2);
  x = pixel_shuffle(ops::relu(ops::matmul(x, param("dense_head.up2.w")) + param("dense_head.up2.b")), 2);
  x = ops::matmul(x, param("dense_head.out.w")) + param("dense_head.out.b");
  if (r > 1) x = pixel_shuffle(x, r);
  DenseOutput out;
  auto channel = [&](Sz start, Sz len) { return ops::slice(x, 3, start, len); };
  out.depth = ops::reshape(ops::exp(channel(0, 1)), {N, S, S});
  out.depth_conf = ops::reshape(ops::exp(channel(1, 1)), {N, S, S});
  out.points = channel(2, 3);
  out.point_conf = ops::reshape(ops::exp(channel(5, 1)), {N, S, S});
  return out;
}

Tensor UniScaleModel::pool_weights(const Tensor& patch_tokens) const {
  if (patch_tokens.rank() != 3 || patch_tokens.dim(1) == 0) {
    throw ModelError("attention_pool: expected [N, P, C] with P >= 1, got " + ad::shape_str(patch_tokens.shape()));
  }
  Tensor logits = ops::matmul(patch_tokens, param("scale_head.pool.w")) + param("scale_head.pool.b");
  return ops::softmax(logits, 1);
}

Tensor UniScaleModel::attention_pool(const Tensor& patch_tokens) const {
  return ops::matmul(ops::transpose_last_two(pool_weights(patch_tokens)), patch_tokens);
}

Tensor UniScaleModel::scale_head(const AggregatedTokens& aggregated, const Tensor& class_tokens,
                                 const prior::PriorEmbeddings* priors) const {
  const Sz N = aggregated.camera.dim(0);
  if (aggregated.patches.dim(0) != N || class_tokens.dim(0) != N) {
    throw ModelError("scale_head: frame counts differ (camera " + std::to_string(N) + ", patches " +
                     std::to_string(aggregated.patches.dim(0)) + ", class " + std::to_string(class_tokens.dim(0)) +
                     ")");
  }
  prior::TokenStreams t;
  t.class_token = class_tokens;
  t.camera = aggregated.camera;
  t.patches = aggregated.patches;
  if (priors != nullptr) {
    prior::PriorEmbeddings e = *priors;
    if (!config_.scale_use_patch) e.ray = Tensor();
    if (!config_.scale_use_camera && !config_.scale_use_class) e.pose = Tensor();
    prior::route(t, e, prior::Destination::kScaleHead, !config_.scale_use_camera);
  }
  std::vector<Tensor> parts;
  if (config_.scale_use_camera) parts.push_back(ops::layer_norm(t.camera));
  if (config_.scale_use_patch) parts.push_back(ops::layer_norm(attention_pool(t.patches)));
  if (config_.scale_use_class) parts.push_back(ops::layer_norm(t.class_token));
  Tensor tokens = parts.size() == 1 ? parts[0] : ops::concat_last(parts);
  Tensor h = ops::relu(ops::matmul(tokens, param("scale_head.mlp1.w")) + param("scale_head.mlp1.b"));
  Tensor logit = ops::matmul(h, param("scale_head.mlp2.w")) + param("scale_head.mlp2.b");
  return ops::mean_all(ops::exp(logit));
}

ModelOutput UniScaleModel::forward(const Tensor& images, const prior::PriorBundle& priors) const {
  ModelOutput out;
  out.embedded = patchify_embed(images);
  const Sz N = images.dim(0);
  prior::PriorEmbeddings emb;
  const bool inject = config_.prior_injection && !priors.empty();
  if (inject) {
    priors.validate(N);
    emb = prior::encode_bundle(params_, config_, priors);
  }
  prior::TokenStreams tokens = assemble_tokens(out.embedded, inject ? &emb : nullptr);
  out.aggregated = aggregate(tokens);
  out.camera = camera_head(out.aggregated.camera);
  out.dense = dense_head(out.aggregated.patches);
  if (config_.scale_head) {
    const bool into_head = inject && config_.prior_into_scale_head;
    out.scale = scale_head(out.aggregated, out.embedded.class_token, into_head ? &emb : nullptr);
  } else {
    out.scale = Tensor::scalar(1.0);
  }
  return out;
}

MetricOutput metricize(const DenseOutput& dense, const CameraOutput& camera, const Tensor& scale) {
  if (scale.numel() != 1) throw ModelError("metricize: scale must be a single value");
  if (!(scale.item() > 0.0)) throw ModelError("metricize: scale must be positive, got " + std::to_string(scale.item()));
  MetricOutput out;
  out.depth = dense.depth * scale;
  out.points = dense.points * scale;
  out.translation = camera.translation * scale;
  return out;
}

}  // namespace scalerecon::model
