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

#include "scalerecon/prior/prior.hpp"

#include <cmath>
#include <string>

namespace scalerecon::prior {

using ad::ParamGroup;
using ad::Tensor;

void PriorBundle::validate(std::size_t frames) const {
  if (has_pose() && poses.size() != frames) {
    throw PriorError("prior bundle: " + std::to_string(poses.size()) + " poses for " + std::to_string(frames) +
                     " frames");
  }
  if (has_intrinsics() && intrinsics.size() != frames) {
    throw PriorError("prior bundle: " + std::to_string(intrinsics.size()) + " intrinsics for " +
                     std::to_string(frames) + " frames");
  }
  if (pose_scale < 0.0 || !std::isfinite(pose_scale)) throw PriorError("prior bundle: invalid pose_scale");
  for (const auto& p : poses) p.validate(1e-6);
  for (const auto& k : intrinsics) k.validate();
}

double PriorBundle::resolved_pose_scale() const {
  if (pose_scale > 0.0) return pose_scale;
  if (poses.empty()) return 1.0;
  double total = 0.0;
  for (const auto& p : poses) total += p.translation.norm();
  const double mean = total / static_cast<double>(poses.size());
  return mean > 0.0 ? mean : 1.0;
}

void add_prior_parameters(ad::ParameterStore& params, const model::ModelConfig& c, Rng& rng) {
  const std::size_t C = c.embed_dim;
  const std::size_t in = c.pose_input_width();
  params.add_normal("pose_encoder.w1", {in, C}, std::sqrt(2.0 / in), rng, ParamGroup::kScaleAndPriors);
  params.add_zeros("pose_encoder.b1", {C}, ParamGroup::kScaleAndPriors);
  params.add_normal("pose_encoder.w2", {C, C}, 0.02, rng, ParamGroup::kScaleAndPriors);
  params.add_zeros("pose_encoder.b2", {C}, ParamGroup::kScaleAndPriors);
  const std::size_t pv = c.patch_values();
  params.add_normal("ray_encoder.w", {pv, C}, 0.02, rng, ParamGroup::kScaleAndPriors);
  params.add_zeros("ray_encoder.b", {C}, ParamGroup::kScaleAndPriors);
}

Tensor pose_features(std::span<const geom::Pose> poses, double scale_norm, model::PoseEncoding encoding) {
  if (!(scale_norm > 0.0)) throw PriorError("pose encoder: scale_norm must be positive");
  const std::size_t width = encoding == model::PoseEncoding::kRot6D ? 9 : 7;
  std::vector<double> g;
  g.reserve(poses.size() * width);
  for (const auto& p : poses) {
    if (encoding == model::PoseEncoding::kRot6D) {
      const geom::Rot6D r = geom::matrix_to_rot6d(p.rotation);
      g.insert(g.end(), r.data(), r.data() + 6);
    } else {
      const geom::Vec4 q = geom::matrix_to_quat(p.rotation);
      g.insert(g.end(), q.data(), q.data() + 4);
    }
    for (int k = 0; k < 3; ++k) g.push_back(p.translation[k] / scale_norm);
  }
  return Tensor::from({poses.size(), width}, std::move(g));
}

Tensor encode_pose(const ad::ParameterStore& params, const model::ModelConfig& c, std::span<const geom::Pose> poses,
                   double scale_norm) {
  Tensor g = pose_features(poses, scale_norm, c.pose_encoding);
  Tensor h = ad::relu(ad::matmul(g, params.get("pose_encoder.w1")) + params.get("pose_encoder.b1"));
  Tensor e = ad::matmul(h, params.get("pose_encoder.w2")) + params.get("pose_encoder.b2");
  return ad::reshape(e, {poses.size(), 1, static_cast<std::size_t>(c.embed_dim)});
}

Tensor patchified_raymaps(std::span<const geom::Intrinsics> intrinsics, const model::ModelConfig& c) {
  const std::size_t n = intrinsics.size();
  const int g = c.grid();
  const int p = c.patch_size;
  const std::size_t pv = c.patch_values();
  std::vector<double> out(n * c.patch_count() * pv);
  for (std::size_t f = 0; f < n; ++f) {
    const auto& K = intrinsics[f];
    if (K.width != c.image_size || K.height != c.image_size) {
      throw PriorError("intrinsics encoder: camera is " + std::to_string(K.width) + "x" + std::to_string(K.height) +
                       ", model expects " + std::to_string(c.image_size) + "x" + std::to_string(c.image_size));
    }
    const std::vector<double> rays = geom::make_raymap(K);
    for (int gy = 0; gy < g; ++gy) {
      for (int gx = 0; gx < g; ++gx) {
        double* dst = out.data() + ((f * g + gy) * g + gx) * pv;
        for (int ch = 0; ch < 3; ++ch) {
          for (int dy = 0; dy < p; ++dy) {
            for (int dx = 0; dx < p; ++dx) {
              const std::size_t pix = static_cast<std::size_t>(gy * p + dy) * c.image_size + (gx * p + dx);
              dst[(ch * p + dy) * p + dx] = rays[3 * pix + ch];
            }
          }
        }
      }
    }
  }
  return Tensor::from({n, static_cast<std::size_t>(c.patch_count()), pv}, std::move(out));
}

Tensor encode_intrinsics(const ad::ParameterStore& params, const model::ModelConfig& c,
                         std::span<const geom::Intrinsics> intrinsics) {
  return ad::matmul(patchified_raymaps(intrinsics, c), params.get("ray_encoder.w")) + params.get("ray_encoder.b");
}

PriorEmbeddings encode_bundle(const ad::ParameterStore& params, const model::ModelConfig& c,
                              const PriorBundle& bundle) {
  PriorEmbeddings e;
  if (bundle.has_pose()) e.pose = encode_pose(params, c, bundle.poses, bundle.resolved_pose_scale());
  if (bundle.has_intrinsics()) e.ray = encode_intrinsics(params, c, bundle.intrinsics);
  return e;
}

void route(TokenStreams& tokens, const PriorEmbeddings& e, Destination destination, bool pose_into_class) {
  if (destination != Destination::kMainTokens && destination != Destination::kScaleHead) {
    throw PriorError("route: undeclared destination " + std::to_string(static_cast<int>(destination)));
  }
  if (e.pose.defined()) {
    Tensor& target = pose_into_class ? tokens.class_token : tokens.camera;
    if (!target.defined()) throw PriorError("route: pose embedding has no target token");
    if (target.shape() != e.pose.shape()) {
      throw PriorError("route: pose embedding " + ad::shape_str(e.pose.shape()) + " does not match token " +
                       ad::shape_str(target.shape()));
    }
    target = target + e.pose;
  }
  if (e.ray.defined()) {
    if (!tokens.patches.defined()) throw PriorError("route: ray embedding has no target token");
    if (tokens.patches.shape() != e.ray.shape()) {
      throw PriorError("route: ray embedding " + ad::shape_str(e.ray.shape()) + " does not match tokens " +
                       ad::shape_str(tokens.patches.shape()));
    }
    tokens.patches = tokens.patches + e.ray;
  }
}

PriorConfig sample_prior_config(Rng& rng, bool batch_is_metric, const PriorProbabilities& p) {
  const double u_inject = uniform01(rng);
  const double u_pose = uniform01(rng);
  const double u_intrinsics = uniform01(rng);
  const double u_supervise = uniform01(rng);
  PriorConfig out;
  out.inject_any = u_inject < p.inject;
  out.use_pose = out.inject_any && u_pose < p.per_type;
  out.use_intrinsics = out.inject_any && u_intrinsics < p.per_type;
  out.supervise_scale = batch_is_metric && u_supervise < p.supervise;
  return out;
}

}  // namespace scalerecon::prior
