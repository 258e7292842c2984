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

#include "scalerecon/supervision/losses.hpp"

#include <cmath>
#include <string>

namespace scalerecon::sup {

namespace {

using Sz = std::size_t;

void require_same(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw SupervisionError(std::string(op) + ": shapes differ " + ad::shape_str(a.shape()) + " vs " +
                           ad::shape_str(b.shape()));
  }
}

struct PairMasks {
  Tensor x, y;  // [N, H, W-1], [N, H-1, W]
  double x_count = 0.0, y_count = 0.0;
};

PairMasks pair_masks(std::span<const std::uint8_t> valid, Sz N, Sz H, Sz W) {
  std::vector<double> mx(N * H * (W - 1)), my(N * (H - 1) * W);
  PairMasks m;
  for (Sz f = 0; f < N; ++f) {
    for (Sz v = 0; v < H; ++v) {
      for (Sz u = 0; u < W; ++u) {
        const Sz i = (f * H + v) * W + u;
        if (u + 1 < W && valid[i] && valid[i + 1]) {
          mx[(f * H + v) * (W - 1) + u] = 1.0;
          m.x_count += 1.0;
        }
        if (v + 1 < H && valid[i] && valid[i + W]) {
          my[(f * (H - 1) + v) * W + u] = 1.0;
          m.y_count += 1.0;
        }
      }
    }
  }
  if (m.x_count > 0.0) m.x = Tensor::from({N, H, W - 1}, std::move(mx));
  if (m.y_count > 0.0) m.y = Tensor::from({N, H - 1, W}, std::move(my));
  return m;
}

// Forward difference along `axis` (1 = rows, 2 = columns).
Tensor diff(const Tensor& t, int axis) {
  const Sz n = t.dim(axis);
  return ad::slice(t, axis, 1, n - 1) - ad::slice(t, axis, 0, n - 1);
}

// Shared body of the depth and point losses; point residuals are summed
// over their 3 channels.
Tensor confidence_loss(const char* op, const Tensor& pred, const Tensor& conf, const Tensor& gt,
                       std::span<const std::uint8_t> valid, double alpha, bool points) {
  require_same(op, pred, gt);
  if (conf.rank() != 3 || pred.dim(0) != conf.dim(0) || pred.dim(1) != conf.dim(1) || pred.dim(2) != conf.dim(2)) {
    throw SupervisionError(std::string(op) + ": confidence " + ad::shape_str(conf.shape()) +
                           " does not match prediction " + ad::shape_str(pred.shape()));
  }
  const Sz N = conf.dim(0), H = conf.dim(1), W = conf.dim(2);
  if (valid.size() != N * H * W) throw SupervisionError(std::string(op) + ": mask size mismatch");
  std::vector<double> m(valid.size());
  double count = 0.0;
  for (Sz i = 0; i < valid.size(); ++i) {
    m[i] = valid[i] ? 1.0 : 0.0;
    count += m[i];
  }
  if (count == 0.0) throw SupervisionError(std::string(op) + ": empty mask");
  Tensor mask = Tensor::from({N, H, W}, std::move(m));

  auto l1 = [&](const Tensor& a, const Tensor& b) {
    Tensor r = ad::abs(a - b);
    return points ? ad::sum(r, 3) : r;
  };
  Tensor residual = l1(pred, gt);
  Tensor data = ad::mul(conf, residual) - ad::scale(ad::log(conf), alpha);
  Tensor loss = ad::scale(ad::sum_all(data * mask), 1.0 / count);

  const PairMasks pm = pair_masks(valid, N, H, W);
  if (pm.x_count > 0.0) {
    Tensor gx = l1(diff(pred, 2), diff(gt, 2));
    loss = loss + ad::scale(ad::sum_all(gx * pm.x), 1.0 / pm.x_count);
  }
  if (pm.y_count > 0.0) {
    Tensor gy = l1(diff(pred, 1), diff(gt, 1));
    loss = loss + ad::scale(ad::sum_all(gy * pm.y), 1.0 / pm.y_count);
  }
  return loss;
}

}  // namespace

Tensor loss_camera(const Tensor& pred, const Tensor& target, double delta) {
  require_same("loss_camera", pred, target);
  if (pred.rank() != 2 || pred.dim(1) != 9) {
    throw SupervisionError("loss_camera: expected [N, 9], got " + ad::shape_str(pred.shape()));
  }
  const Sz N = pred.dim(0);
  std::vector<double> sign(N * 9, 1.0);
  for (Sz f = 0; f < N; ++f) {
    geom::Vec4 q(pred.at(9 * f), pred.at(9 * f + 1), pred.at(9 * f + 2), pred.at(9 * f + 3));
    if (geom::canonicalize_quat(q) != q) {
      for (Sz k = 0; k < 4; ++k) sign[9 * f + k] = -1.0;
    }
  }
  Tensor canonical = pred * Tensor::from({N, 9}, std::move(sign));
  return ad::mean_all(ad::huber(canonical - target, delta));
}

Tensor loss_depth(const Tensor& pred, const Tensor& conf, const Tensor& gt, std::span<const std::uint8_t> valid,
                  double alpha) {
  if (pred.rank() != 3) throw SupervisionError("loss_depth: expected [N, H, W], got " + ad::shape_str(pred.shape()));
  return confidence_loss("loss_depth", pred, conf, gt, valid, alpha, false);
}

Tensor loss_pmap(const Tensor& pred, const Tensor& conf, const Tensor& gt, std::span<const std::uint8_t> valid,
                 double alpha) {
  if (pred.rank() != 4 || pred.dim(3) != 3) {
    throw SupervisionError("loss_pmap: expected [N, H, W, 3], got " + ad::shape_str(pred.shape()));
  }
  return confidence_loss("loss_pmap", pred, conf, gt, valid, alpha, true);
}

Tensor loss_scale(const Tensor& scale_pred, double scale_gt, bool supervise) {
  if (!supervise) return Tensor::scalar(0.0);
  if (scale_pred.numel() != 1) throw SupervisionError("loss_scale: prediction must be a single value");
  if (!(scale_gt > 0.0) || !(scale_pred.item() > 0.0)) {
    throw SupervisionError("loss_scale: scales must be positive (pred " + std::to_string(scale_pred.item()) +
                           ", target " + std::to_string(scale_gt) + ")");
  }
  return ad::abs(ad::add_scalar(ad::log(scale_pred), -std::log(scale_gt)));
}

Tensor camera_targets(std::span<const geom::Pose> poses, std::span<const geom::Intrinsics> intrinsics) {
  if (poses.size() != intrinsics.size()) throw SupervisionError("camera_targets: frame count mismatch");
  std::vector<double> v;
  v.reserve(poses.size() * 9);
  for (Sz f = 0; f < poses.size(); ++f) {
    const geom::Vec4 q = geom::matrix_to_quat(poses[f].rotation);
    const geom::Vec2 fov = geom::fov_from_intrinsics(intrinsics[f]);
    v.insert(v.end(), {q[0], q[1], q[2], q[3], poses[f].translation.x(), poses[f].translation.y(),
                       poses[f].translation.z(), fov[0], fov[1]});
  }
  return Tensor::from({poses.size(), 9}, std::move(v));
}

SceneTargets make_targets(const ScaleTarget& t, std::span<const geom::Intrinsics> intrinsics) {
  const Sz N = t.frames, H = t.height, W = t.width;
  SceneTargets out;
  out.camera = camera_targets(t.poses, intrinsics);
  out.depth = Tensor::from({N, H, W}, t.depth);
  out.points = Tensor::from({N, H, W, 3}, t.points);
  out.valid = t.valid;
  out.scale = t.scale;
  return out;
}

Losses compute_losses(const model::ModelOutput& out, const SceneTargets& t, bool supervise_scale,
                      const LossWeights& w) {
  Tensor cam = loss_camera(out.camera.packed(), t.camera, w.huber_delta);
  Tensor depth = loss_depth(out.dense.depth, out.dense.depth_conf, t.depth, t.valid, w.conf_alpha);
  Tensor pmap = loss_pmap(out.dense.points, out.dense.point_conf, t.points, t.valid, w.conf_alpha);
  Tensor scale = loss_scale(out.scale, t.scale, supervise_scale);
  Losses l;
  l.total = cam + depth + pmap + scale;
  l.report.camera = cam.item();
  l.report.depth = depth.item();
  l.report.pmap = pmap.item();
  l.report.scale = scale.item();
  l.report.total = l.total.item();
  l.report.scale_supervised = supervise_scale;
  return l;
}

}  // namespace scalerecon::sup
