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

#include "scalerecon/supervision/scale_target.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scalerecon::sup {

double median_valid_depth(std::span<const double> depths) {
  std::vector<double> v;
  v.reserve(depths.size());
  for (double d : depths) {
    if (d > 0.0) v.push_back(d);
  }
  if (v.empty()) throw SupervisionError("scale target: no valid depth");
  const std::size_t hi = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + hi, v.end());
  const double upper = v[hi];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + hi);
  return 0.5 * (lower + upper);
}

ScaleTarget compute_scale_target(std::span<const double> depths, std::span<const geom::Intrinsics> intrinsics,
                                 std::span<const geom::Pose> poses, double cap_factor) {
  const std::size_t n = intrinsics.size();
  if (n == 0 || poses.size() != n) throw SupervisionError("scale target: need one pose and intrinsics per frame");
  if (!(cap_factor > 0.0)) throw SupervisionError("scale target: cap_factor must be positive");
  const int W = intrinsics[0].width;
  const int H = intrinsics[0].height;
  const std::size_t px = static_cast<std::size_t>(W) * H;
  if (depths.size() != n * px) throw SupervisionError("scale target: depth buffer size does not match frames");
  const geom::Pose& p0 = poses[0];
  if ((p0.rotation - geom::Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 || p0.translation.norm() > 1e-9) {
    throw SupervisionError("scale target: frame 0 pose must be the identity");
  }

  ScaleTarget out;
  out.frames = static_cast<int>(n);
  out.width = W;
  out.height = H;
  out.depth_cap = cap_factor * median_valid_depth(depths);
  out.depth.assign(depths.begin(), depths.end());
  for (double& d : out.depth) d = std::min(d, out.depth_cap);
  out.points.assign(3 * n * px, 0.0);
  out.valid.assign(n * px, 0);

  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < n; ++f) {
    if (intrinsics[f].width != W || intrinsics[f].height != H) {
      throw SupervisionError("scale target: frames differ in image size");
    }
    auto cam = geom::unproject(std::span<const double>(out.depth).subspan(f * px, px), intrinsics[f]);
    auto world = geom::transform_points(cam, poses[f]);
    for (std::size_t i = 0; i < px; ++i) {
      if (!world.valid[i]) continue;
      out.valid[f * px + i] = 1;
      const double* x = &world.xyz[3 * i];
      std::copy_n(x, 3, &out.points[3 * (f * px + i)]);
      total += std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      ++count;
    }
  }
  if (count == 0) throw SupervisionError("scale target: no valid points");
  out.scale = total / static_cast<double>(count);
  if (!(out.scale > 0.0) || !std::isfinite(out.scale)) {
    throw SupervisionError("scale target: degenerate scale " + std::to_string(out.scale));
  }
  for (double& d : out.depth) d /= out.scale;
  for (double& x : out.points) x /= out.scale;
  out.poses.assign(poses.begin(), poses.end());
  for (auto& p : out.poses) p.translation /= out.scale;
  return out;
}

}  // namespace scalerecon::sup
