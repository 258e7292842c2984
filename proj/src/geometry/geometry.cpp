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

#include "scalerecon/geometry/geometry.hpp"

#include <cmath>
#include <string>

namespace scalerecon::geom {

void Intrinsics::validate() const {
  if (width <= 0 || height <= 0) throw GeometryError("intrinsics: image extents must be positive");
  if (!(fx > 0.0) || !(fy > 0.0)) throw GeometryError("intrinsics: focal lengths must be positive");
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw GeometryError("intrinsics: principal point (" + std::to_string(cx) + ", " + std::to_string(cy) +
                        ") outside the image");
  }
}

Mat3 Intrinsics::matrix() const {
  Mat3 k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

Pose Pose::compose(const Pose& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

Pose Pose::inverse() const {
  Mat3 rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

void Pose::validate(double tol) const {
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (ortho > tol || std::abs(det - 1.0) > tol) {
    throw GeometryError("pose: rotation is not in SO(3) (orthogonality error " + std::to_string(ortho) +
                        ", det " + std::to_string(det) + ")");
  }
  if (!translation.allFinite()) throw GeometryError("pose: non-finite translation");
}

Mat3 rot6d_to_matrix(const Rot6D& r) {
  const Vec3 a1 = r.head<3>();
  const Vec3 a2 = r.tail<3>();
  const double n1 = a1.norm();
  const double n2 = a2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0) || a1.cross(a2).norm() / (n1 * n2) <= 1e-9) {
    throw GeometryError("rot6d: halves are zero or nearly parallel");
  }
  const Vec3 b1 = a1 / n1;
  const Vec3 b2 = (a2 - b1.dot(a2) * b1).normalized();
  Mat3 R;
  R.col(0) = b1;
  R.col(1) = b2;
  R.col(2) = b1.cross(b2);
  return R;
}

Rot6D matrix_to_rot6d(const Mat3& R) {
  Pose{R, Vec3::Zero()}.validate(1e-6);
  Rot6D r;
  r.head<3>() = R.col(0);
  r.tail<3>() = R.col(1);
  return r;
}

Vec4 canonicalize_quat(const Vec4& q) {
  for (int i = 0; i < 4; ++i) {
    if (q[i] > 0.0) return q;
    if (q[i] < 0.0) return -q;
  }
  return q;
}

Mat3 quat_to_matrix(const Vec4& q) {
  const double n = q.norm();
  if (!(n > 0.0)) throw GeometryError("quat_to_matrix: zero quaternion");
  const Eigen::Quaterniond e(q[0] / n, q[1] / n, q[2] / n, q[3] / n);
  return e.toRotationMatrix();
}

Vec4 matrix_to_quat(const Mat3& R) {
  Pose{R, Vec3::Zero()}.validate(1e-6);
  Eigen::Quaterniond e(R);
  e.normalize();
  return canonicalize_quat(Vec4(e.w(), e.x(), e.y(), e.z()));
}

Vec3 pixel_ray(const Intrinsics& K, double u, double v) {
  return {(u + 0.5 - K.cx) / K.fx, (v + 0.5 - K.cy) / K.fy, 1.0};
}

Vec2 project(const Intrinsics& K, const Vec3& x) {
  return {K.fx * x.x() / x.z() + K.cx - 0.5, K.fy * x.y() / x.z() + K.cy - 0.5};
}

std::vector<double> make_raymap(const Intrinsics& K) {
  K.validate();
  std::vector<double> rays(static_cast<std::size_t>(K.width) * K.height * 3);
  std::size_t i = 0;
  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const Vec3 d = pixel_ray(K, u, v).normalized();
      rays[i++] = d.x();
      rays[i++] = d.y();
      rays[i++] = d.z();
    }
  }
  return rays;
}

PointMap unproject(std::span<const double> depth, const Intrinsics& K) {
  K.validate();
  const std::size_t n = static_cast<std::size_t>(K.width) * K.height;
  if (depth.size() != n) throw GeometryError("unproject: depth map size does not match intrinsics");
  PointMap pm;
  pm.width = K.width;
  pm.height = K.height;
  pm.xyz.resize(3 * n);
  pm.valid.resize(n);
  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * K.width + u;
      const double d = depth[i];
      if (d < 0.0 || std::isnan(d)) throw GeometryError("unproject: negative depth at pixel " + std::to_string(i));
      const Vec3 p = d * pixel_ray(K, u, v);
      pm.xyz[3 * i] = p.x();
      pm.xyz[3 * i + 1] = p.y();
      pm.xyz[3 * i + 2] = p.z();
      pm.valid[i] = d > 0.0 ? 1 : 0;
    }
  }
  return pm;
}

PointMap transform_points(const PointMap& points, const Pose& pose) {
  PointMap out = points;
  for (std::size_t i = 0; i < points.valid.size(); ++i) {
    const Vec3 x(points.xyz[3 * i], points.xyz[3 * i + 1], points.xyz[3 * i + 2]);
    const Vec3 y = pose.apply(x);
    out.xyz[3 * i] = y.x();
    out.xyz[3 * i + 1] = y.y();
    out.xyz[3 * i + 2] = y.z();
  }
  return out;
}

Vec2 fov_from_intrinsics(const Intrinsics& K) {
  K.validate();
  return {2.0 * std::atan(K.width / (2.0 * K.fx)), 2.0 * std::atan(K.height / (2.0 * K.fy))};
}

Intrinsics intrinsics_from_fov(const Vec2& fov, int width, int height) {
  for (int i = 0; i < 2; ++i) {
    if (!(fov[i] > 0.0 && fov[i] < M_PI)) throw GeometryError("intrinsics_from_fov: fov outside (0, pi)");
  }
  Intrinsics K;
  K.width = width;
  K.height = height;
  K.fx = width / (2.0 * std::tan(fov[0] / 2.0));
  K.fy = height / (2.0 * std::tan(fov[1] / 2.0));
  K.cx = width / 2.0;
  K.cy = height / 2.0;
  K.validate();
  return K;
}

}  // namespace scalerecon::geom
