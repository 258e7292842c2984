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

#pragma once

// Conventions used throughout the project:
//  * Camera frame: x right, y down, z forward (pinhole, no distortion).
//  * Pixel (u, v) has its center at (u + 0.5, v + 0.5) in image coordinates.
//  * Poses are world-from-camera: x_world = R * x_cam + t.
//  * Quaternions are Hamilton (w, x, y, z), canonicalized to w >= 0.
//  * Field of view is in radians.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace scalerecon::geom {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Rot6D = Eigen::Matrix<double, 6, 1>;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  int width = 1;
  int height = 1;

  /// Throws GeometryError unless fx, fy > 0 and the principal point lies
  /// strictly inside the image.
  void validate() const;
  Mat3 matrix() const;
  bool operator==(const Intrinsics&) const = default;
};

struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  /// this * other: first apply `other`, then this.
  Pose compose(const Pose& other) const;
  Pose inverse() const;
  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  /// Throws GeometryError unless R^T R = I and det R = 1 within `tol`.
  void validate(double tol = 1e-9) const;
};

/// Camera parameter vector: rotation quaternion, translation, field of view.
struct CameraParam {
  Vec4 quat = Vec4(1, 0, 0, 0);
  Vec3 translation = Vec3::Zero();
  Vec2 fov = Vec2(1, 1);
};

// Rotations -----------------------------------------------------------------

/// Gram-Schmidt decode of the first two rotation columns; third column by
/// cross product. Each half may have any positive scale.
Mat3 rot6d_to_matrix(const Rot6D& r);
/// First two columns of R, stacked column-major. Rejects R more than 1e-6
/// away from SO(3).
Rot6D matrix_to_rot6d(const Mat3& R);
/// Normalizes q internally; rejects the zero quaternion.
Mat3 quat_to_matrix(const Vec4& q);
Vec4 matrix_to_quat(const Mat3& R);
/// Sign-flips q so that w >= 0 (ties broken on the first nonzero of x, y, z).
Vec4 canonicalize_quat(const Vec4& q);

// Camera model --------------------------------------------------------------

/// H x W x 3 unit ray directions, row-major with v (row) outermost.
std::vector<double> make_raymap(const Intrinsics& K);

/// Unnormalized ray with z = 1 through the center of pixel (u, v).
Vec3 pixel_ray(const Intrinsics& K, double u, double v);

/// Pixel-index coordinates (u, v) of a camera-frame point; inverse of
/// pixel_ray up to scale.
Vec2 project(const Intrinsics& K, const Vec3& x_cam);

struct PointMap {
  int width = 0;
  int height = 0;
  std::vector<double> xyz;       // H x W x 3
  std::vector<std::uint8_t> valid;  // H x W, 1 where depth > 0

  Vec3 at(int u, int v) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(v) * width + u);
    return {xyz[i], xyz[i + 1], xyz[i + 2]};
  }
};

/// Back-projects a z-depth map (H x W, meters, 0 = invalid). Rejects
/// negative depth.
PointMap unproject(std::span<const double> depth, const Intrinsics& K);

/// x_world = R x + t for every point (invalid entries are transformed too
/// but keep their flag).
PointMap transform_points(const PointMap& points, const Pose& pose);

/// Full field of view: 2 * atan(width / (2 fx)), 2 * atan(height / (2 fy)).
Vec2 fov_from_intrinsics(const Intrinsics& K);
/// Intrinsics with the principal point at the image center.
Intrinsics intrinsics_from_fov(const Vec2& fov, int width, int height);

}  // namespace scalerecon::geom
