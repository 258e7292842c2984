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

#include "scalerecon/common/random.hpp"
#include "scalerecon/geometry/geometry.hpp"
#include "test_support.hpp"

using namespace scalerecon;
using namespace scalerecon::geom;

TEST(Rot6D, IdentityDecodes) {
  Rot6D r;
  r << 1, 0, 0, 0, 1, 0;
  EXPECT_TRUE(rot6d_to_matrix(r).isApprox(Mat3::Identity(), 0.0));
  r << 2, 0, 0, 0, 3, 0;
  EXPECT_EQ(rot6d_to_matrix(r), Mat3::Identity());
}

TEST(Rot6D, EncodeTakesFirstTwoColumns) {
  Rot6D id;
  id << 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(matrix_to_rot6d(Mat3::Identity()), id);
  Mat3 rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;  // +90 degrees about z
  Rot6D expect;
  expect << 0, 1, 0, -1, 0, 0;
  EXPECT_EQ(matrix_to_rot6d(rz), expect);
}

TEST(Rot6D, RandomRoundTrip) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 R = testing_support::random_rotation(rng);
    const Mat3 back = rot6d_to_matrix(matrix_to_rot6d(R));
    EXPECT_LT((back - R).norm(), 1e-9);
  }
}

TEST(Rot6D, InvariantToPositiveScalingOfEachHalf) {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    Rot6D r;
    for (int k = 0; k < 6; ++k) r[k] = uniform(rng, -1.0, 1.0);
    const double s = std::exp(uniform(rng, -5.0, 5.0));
    const double u = std::exp(uniform(rng, -5.0, 5.0));
    Rot6D scaled = r;
    scaled.head<3>() *= s;
    scaled.tail<3>() *= u;
    EXPECT_LT((rot6d_to_matrix(scaled) - rot6d_to_matrix(r)).norm(), 1e-12);
  }
}

TEST(Rot6D, OutputIsARotation) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    Rot6D r;
    for (int k = 0; k < 6; ++k) r[k] = uniform(rng, -1.0, 1.0);
    EXPECT_NO_THROW(Pose({rot6d_to_matrix(r), Vec3::Zero()}).validate(1e-9));
  }
}

TEST(Rot6D, RejectsDegenerateInput) {
  Rot6D r;
  r << 1, 0, 0, 2, 0, 0;
  EXPECT_THROW(rot6d_to_matrix(r), GeometryError);
  r << 0, 0, 0, 0, 1, 0;
  EXPECT_THROW(rot6d_to_matrix(r), GeometryError);
  Mat3 skew = Mat3::Identity();
  skew(0, 1) = 1e-3;
  EXPECT_THROW(matrix_to_rot6d(skew), GeometryError);
}

TEST(Quat, IdentityAndDoubleCover) {
  EXPECT_TRUE(quat_to_matrix(Vec4(1, 0, 0, 0)).isApprox(Mat3::Identity()));
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    Vec4 q(normal(rng), normal(rng), normal(rng), normal(rng));
    EXPECT_LT((quat_to_matrix(q) - quat_to_matrix(-q)).norm(), 1e-15);
  }
  EXPECT_THROW(quat_to_matrix(Vec4::Zero()), GeometryError);
}

TEST(Quat, HamiltonConvention) {
  // 90 degrees about z: q = (cos 45, 0, 0, sin 45) maps x to y.
  const double h = std::sqrt(0.5);
  const Mat3 R = quat_to_matrix(Vec4(h, 0, 0, h));
  EXPECT_LT((R * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-15);
}

TEST(Quat, RandomRoundTripAndCanonicalSign) {
  Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 R = testing_support::random_rotation(rng);
    const Vec4 q = matrix_to_quat(R);
    EXPECT_GE(q[0], 0.0);
    EXPECT_NEAR(q.norm(), 1.0, 1e-12);
    EXPECT_LT((quat_to_matrix(q) - R).norm(), 1e-9);
  }
}

TEST(Raymap, PrincipalPixelLooksDownTheAxis) {
  Intrinsics K{4.0, 4.0, 2.5, 3.5, 8, 6};
  auto rays = make_raymap(K);
  const std::size_t i = 3 * (3 * 8 + 2);
  EXPECT_EQ(rays[i], 0.0);
  EXPECT_EQ(rays[i + 1], 0.0);
  EXPECT_EQ(rays[i + 2], 1.0);
  // pixel (cx + fx, cy): center u + 0.5 = 6.5
  const std::size_t j = 3 * (3 * 8 + 6);
  EXPECT_NEAR(rays[j], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(rays[j + 1], 0.0, 1e-15);
  EXPECT_NEAR(rays[j + 2], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Raymap, UnitNormAndSeparable) {
  Intrinsics K{20.0, 25.0, 15.2, 11.7, 32, 24};
  auto rays = make_raymap(K);
  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const std::size_t i = 3 * (static_cast<std::size_t>(v) * K.width + u);
      EXPECT_NEAR(std::sqrt(rays[i] * rays[i] + rays[i + 1] * rays[i + 1] + rays[i + 2] * rays[i + 2]), 1.0, 1e-12);
      // x/z depends on u only, y/z on v only.
      const std::size_t row0 = 3 * static_cast<std::size_t>(u);
      const std::size_t col0 = 3 * (static_cast<std::size_t>(v) * K.width);
      EXPECT_NEAR(rays[i] / rays[i + 2], rays[row0] / rays[row0 + 2], 1e-12);
      EXPECT_NEAR(rays[i + 1] / rays[i + 2], rays[col0 + 1] / rays[col0 + 2], 1e-12);
    }
  }
}

TEST(Unproject, PrincipalPixelAndInvalidFlag) {
  Intrinsics K{4.0, 4.0, 1.5, 1.5, 3, 3};
  std::vector<double> depth(9, 0.0);
  depth[4] = 2.0;
  auto pm = unproject(depth, K);
  EXPECT_EQ(pm.at(1, 1), Vec3(0, 0, 2));
  EXPECT_EQ(pm.valid[4], 1);
  EXPECT_EQ(pm.valid[0], 0);
  depth[0] = -1.0;
  EXPECT_THROW(unproject(depth, K), GeometryError);
}

TEST(Unproject, ProjectRecoversPixelCenters) {
  Rng rng(16);
  Intrinsics K{31.3, 29.1, 15.7, 16.4, 32, 32};
  std::vector<double> depth(32 * 32);
  for (auto& d : depth) d = uniform(rng, 0.1, 50.0);
  auto pm = unproject(depth, K);
  for (int v = 0; v < 32; ++v) {
    for (int u = 0; u < 32; ++u) {
      const Vec2 px = project(K, pm.at(u, v));
      EXPECT_NEAR(px.x(), u, 1e-9);
      EXPECT_NEAR(px.y(), v, 1e-9);
      EXPECT_EQ(pm.at(u, v).z(), depth[static_cast<std::size_t>(v) * 32 + u]);
    }
  }
}

TEST(Transform, IdentityTranslationAndComposition) {
  Rng rng(17);
  Intrinsics K{10, 10, 4, 4, 8, 8};
  std::vector<double> depth(64);
  for (auto& d : depth) d = uniform(rng, 0.5, 5.0);
  auto pm = unproject(depth, K);
  EXPECT_EQ(transform_points(pm, Pose::identity()).xyz, pm.xyz);

  Pose shift{Mat3::Identity(), Vec3(1, -2, 3)};
  auto moved = transform_points(pm, shift);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(moved.xyz[3 * i + 1], pm.xyz[3 * i + 1] - 2.0);

  Pose a{testing_support::random_rotation(rng), Vec3(0.3, 1.2, -0.7)};
  Pose b{testing_support::random_rotation(rng), Vec3(-2.0, 0.1, 0.4)};
  auto two_step = transform_points(transform_points(pm, b), a);
  auto one_step = transform_points(pm, a.compose(b));
  for (std::size_t i = 0; i < two_step.xyz.size(); ++i) {
    EXPECT_NEAR(two_step.xyz[i], one_step.xyz[i], 1e-12 * (1.0 + std::abs(one_step.xyz[i])));
  }
}

TEST(Fov, RightAngleAndRoundTrip) {
  Intrinsics K{32.0, 32.0, 32.0, 24.0, 64, 48};
  const Vec2 f = fov_from_intrinsics(K);
  EXPECT_NEAR(f.x(), M_PI / 2, 1e-15);
  auto back = intrinsics_from_fov(f, 64, 48);
  EXPECT_NEAR(back.fx, 32.0, 1e-12);
  EXPECT_NEAR(back.fy, 32.0, 1e-12);
  EXPECT_EQ(back.cx, 32.0);
  const Vec2 sixty(M_PI / 3, M_PI / 3);
  EXPECT_LT((fov_from_intrinsics(intrinsics_from_fov(sixty, 64, 64)) - sixty).norm(), 1e-14);
  EXPECT_THROW(intrinsics_from_fov(Vec2(0.0, 1.0), 8, 8), GeometryError);
  EXPECT_THROW(intrinsics_from_fov(Vec2(1.0, M_PI), 8, 8), GeometryError);
}

TEST(Intrinsics, Validation) {
  EXPECT_THROW((Intrinsics{-1, 1, 1, 1, 4, 4}).validate(), GeometryError);
  EXPECT_THROW((Intrinsics{1, 1, 0, 1, 4, 4}).validate(), GeometryError);
  EXPECT_THROW((Intrinsics{1, 1, 1, 4, 4, 4}).validate(), GeometryError);
  EXPECT_NO_THROW((Intrinsics{1, 1, 2, 2, 4, 4}).validate());
}
