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

// Ray-cast synthetic scenes: a bounded ground plane with boxes and spheres,
// seen by cameras orbiting the scene. Depth is exact z-depth.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalerecon/autodiff/tensor.hpp"
#include "scalerecon/geometry/geometry.hpp"

namespace scalerecon::synth {

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scene or manifest file.
class SceneFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int frames = 4;
  int image_size = 64;
  double fov_min_deg = 50.0;  // horizontal field of view range
  double fov_max_deg = 70.0;
  int boxes = 3;
  int spheres = 2;
  double orbit_radius_min = 4.0;  // meters
  double orbit_radius_max = 7.0;
  double orbit_step_deg = 20.0;  // mean azimuth step between consecutive frames
  double look_at_jitter = 0.4;   // meters
  double ground_half_extent = 8.0;
  double checker_size = 0.25;  // meters; fixed metric texture period
  double world_scale = 1.0;    // multiplies every length in the scene
  bool metric = true;

  void validate() const;
  bool operator==(const SceneSpec&) const = default;
};

void to_json(nlohmann::json& j, const SceneSpec& s);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, SceneSpec& s);

struct Material {
  geom::Vec3 color_a = geom::Vec3::Constant(0.8);
  geom::Vec3 color_b = geom::Vec3::Constant(0.2);
};

struct Box {
  geom::Vec3 lo, hi;
  Material material;
};

struct Sphere {
  geom::Vec3 center;
  double radius = 1.0;
  Material material;
};

struct SceneGeometry {
  double ground_half_extent = 8.0;
  Material ground;
  std::vector<Box> boxes;
  std::vector<Sphere> spheres;
  double checker_size = 0.25;
  geom::Vec3 light_dir = geom::Vec3(0.4, 0.3, 0.85).normalized();
};

struct Hit {
  bool hit = false;
  double t = 0.0;  // ray parameter; z-depth when the ray has unit camera z
  geom::Vec3 point;
  geom::Vec3 normal;
  geom::Vec3 albedo;
};

/// Nearest intersection with t > 1e-9 along origin + t * dir.
Hit intersect(const SceneGeometry& scene, const geom::Vec3& origin, const geom::Vec3& dir);

/// Whether a point lies inside (or within `margin` of) a primitive or below
/// the ground.
bool inside_geometry(const SceneGeometry& scene, const geom::Vec3& p, double margin);

/// Casts the ray through continuous pixel position (u, v) (pixel centers at
/// integer + 0.5 offsets are u, v integers) of a world-from-camera pose.
Hit cast_pixel(const SceneGeometry& scene, const geom::Intrinsics& K, const geom::Pose& pose, double u, double v);

struct RenderedFrame {
  std::vector<double> image;  // [3, H, W] in [0, 1]
  std::vector<double> depth;  // [H, W], 0 = no hit
};

RenderedFrame render_frame(const SceneGeometry& scene, const geom::Intrinsics& K, const geom::Pose& pose);

/// One scene as stored on disk.
struct SceneSample {
  int width = 0;
  int height = 0;
  int frames = 0;
  std::vector<float> images;  // [N, 3, H, W]
  std::vector<float> depths;  // [N, H, W], meters (or normalized units when not metric)
  geom::Intrinsics intrinsics;
  std::vector<geom::Pose> poses;  // world-from-camera, frame 0 = identity
  bool metric = true;
  std::optional<double> scale;  // cached scale target; absent for non-metric scenes
  std::uint64_t seed = 0;

  std::vector<double> depths_f64() const;
  std::vector<geom::Intrinsics> intrinsics_per_frame() const { return std::vector<geom::Intrinsics>(frames, intrinsics); }
  /// [N, 3, H, W] constant tensor.
  ad::Tensor images_tensor() const;
  bool operator==(const SceneSample&) const;
};

/// A generated scene with the world description kept for oracles.
struct GeneratedScene {
  SceneSample sample;
  SceneGeometry geometry;
  std::vector<geom::Pose> world_poses;  // world-from-camera before anchoring
};

/// Non-metric specs come back pre-normalized (see normalize_scene).
GeneratedScene generate_scene_with_geometry(const SceneSpec& spec);
SceneSample generate_scene(const SceneSpec& spec);

/// Divides depths and translations by the scene's own scale target and
/// drops the scale, as for data of unknown metric scale.
void normalize_scene(SceneSample& sample);

inline constexpr std::uint32_t kSceneFormatVersion = 1;

std::vector<std::uint8_t> encode_scene(const SceneSample& sample);
SceneSample decode_scene(const std::vector<std::uint8_t>& bytes);
void write_scene(const SceneSample& sample, const std::filesystem::path& path);
SceneSample read_scene(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  std::string split;  // "train" or "val"
  bool metric = true;
  std::uint64_t seed = 0;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> scenes;

  std::vector<ManifestEntry> split(const std::string& name) const;
  bool operator==(const Manifest&) const = default;
};

void to_json(nlohmann::json& j, const Manifest& m);
void from_json(const nlohmann::json& j, Manifest& m);

/// Generates every scene, assigns splits by a seeded shuffle and writes
/// `dir/manifest.json` plus one file per scene, generating on up to `jobs`
/// threads. The output does not depend on `jobs`.
Manifest make_dataset(const std::vector<SceneSpec>& specs, double train_ratio, double val_ratio, std::uint64_t seed,
                      const std::filesystem::path& dir, std::size_t jobs = 1);

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// Portable Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace scalerecon::synth
