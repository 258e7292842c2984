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

#include "scalerecon/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "scalerecon/common/binary_io.hpp"
#include "scalerecon/common/parallel.hpp"
#include "scalerecon/common/random.hpp"
#include "scalerecon/supervision/scale_target.hpp"

namespace scalerecon::synth {

using geom::Mat3;
using geom::Pose;
using geom::Vec3;
using json = nlohmann::json;

// Spec ----------------------------------------------------------------------

void SceneSpec::validate() const {
  auto fail = [](const std::string& msg) { throw SynthError("scene spec: " + msg); };
  if (frames < 1) fail("frames must be at least 1");
  if (image_size < 1) fail("image_size must be positive");
  if (!(fov_min_deg > 0.0) || !(fov_max_deg >= fov_min_deg) || !(fov_max_deg < 180.0)) {
    fail("fov range must satisfy 0 < min <= max < 180 degrees");
  }
  if (boxes < 0 || spheres < 0) fail("primitive counts must be nonnegative");
  if (!(orbit_radius_min > 0.0) || !(orbit_radius_max >= orbit_radius_min)) fail("bad orbit radius range");
  if (!(look_at_jitter >= 0.0)) fail("look_at_jitter must be nonnegative");
  if (!std::isfinite(orbit_step_deg)) fail("orbit_step_deg must be finite");
  if (!(ground_half_extent > 0.0)) fail("ground_half_extent must be positive");
  if (!(checker_size > 0.0)) fail("checker_size must be positive");
  if (!(world_scale > 0.0) || !std::isfinite(world_scale)) fail("world_scale must be positive");
}

void to_json(json& j, const SceneSpec& s) {
  j = json{
      {"seed", s.seed},
      {"frames", s.frames},
      {"image_size", s.image_size},
      {"fov_min_deg", s.fov_min_deg},
      {"fov_max_deg", s.fov_max_deg},
      {"boxes", s.boxes},
      {"spheres", s.spheres},
      {"orbit_radius_min", s.orbit_radius_min},
      {"orbit_radius_max", s.orbit_radius_max},
      {"orbit_step_deg", s.orbit_step_deg},
      {"look_at_jitter", s.look_at_jitter},
      {"ground_half_extent", s.ground_half_extent},
      {"checker_size", s.checker_size},
      {"world_scale", s.world_scale},
      {"metric", s.metric},
  };
}

void from_json(const json& j, SceneSpec& s) {
  if (!j.is_object()) throw SynthError("scene spec: expected a JSON object");
  json defaults;
  to_json(defaults, SceneSpec{});
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw SynthError("scene spec: unknown key \"" + key + "\"");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("seed", s.seed);
    get("frames", s.frames);
    get("image_size", s.image_size);
    get("fov_min_deg", s.fov_min_deg);
    get("fov_max_deg", s.fov_max_deg);
    get("boxes", s.boxes);
    get("spheres", s.spheres);
    get("orbit_radius_min", s.orbit_radius_min);
    get("orbit_radius_max", s.orbit_radius_max);
    get("orbit_step_deg", s.orbit_step_deg);
    get("look_at_jitter", s.look_at_jitter);
    get("ground_half_extent", s.ground_half_extent);
    get("checker_size", s.checker_size);
    get("world_scale", s.world_scale);
    get("metric", s.metric);
  } catch (const json::exception& e) {
    throw SynthError(std::string("scene spec: ") + e.what());
  }
}

// Ray casting ---------------------------------------------------------------

namespace {

constexpr double kMinT = 1e-9;
constexpr double kAmbient = 0.25;

Vec3 checker(const Material& m, double size, const Vec3& p) {
  const auto cell = [&](double x) { return static_cast<long long>(std::floor(x / size)); };
  const long long parity = cell(p.x()) + cell(p.y()) + cell(p.z());
  return (parity & 1) ? m.color_b : m.color_a;
}

void consider(Hit& best, double t, const Vec3& origin, const Vec3& dir, const Vec3& normal, const Material& m,
              double checker_size) {
  if (!(t > kMinT) || (best.hit && t >= best.t)) return;
  best.hit = true;
  best.t = t;
  best.point = origin + t * dir;
  best.normal = normal;
  best.albedo = checker(m, checker_size, best.point);
}

}  // namespace

Hit intersect(const SceneGeometry& scene, const Vec3& o, const Vec3& d) {
  Hit best;
  if (d.z() != 0.0) {
    const double t = -o.z() / d.z();
    const Vec3 p = o + t * d;
    if (std::abs(p.x()) <= scene.ground_half_extent && std::abs(p.y()) <= scene.ground_half_extent) {
      consider(best, t, o, d, Vec3::UnitZ(), scene.ground, scene.checker_size);
    }
  }
  for (const Box& b : scene.boxes) {
    double tnear = -std::numeric_limits<double>::infinity();
    double tfar = std::numeric_limits<double>::infinity();
    int axis = -1;
    bool miss = false;
    for (int k = 0; k < 3 && !miss; ++k) {
      if (d[k] == 0.0) {
        miss = o[k] < b.lo[k] || o[k] > b.hi[k];
        continue;
      }
      double t0 = (b.lo[k] - o[k]) / d[k];
      double t1 = (b.hi[k] - o[k]) / d[k];
      if (t0 > t1) std::swap(t0, t1);
      if (t0 > tnear) {
        tnear = t0;
        axis = k;
      }
      tfar = std::min(tfar, t1);
      miss = tnear > tfar;
    }
    if (miss || axis < 0) continue;
    Vec3 n = Vec3::Zero();
    n[axis] = d[axis] > 0.0 ? -1.0 : 1.0;
    consider(best, tnear, o, d, n, b.material, scene.checker_size);
  }
  for (const Sphere& s : scene.spheres) {
    const Vec3 oc = o - s.center;
    const double a = d.squaredNorm();
    const double half_b = oc.dot(d);
    const double c = oc.squaredNorm() - s.radius * s.radius;
    const double disc = half_b * half_b - a * c;
    if (disc < 0.0) continue;
    const double t = (-half_b - std::sqrt(disc)) / a;
    consider(best, t, o, d, (o + t * d - s.center) / s.radius, s.material, scene.checker_size);
  }
  return best;
}

bool inside_geometry(const SceneGeometry& scene, const Vec3& p, double margin) {
  if (p.z() < margin) return true;
  for (const Box& b : scene.boxes) {
    if ((p.array() > b.lo.array() - margin).all() && (p.array() < b.hi.array() + margin).all()) return true;
  }
  for (const Sphere& s : scene.spheres) {
    if ((p - s.center).norm() < s.radius + margin) return true;
  }
  return false;
}

Hit cast_pixel(const SceneGeometry& scene, const geom::Intrinsics& K, const Pose& pose, double u, double v) {
  // The camera-frame ray has z = 1, so the hit parameter is the z-depth.
  return intersect(scene, pose.translation, pose.rotation * geom::pixel_ray(K, u, v));
}

RenderedFrame render_frame(const SceneGeometry& scene, const geom::Intrinsics& K, const Pose& pose) {
  const std::size_t W = K.width, H = K.height, px = W * H;
  RenderedFrame out;
  out.image.assign(3 * px, 0.0);
  out.depth.assign(px, 0.0);
  for (std::size_t v = 0; v < H; ++v) {
    for (std::size_t u = 0; u < W; ++u) {
      const Vec3 dir = pose.rotation * geom::pixel_ray(K, static_cast<double>(u), static_cast<double>(v));
      const Hit h = intersect(scene, pose.translation, dir);
      const std::size_t i = v * W + u;
      Vec3 color;
      if (h.hit) {
        out.depth[i] = h.t;
        Vec3 n = h.normal;
        if (n.dot(dir) > 0.0) n = -n;
        const double lambert = std::max(0.0, n.dot(scene.light_dir));
        color = h.albedo * (kAmbient + (1.0 - kAmbient) * lambert);
      } else {
        const double up = std::clamp(dir.normalized().z(), 0.0, 1.0);
        color = Vec3(0.55, 0.7, 0.9) * (1.0 - up) + Vec3(0.25, 0.4, 0.8) * up;
      }
      for (int c = 0; c < 3; ++c) out.image[c * px + i] = std::clamp(color[c], 0.0, 1.0);
    }
  }
  return out;
}

// Samples -------------------------------------------------------------------

std::vector<double> SceneSample::depths_f64() const { return {depths.begin(), depths.end()}; }

ad::Tensor SceneSample::images_tensor() const {
  return ad::Tensor::from({static_cast<std::size_t>(frames), 3, static_cast<std::size_t>(height),
                           static_cast<std::size_t>(width)},
                          std::vector<double>(images.begin(), images.end()));
}

bool SceneSample::operator==(const SceneSample& o) const {
  if (width != o.width || height != o.height || frames != o.frames || metric != o.metric || scale != o.scale ||
      seed != o.seed || !(intrinsics == o.intrinsics) || images != o.images || depths != o.depths ||
      poses.size() != o.poses.size()) {
    return false;
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (poses[i].rotation != o.poses[i].rotation || poses[i].translation != o.poses[i].translation) return false;
  }
  return true;
}

namespace {

Vec3 random_color(Rng& rng) { return {uniform(rng, 0.15, 0.95), uniform(rng, 0.15, 0.95), uniform(rng, 0.15, 0.95)}; }

Material random_material(Rng& rng) {
  Material m;
  m.color_a = random_color(rng);
  m.color_b = m.color_a * uniform(rng, 0.3, 0.6);
  return m;
}

SceneGeometry random_geometry(const SceneSpec& s, Rng& rng) {
  const double w = s.world_scale;
  SceneGeometry g;
  g.ground_half_extent = s.ground_half_extent * w;
  g.checker_size = s.checker_size * w;
  g.ground = random_material(rng);
  const double spread = 2.5 * w;
  for (int i = 0; i < s.boxes; ++i) {
    Box b;
    const Vec3 center(uniform(rng, -spread, spread), uniform(rng, -spread, spread), 0.0);
    const Vec3 half(uniform(rng, 0.25, 0.75) * w, uniform(rng, 0.25, 0.75) * w, 0.0);
    const double height = uniform(rng, 0.5, 2.0) * w;
    b.lo = Vec3(center.x() - half.x(), center.y() - half.y(), 0.0);
    b.hi = Vec3(center.x() + half.x(), center.y() + half.y(), height);
    b.material = random_material(rng);
    g.boxes.push_back(b);
  }
  for (int i = 0; i < s.spheres; ++i) {
    Sphere sp;
    sp.radius = uniform(rng, 0.3, 0.9) * w;
    sp.center = Vec3(uniform(rng, -spread, spread), uniform(rng, -spread, spread),
                     sp.radius + uniform(rng, 0.0, 0.5) * w);
    sp.material = random_material(rng);
    g.spheres.push_back(sp);
  }
  return g;
}

// World-from-camera pose looking from `eye` at `target` with world +z up:
// columns are the camera's right, down and forward axes.
Pose look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  const Vec3 right = forward.cross(Vec3::UnitZ()).normalized();
  const Vec3 down = forward.cross(right);
  Pose p;
  p.rotation.col(0) = right;
  p.rotation.col(1) = down;
  p.rotation.col(2) = forward;
  p.translation = eye;
  return p;
}

constexpr int kPlacementRetries = 64;

}  // namespace

GeneratedScene generate_scene_with_geometry(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const double w = spec.world_scale;
  const double fov = uniform(rng, spec.fov_min_deg, spec.fov_max_deg) * M_PI / 180.0;

  GeneratedScene out;
  out.geometry = random_geometry(spec, rng);
  SceneSample& s = out.sample;
  s.width = s.height = spec.image_size;
  s.frames = spec.frames;
  s.seed = spec.seed;
  s.intrinsics = geom::intrinsics_from_fov(geom::Vec2(fov, fov), spec.image_size, spec.image_size);

  const double base_azimuth = uniform(rng, 0.0, 2.0 * M_PI);
  const double step = spec.orbit_step_deg * M_PI / 180.0;
  for (int f = 0; f < spec.frames; ++f) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      const double azimuth = base_azimuth + step * (f + uniform(rng, -0.5, 0.5));
      const double radius = uniform(rng, spec.orbit_radius_min, spec.orbit_radius_max) * w;
      const double height = uniform(rng, 1.5, 3.5) * w;
      const Vec3 eye(radius * std::cos(azimuth), radius * std::sin(azimuth), height);
      const Vec3 target(uniform(rng, -1.0, 1.0) * spec.look_at_jitter * w,
                        uniform(rng, -1.0, 1.0) * spec.look_at_jitter * w, 0.5 * w);
      if (inside_geometry(out.geometry, eye, 0.1 * w)) continue;
      out.world_poses.push_back(look_at(eye, target));
      placed = true;
    }
    if (!placed) {
      throw SynthError("scene " + std::to_string(spec.seed) + ": no camera placement outside the geometry after " +
                       std::to_string(kPlacementRetries) + " attempts");
    }
  }

  const std::size_t px = static_cast<std::size_t>(s.width) * s.height;
  s.images.resize(spec.frames * 3 * px);
  s.depths.resize(spec.frames * px);
  const Pose anchor_inv = out.world_poses[0].inverse();
  for (int f = 0; f < spec.frames; ++f) {
    const RenderedFrame r = render_frame(out.geometry, s.intrinsics, out.world_poses[f]);
    std::transform(r.image.begin(), r.image.end(), s.images.begin() + f * 3 * px,
                   [](double x) { return static_cast<float>(x); });
    std::transform(r.depth.begin(), r.depth.end(), s.depths.begin() + f * px,
                   [](double x) { return static_cast<float>(x); });
    s.poses.push_back(f == 0 ? Pose::identity() : anchor_inv.compose(out.world_poses[f]));
  }
  if (std::none_of(s.depths.begin(), s.depths.end(), [](float d) { return d > 0.0f; })) {
    throw SynthError("scene " + std::to_string(spec.seed) + ": no surface visible");
  }

  s.metric = spec.metric;
  const auto target = sup::compute_scale_target(s.depths_f64(), s.intrinsics_per_frame(), s.poses);
  s.scale = target.scale;
  if (!spec.metric) normalize_scene(s);
  return out;
}

SceneSample generate_scene(const SceneSpec& spec) { return generate_scene_with_geometry(spec).sample; }

void normalize_scene(SceneSample& s) {
  const std::vector<double> depth = s.depths_f64();
  const auto intrinsics = s.intrinsics_per_frame();
  double divisor = sup::compute_scale_target(depth, intrinsics, s.poses).scale;

  // Rounding the divided depths to f32 shifts the stored scene's own scale
  // target by up to a few 1e-9 (ground depth is constant along image rows,
  // so the rounding errors do not average out). Bisecting the divisor
  // against the stored values brings it back to 1.
  std::vector<float> best_depths;
  std::vector<Pose> best_poses;
  double best_error = std::numeric_limits<double>::infinity();
  double lo = divisor * (1.0 - 1e-6), hi = divisor * (1.0 + 1e-6);
  for (int iter = 0; iter < 60 && best_error > 1e-12; ++iter) {
    std::vector<float> d32(depth.size());
    std::transform(depth.begin(), depth.end(), d32.begin(), [&](double d) { return static_cast<float>(d / divisor); });
    std::vector<Pose> poses = s.poses;
    for (Pose& p : poses) p.translation /= divisor;
    const double rescaled =
        sup::compute_scale_target(std::vector<double>(d32.begin(), d32.end()), intrinsics, poses).scale;
    if (std::abs(rescaled - 1.0) < best_error) {
      best_error = std::abs(rescaled - 1.0);
      best_depths = std::move(d32);
      best_poses = std::move(poses);
    }
    (rescaled > 1.0 ? lo : hi) = divisor;
    divisor = 0.5 * (lo + hi);
  }
  s.depths = std::move(best_depths);
  s.poses = std::move(best_poses);
  s.scale.reset();
  s.metric = false;
}

// Scene files ---------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'U', 'S', 'C', 'N'};

using Reader = io::BasicByteReader<SceneFormatError>;

json scene_header(const SceneSample& s) {
  json poses = json::array();
  for (const Pose& p : s.poses) {
    json r = json::array();
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) r.push_back(p.rotation(i, k));
    }
    poses.push_back({{"rotation", r}, {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}}});
  }
  const geom::Intrinsics& K = s.intrinsics;
  return json{
      {"width", s.width},
      {"height", s.height},
      {"frames", s.frames},
      {"intrinsics", {{"fx", K.fx}, {"fy", K.fy}, {"cx", K.cx}, {"cy", K.cy}}},
      {"poses", poses},
      {"pose_convention", "world_from_camera, rotation row-major"},
      {"metric", s.metric},
      {"scale", s.scale ? json(*s.scale) : json(nullptr)},
      {"seed", s.seed},
      {"depth", "z"},
      {"payload", "little-endian f32 images [frames,3,height,width] then depths [frames,height,width]"},
  };
}

void parse_header(const json& h, SceneSample& s) {
  s.width = h.at("width").get<int>();
  s.height = h.at("height").get<int>();
  s.frames = h.at("frames").get<int>();
  if (s.width < 1 || s.height < 1 || s.frames < 1) throw SceneFormatError("scene file: bad extents");
  const json& k = h.at("intrinsics");
  s.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(), k.at("cx").get<double>(),
                  k.at("cy").get<double>(), s.width, s.height};
  const json& poses = h.at("poses");
  if (!poses.is_array() || poses.size() != static_cast<std::size_t>(s.frames)) {
    throw SceneFormatError("scene file: expected one pose per frame");
  }
  for (const json& p : poses) {
    const auto r = p.at("rotation").get<std::vector<double>>();
    const auto t = p.at("translation").get<std::vector<double>>();
    if (r.size() != 9 || t.size() != 3) throw SceneFormatError("scene file: malformed pose");
    Pose pose;
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 3; ++c) pose.rotation(i, c) = r[3 * i + c];
      pose.translation[i] = t[i];
    }
    s.poses.push_back(pose);
  }
  if (h.at("depth").get<std::string>() != "z") throw SceneFormatError("scene file: only z-depth is supported");
  s.metric = h.at("metric").get<bool>();
  if (!h.at("scale").is_null()) s.scale = h.at("scale").get<double>();
  s.seed = h.at("seed").get<std::uint64_t>();
}

}  // namespace

std::vector<std::uint8_t> encode_scene(const SceneSample& s) {
  const std::size_t px = static_cast<std::size_t>(s.width) * s.height;
  if (s.images.size() != s.frames * 3 * px || s.depths.size() != s.frames * px ||
      s.poses.size() != static_cast<std::size_t>(s.frames)) {
    throw SynthError("encode_scene: buffer sizes do not match the declared extents");
  }
  const std::string header = scene_header(s).dump();
  io::ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kSceneFormatVersion);
  w.u32(static_cast<std::uint32_t>(header.size()));
  w.bytes(header.data(), header.size());
  for (float x : s.images) w.f32(x);
  for (float x : s.depths) w.f32(x);
  return std::move(w).take();
}

SceneSample decode_scene(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes, "scene file");
  if (r.string(4) != std::string(kMagic, 4)) throw SceneFormatError("scene file: bad magic (expected USCN)");
  const std::uint32_t version = r.u32();
  if (version != kSceneFormatVersion) {
    throw SceneFormatError("scene file: unsupported version " + std::to_string(version));
  }
  const std::uint32_t header_len = r.u32();
  SceneSample s;
  try {
    parse_header(json::parse(r.string(header_len)), s);
  } catch (const json::exception& e) {
    throw SceneFormatError(std::string("scene file: bad header: ") + e.what());
  }
  const std::size_t px = static_cast<std::size_t>(s.width) * s.height;
  const std::size_t n_images = s.frames * 3 * px, n_depths = s.frames * px;
  if (r.remaining() != 4 * (n_images + n_depths)) {
    throw SceneFormatError("scene file: payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                           std::to_string(4 * (n_images + n_depths)));
  }
  s.images.resize(n_images);
  for (float& x : s.images) x = r.f32();
  s.depths.resize(n_depths);
  for (float& x : s.depths) x = r.f32();
  return s;
}

void write_scene(const SceneSample& s, const std::filesystem::path& path) { io::write_file(path, encode_scene(s)); }

SceneSample read_scene(const std::filesystem::path& path) { return decode_scene(io::read_file(path)); }

// Datasets ------------------------------------------------------------------

std::vector<ManifestEntry> Manifest::split(const std::string& name) const {
  std::vector<ManifestEntry> out;
  std::copy_if(scenes.begin(), scenes.end(), std::back_inserter(out),
               [&](const ManifestEntry& e) { return e.split == name; });
  return out;
}

void to_json(json& j, const Manifest& m) {
  json scenes = json::array();
  for (const auto& e : m.scenes) {
    scenes.push_back({{"path", e.path}, {"split", e.split}, {"metric", e.metric}, {"seed", e.seed}});
  }
  j = json{{"version", 1}, {"seed", m.seed}, {"scenes", scenes}};
}

void from_json(const json& j, Manifest& m) {
  try {
    if (j.at("version").get<int>() != 1) throw SceneFormatError("manifest: unsupported version");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.scenes.clear();
    for (const json& e : j.at("scenes")) {
      ManifestEntry entry{e.at("path").get<std::string>(), e.at("split").get<std::string>(),
                          e.at("metric").get<bool>(), e.at("seed").get<std::uint64_t>()};
      if (entry.split != "train" && entry.split != "val") {
        throw SceneFormatError("manifest: unknown split \"" + entry.split + "\"");
      }
      m.scenes.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw SceneFormatError(std::string("manifest: ") + e.what());
  }
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[uniform_index(rng, i)]);
  return p;
}

Manifest make_dataset(const std::vector<SceneSpec>& specs, double train_ratio, double val_ratio, std::uint64_t seed,
                      const std::filesystem::path& dir, std::size_t jobs) {
  if (specs.empty()) throw SynthError("make_dataset: empty spec list");
  if (train_ratio < 0.0 || val_ratio < 0.0 || std::abs(train_ratio + val_ratio - 1.0) > 1e-9) {
    throw SynthError("make_dataset: split ratios must be nonnegative and sum to 1");
  }
  std::filesystem::create_directories(dir);
  const std::size_t n = specs.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(n)));
  std::vector<std::string> split(n, "val");
  const auto order = seeded_permutation(n, seed);
  for (std::size_t i = 0; i < n_train; ++i) split[order[i]] = "train";

  Manifest m;
  m.seed = seed;
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04zu.uscn", i);
    names[i] = name;
    m.scenes.push_back({name, split[i], specs[i].metric, specs[i].seed});
  }
  parallel_for(n, jobs, [&](std::size_t i) { write_scene(generate_scene(specs[i]), dir / names[i]); });
  write_manifest(m, dir / "manifest.json");
  return m;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  const std::string text = json(m).dump(2) + "\n";
  io::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

Manifest read_manifest(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end()).get<Manifest>();
  } catch (const json::parse_error& e) {
    throw SceneFormatError(std::string("manifest: ") + e.what());
  }
}

}  // namespace scalerecon::synth
