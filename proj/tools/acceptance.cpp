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

// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,2,...] [--out DIR] [--data-dir DIR]
//
// Exit status is 0 when every selected criterion passes.

#include <CLI11.hpp>

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "scalerecon/autodiff/op_suite.hpp"
#include "scalerecon/cli/commands.hpp"
#include "scalerecon/common/binary_io.hpp"
#include "scalerecon/eval/ablation.hpp"
#include "scalerecon/eval/metrics.hpp"
#include "scalerecon/geometry/geometry.hpp"
#include "scalerecon/supervision/losses.hpp"
#include "scalerecon/supervision/scale_target.hpp"
#include "scalerecon/train/model_check.hpp"
#include "scalerecon/train/trainer.hpp"

namespace {

using namespace scalerecon;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Context {
  fs::path out;
  fs::path data;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

synth::SceneSample scene(std::uint64_t seed, int size = 64, int frames = 4, bool metric = true) {
  synth::SceneSpec s;
  s.seed = seed;
  s.image_size = size;
  s.frames = frames;
  s.metric = metric;
  return synth::generate_scene(s);
}

std::vector<eval::NamedScene> named(const std::vector<synth::SceneSample>& scenes, const std::string& prefix) {
  std::vector<eval::NamedScene> out;
  for (std::size_t i = 0; i < scenes.size(); ++i) out.push_back({fmt("%s_%02zu", prefix.c_str(), i), scenes[i]});
  return out;
}

// 1 -------------------------------------------------------------------------
Outcome gradient_suite(const Context&) {
  const auto t0 = Clock::now();
  Outcome o;
  double worst_op = 0.0;
  std::string failed;
  for (const auto& r : ad::check_all_ops(20260101, 20)) {
    worst_op = std::max(worst_op, r.worst_error);
    if (!r.passed || !(r.worst_error < 1e-5)) failed += std::string(ad::op_name(r.kind)) + " ";
  }
  const train::ModelCheckReport m = train::check_model_gradients(100, 20260101, 1e-4);
  const double t = seconds_since(t0);
  o.passed = failed.empty() && m.passed && m.checked + m.excluded == 100 && m.worst_error < 1e-4 && t < 120.0;
  o.detail = fmt("%zu op kinds, worst %.2e (< 1e-5)%s; model %zu coordinates checked, %zu excluded, worst %.2e (< 1e-4); "
                 "%.1f s (< 120 s)",
                 ad::all_op_kinds().size(), worst_op, failed.empty() ? "" : (", failing: " + failed).c_str(),
                 m.checked, m.excluded, m.worst_error, t);
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome rotation_suite(const Context&) {
  Rng rng(2026);
  double worst_6d = 0.0, worst_q = 0.0, worst_scale = 0.0;
  for (int i = 0; i < 1000; ++i) {
    // Axis-angle sampling, independent of the codecs under test.
    Eigen::Vector3d axis(normal(rng), normal(rng), normal(rng));
    const geom::Mat3 R = Eigen::AngleAxisd(uniform(rng, 0.0, M_PI), axis.normalized()).toRotationMatrix();
    worst_6d = std::max(worst_6d, (geom::rot6d_to_matrix(geom::matrix_to_rot6d(R)) - R).norm());
    worst_q = std::max(worst_q, (geom::quat_to_matrix(geom::matrix_to_quat(R)) - R).norm());
    geom::Rot6D r;
    for (int k = 0; k < 6; ++k) r[k] = uniform(rng, -1.0, 1.0);
    geom::Rot6D scaled = r;
    scaled.head<3>() *= std::exp(uniform(rng, -5.0, 5.0));
    scaled.tail<3>() *= std::exp(uniform(rng, -5.0, 5.0));
    worst_scale = std::max(worst_scale, (geom::rot6d_to_matrix(scaled) - geom::rot6d_to_matrix(r)).norm());
  }
  Outcome o;
  o.passed = worst_6d < 1e-9 && worst_q < 1e-9 && worst_scale < 1e-9;
  o.detail = fmt("1000 rotations: 6D round trip %.2e, quaternion round trip %.2e, half-scaling drift %.2e (all < 1e-9)",
                 worst_6d, worst_q, worst_scale);
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome scale_target_suite(const Context&) {
  double worst_norm = 0.0, worst_homog = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    synth::SceneSpec spec;
    spec.seed = 5000 + seed;
    spec.metric = seed % 4 != 3;
    spec.world_scale = seed % 3 == 0 ? 0.5 : (seed % 3 == 1 ? 1.0 : 4.0);
    const synth::SceneSample s = synth::generate_scene(spec);
    const auto depth = s.depths_f64();
    const auto K = s.intrinsics_per_frame();
    const sup::ScaleTarget t = sup::compute_scale_target(depth, K, s.poses);
    double total = 0.0, count = 0.0;
    for (std::size_t i = 0; i < t.valid.size(); ++i) {
      if (!t.valid[i]) continue;
      total += std::sqrt(t.points[3 * i] * t.points[3 * i] + t.points[3 * i + 1] * t.points[3 * i + 1] +
                         t.points[3 * i + 2] * t.points[3 * i + 2]);
      count += 1.0;
    }
    worst_norm = std::max(worst_norm, std::abs(total / count - 1.0));
    if (seed >= 8) continue;
    for (double c : {0.1, 3.0, 100.0}) {
      std::vector<double> d = depth;
      for (double& x : d) x *= c;
      auto poses = s.poses;
      for (auto& p : poses) p.translation *= c;
      const double sc = sup::compute_scale_target(d, K, poses).scale;
      worst_homog = std::max(worst_homog, std::abs(sc / (c * t.scale) - 1.0));
    }
  }
  Outcome o;
  o.passed = worst_norm <= 1e-6 && worst_homog <= 1e-9;
  o.detail = fmt("40 generated scenes: |mean norm - 1| worst %.2e (<= 1e-6); homogeneity c in {0.1, 3, 100} worst "
                 "relative %.2e (<= 1e-9)",
                 worst_norm, worst_homog);
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome scale_head_suite(const Context&) {
  Outcome o;
  model::UniScaleModel fresh(train::micro_model_config());
  Rng rng(44);
  std::vector<double> img(3 * 3 * 16 * 16);
  for (double& v : img) v = uniform01(rng);
  const double s0 = fresh.forward(ad::Tensor::from({3, 3, 16, 16}, img)).scale.item();

  model::UniScaleModel m(train::micro_model_config());
  for (auto& e : m.params().entries()) {
    for (double& v : e.tensor.mutable_data()) v += 0.3 * normal(rng);
  }
  const std::size_t P = 16, C = 16;
  auto random_tensor = [&](ad::Shape shape) {
    std::vector<double> v(ad::numel_of(shape));
    for (double& x : v) x = uniform(rng, -2.0, 2.0);
    return ad::Tensor::from(std::move(shape), std::move(v));
  };
  double worst_sum = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ad::Tensor w = m.pool_weights(random_tensor({3, P, C}));
    for (std::size_t f = 0; f < 3; ++f) {
      double s = 0.0;
      for (std::size_t k = 0; k < P; ++k) s += w.at(f * P + k);
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
  }
  model::AggregatedTokens agg{random_tensor({2, 1, C}), random_tensor({2, P, C})};
  const ad::Tensor cls = random_tensor({2, 1, C});
  const double s = m.scale_head(agg, cls).item();
  model::AggregatedTokens twice{ad::concat({agg.camera, agg.camera}, 0), ad::concat({agg.patches, agg.patches}, 0)};
  const double s2 = m.scale_head(twice, ad::concat({cls, cls}, 0)).item();
  const double dup = std::abs(s2 / s - 1.0);
  o.passed = s0 == 1.0 && worst_sum <= 1e-12 && dup <= 1e-12;
  o.detail = fmt("zero-initialized S = %.17g (exactly 1 required); pool weight sums worst |sum - 1| %.2e (<= 1e-12); "
                 "frame duplication drift %.2e (<= 1e-12)",
                 s0, worst_sum, dup);
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome masking_suite(const Context&) {
  auto grad_mass = [](bool supervise, bool metric) {
    model::UniScaleModel m(train::micro_model_config());
    Rng rng(55);
    for (auto& e : m.params().entries()) {
      for (double& v : e.tensor.mutable_data()) v += 0.05 * normal(rng);
    }
    const synth::SceneSample s = scene(77, 16, 2, metric);
    const train::TrainExample ex = train::make_example(s);
    m.params().zero_grad();
    const sup::Losses l = sup::compute_losses(m.forward(ex.images), ex.targets, supervise);
    l.total.backward();
    double total = 0.0;
    for (const auto& e : m.params().entries()) {
      if (e.name.rfind("scale_head.", 0) != 0 || !e.tensor.has_grad()) continue;
      for (double g : e.tensor.grad()) total += std::abs(g);
    }
    return total;
  };
  // A non-metric batch is never supervised; the sampler enforces it.
  Rng rng(5);
  bool sampler_masks = true;
  for (int i = 0; i < 2000; ++i) sampler_masks &= !prior::sample_prior_config(rng, false).supervise_scale;
  const double masked = grad_mass(false, false);
  const double control = grad_mass(true, true);
  Outcome o;
  o.passed = masked == 0.0 && control > 0.0 && sampler_masks;
  o.detail = fmt("non-metric batch: sum |dL/d scale-head| = %.17g (exactly 0 required); supervised control %.3e; "
                 "sampler never supervises non-metric batches: %s",
                 masked, control, sampler_masks ? "yes" : "no");
  return o;
}

// 6 -------------------------------------------------------------------------
train::TrainConfig overfit_train_config() {
  train::TrainConfig c;
  c.steps = 2000;
  c.checkpoint_every = 0;
  c.p_inject = 0.0;
  return c;
}

Outcome overfit_run(const Context& ctx) {
  const auto t0 = Clock::now();
  std::vector<synth::SceneSample> scenes;
  for (std::uint64_t i = 0; i < 4; ++i) scenes.push_back(scene(1000 + i));
  const model::ModelConfig mc;  // 64 x 64, C = 64
  const train::TrainConfig tc = overfit_train_config();
  train::Trainer trainer(mc, tc, scenes);
  std::ofstream log(ctx.out / "overfit_log.jsonl");
  trainer.run(tc.steps, &log, {});
  const eval::EvalReport rep = eval::evaluate(trainer.model(), named(scenes, "train"), eval::EvalConfig{});
  std::ofstream(ctx.out / "overfit_report.json") << rep.to_json().dump(2) << "\n";
  const double t = seconds_since(t0);
  bool scale_ok = rep.scale_count == 4;
  for (const auto& s : rep.scenes) scale_ok &= std::abs(s.scale_pred / *s.scale_gt - 1.0) <= 0.10;
  Outcome o;
  o.passed = rep.mean_rel < 5.0 && scale_ok && t < 1800.0 && mc.image_size == 64 && mc.embed_dim == 64;
  o.detail = fmt("4 scenes x 4 views, %lld steps: train aligned rel %.2f (< 5.0), S_pred/S_gt in [%.3f, %.3f] "
                 "(within 10%%), %.0f s (< 1800 s)",
                 static_cast<long long>(tc.steps), rep.mean_rel, rep.scale_ratio_min, rep.scale_ratio_max, t);
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome prior_trend(const Context& ctx) {
  std::vector<synth::SceneSample> train_scenes, held_out;
  for (std::uint64_t i = 0; i < 128; ++i) train_scenes.push_back(scene(7000 + i));
  for (std::uint64_t i = 0; i < 24; ++i) held_out.push_back(scene(8000 + i));
  train::TrainConfig tc;  // probabilistic injection at the default rates
  tc.checkpoint_every = 0;
  train::Trainer trainer(model::ModelConfig{}, tc, train_scenes);
  std::ofstream log(ctx.out / "prior_trend_log.jsonl");
  trainer.run(tc.steps, &log, {});
  std::vector<eval::EvalReport> reports;
  for (const auto& c : eval::prior_sweep(eval::EvalConfig{})) {
    reports.push_back(eval::evaluate(trainer.model(), named(held_out, "val"), c));
  }
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) j.push_back(r.to_json());
  std::ofstream(ctx.out / "prior_trend_report.json") << j.dump(2) << "\n";
  std::ofstream(ctx.out / "prior_trend_report.txt") << eval::format_table(reports);
  const double none = reports.front().mean_rel, kp = reports.back().mean_rel;
  Outcome o;
  o.passed = kp <= none && held_out.size() >= 20;
  o.detail = fmt("%zu held-out scenes, aligned rel: none %.2f, K %.2f, P %.2f, K+P %.2f (K+P <= none required)%s",
                 held_out.size(), none, reports[1].mean_rel, reports[2].mean_rel, kp,
                 o.passed ? "" : "; FLAGGED: priors did not help");
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome pose_encoding_ablation(const Context& ctx) {
  std::vector<synth::SceneSample> train_scenes, held_out;
  for (std::uint64_t i = 0; i < 4; ++i) train_scenes.push_back(scene(1000 + i));
  for (std::uint64_t i = 0; i < 4; ++i) held_out.push_back(scene(9000 + i));
  eval::AblationSpec spec;
  spec.train.steps = 300;
  spec.train.checkpoint_every = 0;
  spec.variants = {"quat-pose-encoder"};
  const eval::AblationResult r = eval::run_ablation(spec, train_scenes, named(held_out, "val"));
  const fs::path curves = ctx.out / "pose_encoding_curves.svg";
  const std::string svg = r.loss_chart(20);
  std::ofstream(curves) << svg;
  std::ofstream(ctx.out / "pose_encoding_ablation.txt") << r.table();
  std::ofstream(ctx.out / "pose_encoding_ablation.json") << r.to_json().dump() << "\n";
  std::size_t lines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  bool finite = r.variants.size() == 2;
  for (const auto& v : r.variants) {
    finite &= v.loss.size() == 300;
    for (double l : v.loss) finite &= std::isfinite(l);
  }
  Outcome o;
  o.passed = finite && lines == 2 && fs::file_size(curves) > 0 &&
             r.variants[0].model.pose_encoding == model::PoseEncoding::kRot6D &&
             r.variants[1].model.pose_encoding == model::PoseEncoding::kQuaternion;
  const auto tail = [](const std::vector<double>& l) { return eval::moving_average(l, 50).back(); };
  o.detail = fmt("rot6d and quaternion trained 300 steps under seed %llu; final 50-step mean loss %.4f vs %.4f; "
                 "paired curves in %s",
                 static_cast<unsigned long long>(spec.train.seed), tail(r.variants[0].loss), tail(r.variants[1].loss),
                 curves.filename().string().c_str());
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome eval_identities(const Context&) {
  double drift = 0.0;
  bool perfect = true;
  Rng rng(99);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const synth::SceneSample s = scene(9900 + seed, 32, 3);
    std::vector<double> pred(s.depths.size());
    for (double& p : pred) p = uniform(rng, 0.2, 12.0);
    const auto base = eval::score_depth(pred, s, eval::EvalConfig{});
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
      std::vector<double> scaled = pred;
      for (double& p : scaled) p *= c;
      const auto r = eval::score_depth(scaled, s, eval::EvalConfig{});
      drift = std::max({drift, std::abs(r.rel - base.rel), std::abs(r.tau - base.tau)});
    }
    for (auto mode : {eval::EvalMode::kMetric, eval::EvalMode::kAligned}) {
      eval::EvalConfig c;
      c.mode = mode;
      const auto r = eval::score_depth(s.depths_f64(), s, c);
      perfect &= r.rel == 0.0 && r.tau == 100.0;
    }
  }
  Outcome o;
  o.passed = drift <= 1e-12 && perfect;
  o.detail = fmt("aligned rel/tau drift under scaling by c in {1e-3, 0.5, 7, 1e4}: %.2e (<= 1e-12); ground truth as "
                 "prediction gives rel 0, tau 100 in both modes: %s",
                 drift, perfect ? "yes" : "no");
  return o;
}

// 10 ------------------------------------------------------------------------
Outcome determinism(const Context& ctx) {
  const fs::path dir = ctx.out / "determinism";
  fs::remove_all(dir);
  std::ostringstream sink, err;
  auto cli = [&](std::vector<std::string> args) { return cli::run_cli(args, sink, err); };
  int rc = cli({"synth", "--out", (dir / "data").string(), "--count", "4", "--train-ratio", "1", "--val-ratio", "0",
                "--seed", "17"});
  const std::string manifest = (dir / "data" / "manifest.json").string();
  const std::vector<std::string> common{"--manifest", manifest, "--train.steps", "8", "--train.checkpoint-every", "4",
                                        "--train.seed", "23"};
  for (const char* out : {"run1", "run2"}) {
    auto args = std::vector<std::string>{"train", "--out", (dir / out).string()};
    args.insert(args.end(), common.begin(), common.end());
    rc |= cli(args);
  }
  rc |= cli({"train", "--manifest", manifest, "--out", (dir / "resumed").string(), "--resume",
             (dir / "run1" / "checkpoints" / "checkpoint_000004.usck").string()});
  if (rc != 0) return {false, "a command failed: " + err.str()};
  bool identical = true, resumed = true;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "run1" / "checkpoints")) {
    identical &= io::read_file(e.path()) == io::read_file(dir / "run2" / "checkpoints" / e.path().filename());
    ++files;
  }
  identical &= io::read_file(dir / "run1" / "train_log.jsonl") == io::read_file(dir / "run2" / "train_log.jsonl");
  resumed &= io::read_file(dir / "run1" / "checkpoints" / "latest.usck") ==
             io::read_file(dir / "resumed" / "checkpoints" / "latest.usck");
  resumed &= io::read_file(dir / "run1" / "checkpoints" / "checkpoint_000008.usck") ==
             io::read_file(dir / "resumed" / "checkpoints" / "checkpoint_000008.usck");
  Outcome o;
  o.passed = identical && resumed && files == 3;
  o.detail = fmt("two train runs (64x64 model, 8 steps, seed 23): %zu checkpoint files and logs bit-identical: %s; "
                 "resume from step 4 to 8 bit-identical to the straight run: %s",
                 files, identical ? "yes" : "no", resumed ? "yes" : "no");
  return o;
}

// 11 ------------------------------------------------------------------------
Outcome format_suite(const Context& ctx) {
  bool ok = true;
  std::string why;
  auto require = [&](bool cond, const std::string& what) {
    if (!cond && ok) why = what;
    ok &= cond;
  };
  for (bool metric : {true, false}) {
    const synth::SceneSample s = scene(1111, 32, 3, metric);
    const auto bytes = synth::encode_scene(s);
    const synth::SceneSample back = synth::decode_scene(bytes);
    require(back == s, "scene decode differs");
    require(synth::encode_scene(back) == bytes, "scene re-encode differs");
    const fs::path file = ctx.out / "format_scene.uscn";
    synth::write_scene(s, file);
    require(io::read_file(file) == bytes && synth::read_scene(file) == s, "scene file round trip differs");
    // Version field is little-endian regardless of the host.
    require(bytes[4] == 1 && bytes[5] == 0 && bytes[6] == 0 && bytes[7] == 0, "scene version not little-endian");
  }
  {
    std::vector<synth::SceneSample> scenes{scene(1112, 16, 2)};
    train::Trainer t(train::micro_model_config(), train::TrainConfig{}, scenes);
    t.step();
    const ad::Checkpoint ck = t.checkpoint();
    const auto bytes = ad::encode_checkpoint(ck);
    require(ad::decode_checkpoint(bytes) == ck, "checkpoint decode differs");
    require(ad::encode_checkpoint(ad::decode_checkpoint(bytes)) == bytes, "checkpoint re-encode differs");
    const fs::path file = ctx.out / "format_checkpoint.usck";
    ad::write_checkpoint(file, ck);
    require(io::read_file(file) == bytes && ad::read_checkpoint(file) == ck, "checkpoint file round trip differs");
  }
  const synth::SceneSample g = synth::read_scene(ctx.data / "golden_scene.uscn");
  require(g.width == 3 && g.height == 2 && g.frames == 2 && g.scale == 3.75 && g.seed == 42 &&
              g.intrinsics.fx == 2.5 && g.poses[1].translation == geom::Vec3(0.5, -0.25, 2.0),
          "golden scene header values");
  for (std::size_t i = 0; i < g.images.size(); ++i) require(g.images[i] == static_cast<float>(i) / 64.0f, "golden images");
  for (std::size_t i = 0; i < g.depths.size(); ++i) {
    require(g.depths[i] == (i == 3 ? 0.0f : 1.0f + 0.5f * static_cast<float>(i)), "golden depths");
  }
  // The header is free-form JSON, so the golden scene is compared by value.
  require(synth::decode_scene(synth::encode_scene(g)) == g, "golden scene round trip");
  const ad::Checkpoint gc = ad::read_checkpoint(ctx.data / "golden_checkpoint.usck");
  require(gc.records.size() == 3 && gc.records[0].values == std::vector<double>{-0.5, -0.25, 0.0, 0.25, 0.5, 0.75} &&
              gc.records[1].values == std::vector<double>{1.0, -2.0, 1e-300},
          "golden checkpoint values");
  require(ad::encode_checkpoint(gc) == io::read_file(ctx.data / "golden_checkpoint.usck"), "golden checkpoint re-encode");
  Outcome o;
  o.passed = ok;
  o.detail = ok ? "scene (metric and non-metric) and checkpoint bytes round-trip exactly; golden scene and checkpoint "
                  "fixtures parse to their written values; the golden checkpoint re-encodes byte for byte"
                : "failed: " + why;
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks, one line per criterion."};
  std::string only, out = (fs::temp_directory_path() / "scalerecon_acceptance").string();
  std::string data = SCALERECON_DEFAULT_DATA_DIR;
  app.add_option("--only", only, "comma-separated criterion numbers (default: all)");
  app.add_option("--out", out, "directory for reports, curves and logs");
  app.add_option("--data-dir", data, "directory with the golden fixture files");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "gradient suite", gradient_suite},
      {2, "rotation suite", rotation_suite},
      {3, "scale-target suite", scale_target_suite},
      {4, "scale-head unit suite", scale_head_suite},
      {5, "masking suite", masking_suite},
      {6, "overfit run", overfit_run},
      {7, "prior-benefit trend", prior_trend},
      {8, "rot6d vs quaternion ablation", pose_encoding_ablation},
      {9, "evaluation-mode identities", eval_identities},
      {10, "determinism", determinism},
      {11, "format suite", format_suite},
  };
  std::vector<int> selected;
  std::stringstream ss(only);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) selected.push_back(std::stoi(item));
  }
  Context ctx{out, data};
  fs::create_directories(ctx.out);
  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all &= o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
