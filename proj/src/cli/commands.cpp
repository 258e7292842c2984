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

#include "scalerecon/cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scalerecon/autodiff/op_suite.hpp"
#include "scalerecon/cli/config.hpp"
#include "scalerecon/common/binary_io.hpp"
#include "scalerecon/eval/ablation.hpp"
#include "scalerecon/eval/metrics.hpp"
#include "scalerecon/eval/report.hpp"
#include "scalerecon/train/model_check.hpp"
#include "scalerecon/train/trainer.hpp"

namespace scalerecon::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  json config;
  std::set<std::string> explicit_keys;
  std::ostream& out;
};

void write_text(const fs::path& path, const std::string& text) {
  try {
    io::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
}

fs::path make_output_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("an output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir);
  return dir;
}

void dump_effective_config(const fs::path& dir, const std::string& command, const json& config) {
  json j = config;
  j["command"] = command;
  write_text(dir / "effective_config.json", j.dump(2) + "\n");
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " path is required");
  if (!fs::is_regular_file(path)) throw DataError(std::string(what) + " not found: " + path);
}

json scene_spec_defaults() {
  json j = synth::SceneSpec{};
  j.erase("seed");  // per-scene seeds and metric tags are drawn by the command
  j.erase("metric");
  return j;
}

std::vector<synth::SceneSample> samples_of(const std::vector<eval::NamedScene>& scenes) {
  std::vector<synth::SceneSample> out;
  for (const auto& s : scenes) out.push_back(s.sample);
  return out;
}

std::vector<eval::NamedScene> load_scenes(const std::string& manifest, const std::string& split) {
  require_file(manifest, "manifest");
  auto scenes = eval::load_split(manifest, split);
  if (scenes.empty()) throw DataError("manifest " + manifest + " has no \"" + split + "\" scenes");
  return scenes;
}

ad::Checkpoint load_checkpoint(const std::string& path) {
  require_file(path, "checkpoint");
  return ad::read_checkpoint(path);
}

std::vector<int> parse_views(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("views: expected a comma-separated list of positive integers, got \"" + text + "\"");
    }
  }
  return out;
}

// synth ---------------------------------------------------------------------

int cmd_synth(const Invocation& inv) {
  const json& c = inv.config;
  const auto count = c.at("count").get<std::int64_t>();
  const auto seed = c.at("seed").get<std::uint64_t>();
  const double non_metric = c.at("non_metric_fraction").get<double>();
  if (count <= 0) throw ConfigError("count must be positive");
  if (!(non_metric >= 0.0 && non_metric <= 1.0)) throw ConfigError("non_metric_fraction must lie in [0, 1]");
  synth::SceneSpec base;
  try {
    base = c.at("scene").get<synth::SceneSpec>();
    base.validate();
  } catch (const synth::SynthError& e) {
    throw ConfigError(e.what());
  }
  const double train_ratio = c.at("train_ratio").get<double>(), val_ratio = c.at("val_ratio").get<double>();
  if (train_ratio < 0.0 || val_ratio < 0.0 || std::abs(train_ratio + val_ratio - 1.0) > 1e-9) {
    throw ConfigError("train_ratio and val_ratio must be nonnegative and sum to 1");
  }
  const auto jobs = c.at("jobs").get<std::int64_t>();
  if (jobs <= 0) throw ConfigError("jobs must be positive");

  Rng rng(seed);
  std::vector<synth::SceneSpec> specs;
  std::size_t non_metric_count = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    synth::SceneSpec s = base;
    s.seed = rng();
    s.metric = !bernoulli(rng, non_metric);
    non_metric_count += !s.metric;
    specs.push_back(s);
  }
  const fs::path dir = make_output_dir(c.at("out").get<std::string>());
  const synth::Manifest m = synth::make_dataset(specs, train_ratio, val_ratio, seed, dir, jobs);
  dump_effective_config(dir, "synth", c);
  inv.out << "wrote " << m.scenes.size() << " scenes (" << m.split("train").size() << " train, "
          << m.split("val").size() << " val, " << non_metric_count << " non-metric) to " << dir.string() << "\n";
  return kExitOk;
}

// train ---------------------------------------------------------------------

int cmd_train(const Invocation& inv) {
  const json& c = inv.config;
  const std::string resume_path = c.at("resume").get<std::string>();
  const auto scenes = samples_of(load_scenes(c.at("manifest").get<std::string>(), c.at("split").get<std::string>()));
  const fs::path dir = make_output_dir(c.at("out").get<std::string>());
  const fs::path log_path = dir / "train_log.jsonl";

  std::optional<train::Trainer> trainer;
  std::vector<std::string> kept_lines;
  if (!resume_path.empty()) {
    for (const auto& key : inv.explicit_keys) {
      if (key.starts_with("model.") || key.starts_with("train.")) {
        throw ConfigError("\"" + key + "\" cannot be changed when resuming; the checkpoint's settings apply");
      }
    }
    trainer.emplace(train::Trainer::resume(load_checkpoint(resume_path), scenes));
    // Keep the log lines of the steps already taken so a resumed log equals
    // an uninterrupted one.
    std::ifstream old(log_path);
    std::string line;
    while (kept_lines.size() < static_cast<std::size_t>(trainer->steps()) && std::getline(old, line)) {
      kept_lines.push_back(line);
    }
    if (kept_lines.size() != static_cast<std::size_t>(trainer->steps())) {
      kept_lines.clear();  // log missing or shorter than the checkpoint: start it over
    }
  } else {
    const auto mc = c.at("model").get<model::ModelConfig>();
    const auto tc = c.at("train").get<train::TrainConfig>();
    trainer.emplace(mc, tc, scenes);
  }
  json effective = c;
  effective["model"] = trainer->model().config();
  effective["train"] = trainer->config();
  dump_effective_config(dir, "train", effective);

  std::ofstream log(log_path, std::ios::trunc);
  if (!log) throw DataError("cannot write " + log_path.string());
  for (const auto& line : kept_lines) log << line << '\n';
  const std::int64_t start = trainer->steps();
  trainer->run(trainer->config().steps, &log, dir / "checkpoints");
  if (!log) throw DataError("write failed for " + log_path.string());

  inv.out << "trained steps " << start << ".." << trainer->steps() << ", checkpoints in "
          << (dir / "checkpoints").string() << ", log " << log_path.string() << "\n";
  if (trainer->optimizer().rejected_steps > 0) {
    throw NumericError(std::to_string(trainer->optimizer().rejected_steps) + " steps had a non-finite loss");
  }
  return kExitOk;
}

// eval ----------------------------------------------------------------------

int cmd_eval(const Invocation& inv) {
  const json& c = inv.config;
  eval::EvalConfig base;
  base.mode = eval::parse_mode(c.at("mode").get<std::string>());
  base.use_pose = c.at("use_pose").get<bool>();
  base.use_intrinsics = c.at("use_intrinsics").get<bool>();
  base.inlier_threshold = c.at("inlier_threshold").get<double>();
  base.max_frames = c.at("max_frames").get<int>();
  base.validate();
  const auto views = parse_views(c.at("views").get<std::string>());
  const auto jobs = c.at("jobs").get<std::int64_t>();
  if (jobs <= 0) throw ConfigError("jobs must be positive");
  const auto configs = c.at("sweep_priors").get<bool>() ? eval::prior_sweep(base) : std::vector{base};

  const auto net = train::load_model(load_checkpoint(c.at("checkpoint").get<std::string>()));
  const auto scenes = load_scenes(c.at("manifest").get<std::string>(), c.at("split").get<std::string>());
  const fs::path dir = make_output_dir(c.at("out").get<std::string>());
  dump_effective_config(dir, "eval", c);

  std::vector<eval::EvalReport> reports;
  json reports_json = json::array();
  for (const auto& ec : configs) {
    try {
      reports.push_back(eval::evaluate(*net, scenes, ec, jobs));
    } catch (const eval::EvalError& e) {
      throw DataError(std::string("rejected scene: ") + e.what());
    }
    reports_json.push_back(reports.back().to_json());
  }
  const std::string table = eval::format_table(reports);
  write_text(dir / "report.json", reports_json.dump(2) + "\n");
  write_text(dir / "report.txt", table);
  write_text(dir / "report.csv", eval::to_csv(reports));
  inv.out << table;

  if (!views.empty()) {
    std::vector<eval::EvalReport> sweep;
    for (const auto& ec : configs) {
      for (auto& r : eval::views_sweep(*net, scenes, ec, views)) sweep.push_back(std::move(r));
    }
    write_text(dir / "views.csv", eval::to_csv(sweep));
    write_text(dir / "views_rel.svg", eval::views_chart(sweep, false));
    write_text(dir / "views_tau.svg", eval::views_chart(sweep, true));
    inv.out << "view sweep written to " << (dir / "views_rel.svg").string() << "\n";
  }
  return kExitOk;
}

// ablate --------------------------------------------------------------------

int cmd_ablate(const Invocation& inv) {
  const json& c = inv.config;
  eval::AblationSpec spec;
  spec.base = c.at("model").get<model::ModelConfig>();
  spec.train = c.at("train").get<train::TrainConfig>();
  spec.eval.inlier_threshold = c.at("inlier_threshold").get<double>();
  spec.eval.max_frames = c.at("max_frames").get<int>();
  spec.eval.validate();
  const std::string variants = c.at("variants").get<std::string>();
  if (variants == "all") {
    for (auto v : model::variant_names()) {
      if (v != "full") spec.variants.emplace_back(v);
    }
  } else {
    std::stringstream ss(variants);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) spec.variants.push_back(item);
    }
  }
  for (const auto& v : spec.variants) model::with_variant(spec.base, v);
  const auto window = c.at("curve_window").get<std::int64_t>();
  if (window <= 0) throw ConfigError("curve_window must be positive");

  const auto train_scenes =
      samples_of(load_scenes(c.at("manifest").get<std::string>(), c.at("train_split").get<std::string>()));
  const auto eval_scenes = load_scenes(c.at("manifest").get<std::string>(), c.at("eval_split").get<std::string>());
  const fs::path dir = make_output_dir(c.at("out").get<std::string>());
  dump_effective_config(dir, "ablate", c);

  const eval::AblationResult result = eval::run_ablation(spec, train_scenes, eval_scenes, &inv.out);
  write_text(dir / "ablation.json", result.to_json().dump(2) + "\n");
  write_text(dir / "ablation.txt", result.table());
  write_text(dir / "loss_curves.svg", result.loss_chart(window));
  for (const auto& v : result.variants) {
    if (v.variant != "quat-pose-encoder") continue;
    eval::AblationResult pair;
    pair.variants = {result.variants.front(), v};
    pair.variants[0].variant = "rot6d (full)";
    pair.variants[1].variant = "quaternion";
    write_text(dir / "pose_encoding_curves.svg", pair.loss_chart(window));
  }
  inv.out << result.table();
  for (const auto& v : result.variants) {
    for (double l : v.loss) {
      if (!std::isfinite(l)) throw NumericError("variant " + v.variant + " produced a non-finite loss");
    }
  }
  return kExitOk;
}

// gradcheck -----------------------------------------------------------------

int cmd_gradcheck(const Invocation& inv) {
  const json& c = inv.config;
  const auto seed = c.at("seed").get<std::uint64_t>();
  const auto draws = c.at("draws").get<std::int64_t>();
  const auto coordinates = c.at("coordinates").get<std::int64_t>();
  if (draws <= 0 || coordinates <= 0) throw ConfigError("draws and coordinates must be positive");
  ad::GradCheckOptions options;
  options.tolerance = c.at("op_tolerance").get<double>();
  const double model_tolerance = c.at("model_tolerance").get<double>();
  if (!(options.tolerance > 0.0) || !(model_tolerance > 0.0)) throw ConfigError("tolerances must be positive");

  bool passed = true;
  json report{{"ops", json::array()}};
  for (const auto& r : ad::check_all_ops(seed, draws, options)) {
    passed = passed && r.passed;
    char line[160];
    std::snprintf(line, sizeof line, "%-4s op %-22s draws %zu checks %zu worst %.3g%s%s\n", r.passed ? "PASS" : "FAIL",
                  std::string(ad::op_name(r.kind)).c_str(), r.draws, r.input_checks, r.worst_error,
                  r.detail.empty() ? "" : " ", r.detail.c_str());
    inv.out << line;
    report["ops"].push_back({{"op", ad::op_name(r.kind)},
                             {"passed", r.passed},
                             {"worst_error", r.worst_error},
                             {"checks", r.input_checks},
                             {"excluded", r.excluded},
                             {"detail", r.detail}});
  }
  const train::ModelCheckReport m = train::check_model_gradients(coordinates, seed, model_tolerance);
  passed = passed && m.passed;
  inv.out << "model: " << m.summary() << "\n";
  report["model"] = {{"passed", m.passed},         {"sampled", m.sampled},
                     {"checked", m.checked},       {"excluded", m.excluded},
                     {"worst_error", m.worst_error}, {"worst_parameter", m.worst_parameter}};
  report["passed"] = passed;
  if (const auto out = c.at("out").get<std::string>(); !out.empty()) {
    const fs::path dir = make_output_dir(out);
    dump_effective_config(dir, "gradcheck", c);
    write_text(dir / "gradcheck.json", report.dump(2) + "\n");
  }
  if (!passed) throw NumericError("gradient check failed");
  inv.out << "gradcheck passed\n";
  return kExitOk;
}

// infer ---------------------------------------------------------------------

int cmd_infer(const Invocation& inv) {
  const json& c = inv.config;
  const auto net = train::load_model(load_checkpoint(c.at("checkpoint").get<std::string>()));
  const std::string scene_path = c.at("scene").get<std::string>();
  require_file(scene_path, "scene");
  const synth::SceneSample s = synth::read_scene(scene_path);
  const auto& mc = net->config();
  if (s.width != mc.image_size || s.height != mc.image_size) {
    throw DataError("scene images are " + std::to_string(s.width) + "x" + std::to_string(s.height) +
                    ", the model expects " + std::to_string(mc.image_size));
  }
  const int max_frames = c.at("max_frames").get<int>();
  if (max_frames < 0) throw ConfigError("max_frames must be nonnegative");
  const std::size_t N = max_frames > 0 ? std::min(max_frames, s.frames) : s.frames;
  const std::size_t W = s.width, H = s.height, px = W * H;

  prior::PriorBundle priors;
  if (c.at("use_pose").get<bool>()) priors.poses.assign(s.poses.begin(), s.poses.begin() + N);
  if (c.at("use_intrinsics").get<bool>()) priors.intrinsics.assign(N, s.intrinsics);
  ad::NoGradGuard no_grad;
  const ad::Tensor images =
      ad::Tensor::from({N, 3, H, W}, std::vector<double>(s.images.begin(), s.images.begin() + N * 3 * px));
  const model::ModelOutput out = net->forward(images, priors);
  const model::MetricOutput metric = model::metricize(out.dense, out.camera, out.scale);
  const double S = out.scale.item();
  for (double v : metric.depth.data()) {
    if (!std::isfinite(v)) throw NumericError("non-finite depth prediction");
  }

  synth::SceneSample pred;
  pred.width = s.width;
  pred.height = s.height;
  pred.frames = static_cast<int>(N);
  pred.images.assign(s.images.begin(), s.images.begin() + N * 3 * px);
  for (double v : metric.depth.data()) pred.depths.push_back(static_cast<float>(v));
  const auto fov = out.camera.fov.data();
  pred.intrinsics = geom::intrinsics_from_fov(geom::Vec2(fov[0], fov[1]), s.width, s.height);
  const auto quat = out.camera.quat.data();
  const auto trans = metric.translation.data();
  json cameras = json::array();
  for (std::size_t f = 0; f < N; ++f) {
    geom::Pose p;
    p.rotation = geom::quat_to_matrix(geom::Vec4(quat[4 * f], quat[4 * f + 1], quat[4 * f + 2], quat[4 * f + 3]));
    p.translation = geom::Vec3(trans[3 * f], trans[3 * f + 1], trans[3 * f + 2]);
    pred.poses.push_back(p);
    cameras.push_back({{"quat", {quat[4 * f], quat[4 * f + 1], quat[4 * f + 2], quat[4 * f + 3]}},
                       {"translation", {trans[3 * f], trans[3 * f + 1], trans[3 * f + 2]}},
                       {"fov", {fov[2 * f], fov[2 * f + 1]}}});
  }
  pred.metric = true;
  pred.scale = S;
  pred.seed = s.seed;

  const fs::path dir = make_output_dir(c.at("out").get<std::string>());
  dump_effective_config(dir, "infer", c);
  synth::write_scene(pred, dir / "prediction.uscn");
  const auto points = metric.points.data();
  json result{{"scale", S},
              {"scale_gt", s.scale ? json(*s.scale) : json(nullptr)},
              {"frames", N},
              {"width", W},
              {"height", H},
              {"cameras", cameras},
              {"points_shape", {N, H, W, 3}},
              {"points", std::vector<double>(points.begin(), points.end())}};
  write_text(dir / "prediction.json", result.dump() + "\n");
  const auto depth = metric.depth.data();
  for (std::size_t f = 0; f < N; ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "depth_%02zu.svg", f);
    write_text(dir / name, eval::svg_depth_image(std::vector<double>(depth.begin() + f * px, depth.begin() + (f + 1) * px),
                                                 s.width, s.height, "predicted depth, frame " + std::to_string(f)));
  }
  inv.out << "S_pred " << S;
  if (s.scale) inv.out << " (S_gt " << *s.scale << ")";
  inv.out << "; wrote " << (dir / "prediction.uscn").string() << "\n";
  return kExitOk;
}

// dispatch ------------------------------------------------------------------

struct CommandInfo {
  const char* name;
  const char* help;
  int (*run)(const Invocation&);
};

constexpr CommandInfo kCommands[] = {
    {"synth", "generate a synthetic dataset (scenes plus manifest)", cmd_synth},
    {"train", "train a model on the train split, with checkpoints and a JSON-lines log", cmd_train},
    {"eval", "evaluate a checkpoint in metric or median-aligned mode", cmd_eval},
    {"ablate", "train ablation variants next to the full model and compare them", cmd_ablate},
    {"gradcheck", "finite-difference check of every op and of the whole micro model", cmd_gradcheck},
    {"infer", "predict depth, points, cameras and scale for one scene file", cmd_infer},
};

const char* value_type(const json& value) {
  return value.is_boolean()           ? "BOOL"
         : value.is_number_unsigned() ? "UINT"
         : value.is_number_integer()  ? "INT"
         : value.is_number_float()    ? "FLOAT"
                                      : "TEXT";
}

std::string describe(const std::string& key, const json& value) {
  return "default " + value.dump() + ", env " + env_name(key);
}

}  // namespace

json command_defaults(const std::string& command) {
  if (command == "synth") {
    return {{"out", "data"},           {"count", 64},           {"seed", std::uint64_t{0}},
            {"train_ratio", 0.8},      {"val_ratio", 0.2},      {"non_metric_fraction", 0.0},
            {"jobs", 1},               {"scene", scene_spec_defaults()}};
  }
  if (command == "train") {
    return {{"manifest", "data/manifest.json"}, {"split", "train"}, {"out", "run"}, {"resume", ""},
            {"model", model::ModelConfig{}},    {"train", train::TrainConfig{}}};
  }
  if (command == "eval") {
    return {{"checkpoint", "run/checkpoints/latest.usck"},
            {"manifest", "data/manifest.json"},
            {"split", "val"},
            {"out", "eval"},
            {"mode", "aligned"},
            {"use_pose", false},
            {"use_intrinsics", false},
            {"sweep_priors", false},
            {"inlier_threshold", eval::kDefaultInlierThreshold},
            {"max_frames", 0},
            {"views", ""},
            {"jobs", 1}};
  }
  if (command == "ablate") {
    return {{"manifest", "data/manifest.json"},
            {"train_split", "train"},
            {"eval_split", "val"},
            {"out", "ablation"},
            {"variants", "all"},
            {"curve_window", 20},
            {"inlier_threshold", eval::kDefaultInlierThreshold},
            {"max_frames", 0},
            {"model", model::ModelConfig{}},
            {"train", train::TrainConfig{}}};
  }
  if (command == "gradcheck") {
    return {{"seed", std::uint64_t{0}}, {"draws", 20},           {"coordinates", 100},
            {"op_tolerance", 1e-5},     {"model_tolerance", 1e-4}, {"out", ""}};
  }
  if (command == "infer") {
    return {{"checkpoint", "run/checkpoints/latest.usck"},
            {"scene", ""},
            {"out", "infer"},
            {"use_pose", false},
            {"use_intrinsics", false},
            {"max_frames", 0}};
  }
  throw ConfigError("unknown command \"" + command + "\"");
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& c : kCommands) out.emplace_back(c.name);
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvGetter& getenv) {
  CLI::App app{"uniscale: synthetic multi-view metric depth toolkit.\n"
               "Settings come from defaults, then --config FILE (JSON), then UNISCALE_* variables, then flags."};
  app.require_subcommand(1, 1);
  struct Sub {
    const CommandInfo* info;
    CLI::App* app;
    json defaults;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> options;
    std::string config_file;
  };
  std::vector<Sub> subs;
  subs.reserve(std::size(kCommands));
  for (const auto& info : kCommands) {
    subs.push_back({&info, app.add_subcommand(info.name, info.help), command_defaults(info.name), {}, {}, {}});
  }
  for (auto& s : subs) {
    s.app->add_option("--config", s.config_file, "JSON config file; keys nest like the dotted flag names");
    for (const auto& [key, value] : flatten(s.defaults)) {
      s.options[key] =
          s.app->add_option("--" + flag_name(key), s.raw[key], describe(key, value))->type_name(value_type(value));
    }
  }

  std::vector<std::string> argv_store{"uniscale"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    try {
      ConfigLayers layers;
      if (!s.config_file.empty()) {
        std::ifstream in(s.config_file);
        if (!in) throw ConfigError("cannot read config file " + s.config_file);
        try {
          layers.file = json::parse(in);
        } catch (const json::parse_error& e) {
          throw ConfigError("config file " + s.config_file + ": " + e.what());
        }
      }
      layers.env = read_env(s.defaults, getenv);
      for (const auto& [key, opt] : s.options) {
        if (opt->count() > 0) layers.flags[key] = s.raw.at(key);
      }
      ResolvedConfig resolved = resolve_config(s.defaults, layers);
      return s.info->run({resolved.config, resolved.explicit_keys, out});
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const model::ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const train::TrainError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const eval::EvalError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const json::exception& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const NumericError& e) {
      err << "numeric failure: " << e.what() << "\n";
      return kExitNumeric;
    } catch (const model::ModelError& e) {
      err << "numeric failure: " << e.what() << "\n";
      return kExitNumeric;
    } catch (const DataError& e) {
      err << "data error: " << e.what() << "\n";
      return kExitData;
    } catch (const synth::SceneFormatError& e) {
      err << "data error: " << e.what() << "\n";
      return kExitData;
    } catch (const ad::FormatError& e) {
      err << "data error: " << e.what() << "\n";
      return kExitData;
    } catch (const std::exception& e) {
      err << "data error: " << e.what() << "\n";
      return kExitData;
    }
  }
  return kExitFailure;
}

}  // namespace scalerecon::cli
