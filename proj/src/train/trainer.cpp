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

#include "scalerecon/train/trainer.hpp"

#include <cmath>
#include <cstdio>

#include "scalerecon/supervision/scale_target.hpp"

namespace scalerecon::train {

using json = nlohmann::json;

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw TrainError("train config: " + msg); };
  if (steps < 0) fail("steps must be nonnegative");
  if (checkpoint_every < 0) fail("checkpoint_every must be nonnegative");
  if (!(lr_backbone >= 0.0) || !(lr_scale_and_priors >= 0.0) || !(lr_warmup_start >= 0.0)) {
    fail("learning rates must be nonnegative");
  }
  if (warmup_steps < 0) fail("warmup_steps must be nonnegative");
  if (!(lr_final_fraction > 0.0 && lr_final_fraction <= 1.0)) fail("lr_final_fraction must lie in (0, 1]");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be nonnegative");
  if (!(clip_norm > 0.0)) fail("clip_norm must be positive");
  if (!(huber_delta > 0.0)) fail("huber_delta must be positive");
  if (!(conf_alpha > 0.0)) fail("conf_alpha must be positive");
  for (double p : {p_inject, p_per_type, p_supervise}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
  }
}

ad::GroupSchedules TrainConfig::schedules() const {
  const std::int64_t decay_end = lr_final_fraction < 1.0 ? steps : 0;
  return {{lr_warmup_start, lr_backbone, warmup_steps, decay_end, lr_final_fraction},
          {lr_warmup_start, lr_scale_and_priors, warmup_steps, decay_end, lr_final_fraction}};
}

ad::AdamWConfig TrainConfig::adamw() const {
  ad::AdamWConfig c;
  c.weight_decay = weight_decay;
  c.clip_norm = clip_norm;
  return c;
}

void to_json(json& j, const TrainConfig& c) {
  j = json{
      {"steps", c.steps},
      {"checkpoint_every", c.checkpoint_every},
      {"seed", c.seed},
      {"lr_backbone", c.lr_backbone},
      {"lr_scale_and_priors", c.lr_scale_and_priors},
      {"lr_warmup_start", c.lr_warmup_start},
      {"warmup_steps", c.warmup_steps},
      {"lr_final_fraction", c.lr_final_fraction},
      {"weight_decay", c.weight_decay},
      {"clip_norm", c.clip_norm},
      {"huber_delta", c.huber_delta},
      {"conf_alpha", c.conf_alpha},
      {"p_inject", c.p_inject},
      {"p_per_type", c.p_per_type},
      {"p_supervise", c.p_supervise},
  };
}

void from_json(const json& j, TrainConfig& c) {
  if (!j.is_object()) throw TrainError("train config: expected a JSON object");
  json defaults;
  to_json(defaults, TrainConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw TrainError("train config: unknown key \"" + key + "\"");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("steps", c.steps);
    get("checkpoint_every", c.checkpoint_every);
    get("seed", c.seed);
    get("lr_backbone", c.lr_backbone);
    get("lr_scale_and_priors", c.lr_scale_and_priors);
    get("lr_warmup_start", c.lr_warmup_start);
    get("warmup_steps", c.warmup_steps);
    get("lr_final_fraction", c.lr_final_fraction);
    get("weight_decay", c.weight_decay);
    get("clip_norm", c.clip_norm);
    get("huber_delta", c.huber_delta);
    get("conf_alpha", c.conf_alpha);
    get("p_inject", c.p_inject);
    get("p_per_type", c.p_per_type);
    get("p_supervise", c.p_supervise);
  } catch (const json::exception& e) {
    throw TrainError(std::string("train config: ") + e.what());
  }
}

TrainExample make_example(const synth::SceneSample& s) {
  TrainExample e;
  e.images = s.images_tensor();
  e.metric = s.metric;
  e.poses = s.poses;
  e.intrinsics = s.intrinsics_per_frame();
  const sup::ScaleTarget target = sup::compute_scale_target(s.depths_f64(), e.intrinsics, s.poses);
  e.targets = sup::make_targets(target, e.intrinsics);
  e.scale = target.scale;
  return e;
}

prior::PriorBundle select_priors(const TrainExample& e, const prior::PriorConfig& c) {
  prior::PriorBundle b;
  if (!c.inject_any) return b;
  if (c.use_pose) {
    b.poses = e.poses;
    b.pose_scale = e.scale;
  }
  if (c.use_intrinsics) b.intrinsics = e.intrinsics;
  return b;
}

json StepRecord::to_json() const {
  return json{
      {"step", step},
      {"seed", seed},
      {"scene", scene},
      {"inject", priors.inject_any},
      {"pose_prior", priors.use_pose},
      {"intrinsics_prior", priors.use_intrinsics},
      {"scale_supervised", losses.scale_supervised},
      {"loss", losses.total},
      {"camera", losses.camera},
      {"depth", losses.depth},
      {"pmap", losses.pmap},
      {"scale", losses.scale},
      {"grad_norm", grad_norm},
      {"lr_backbone", lr_backbone},
      {"lr_scale_and_priors", lr_scale_and_priors},
      {"applied", applied},
  };
}

Trainer::Trainer(const model::ModelConfig& model_config, const TrainConfig& train_config,
                 std::vector<synth::SceneSample> scenes)
    : config_(train_config), rng_(train_config.seed) {
  config_.validate();
  model_ = std::make_unique<model::UniScaleModel>(model_config);
  if (scenes.empty()) throw TrainError("trainer: no training scenes");
  for (const auto& s : scenes) {
    if (s.width != model_config.image_size || s.height != model_config.image_size) {
      throw TrainError("trainer: scene of " + std::to_string(s.width) + "x" + std::to_string(s.height) +
                       " does not match model image_size " + std::to_string(model_config.image_size));
    }
    examples_.push_back(make_example(s));
  }
}

StepRecord Trainer::step() {
  StepRecord r;
  r.step = optimizer_.step;
  r.seed = config_.seed;
  r.scene = uniform_index(rng_, examples_.size());
  const TrainExample& e = examples_[r.scene];
  r.priors = prior::sample_prior_config(rng_, e.metric, config_.probabilities());
  const bool supervise = r.priors.supervise_scale && model_->config().scale_head;

  model_->params().zero_grad();
  const model::ModelOutput out = model_->forward(e.images, select_priors(e, r.priors));
  const sup::Losses losses = sup::compute_losses(out, e.targets, supervise, config_.loss_weights());
  r.losses = losses.report;

  const ad::GroupSchedules sched = config_.schedules();
  r.lr_backbone = sched.backbone.at(optimizer_.step);
  r.lr_scale_and_priors = sched.scale_and_priors.at(optimizer_.step);
  ++steps_;
  if (!std::isfinite(r.losses.total)) {
    ++optimizer_.rejected_steps;
    return r;
  }
  losses.total.backward();
  const double lr[2] = {r.lr_backbone, r.lr_scale_and_priors};
  const ad::AdamWResult res = ad::adamw_step(model_->params(), optimizer_, lr, config_.adamw());
  r.applied = res.applied;
  r.grad_norm = res.grad_norm;
  return r;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::int64_t step) {
  char name[40];
  std::snprintf(name, sizeof name, "checkpoint_%06lld.usck", static_cast<long long>(step));
  return dir / name;
}

void Trainer::run(std::int64_t target, std::ostream* log, const std::filesystem::path& checkpoint_dir) {
  if (!checkpoint_dir.empty()) std::filesystem::create_directories(checkpoint_dir);
  auto save = [&] {
    if (checkpoint_dir.empty()) return;
    const ad::Checkpoint ck = checkpoint();
    ad::write_checkpoint(checkpoint_path(checkpoint_dir, steps_), ck);
    ad::write_checkpoint(checkpoint_dir / "latest.usck", ck);
  };
  while (steps_ < target) {
    const StepRecord r = step();
    if (log) *log << r.to_json().dump() << '\n';
    if (config_.checkpoint_every > 0 && steps_ % config_.checkpoint_every == 0 && steps_ < target) save();
  }
  if (log) log->flush();
  save();
}

ad::Checkpoint Trainer::checkpoint() const {
  json header{
      {"kind", "trainer"},
      {"model", model_->config()},
      {"train", config_},
      {"steps", steps_},
      {"optimizer_step", optimizer_.step},
      {"rejected_steps", optimizer_.rejected_steps},
      {"rng", rng_state(rng_)},
  };
  return ad::snapshot(model_->params(), &optimizer_, header.dump());
}

namespace {

json parse_header(const ad::Checkpoint& ck) {
  try {
    json h = json::parse(ck.header_json);
    if (!h.is_object() || !h.contains("model")) throw ad::FormatError("checkpoint: header has no model config");
    return h;
  } catch (const json::exception& e) {
    throw ad::FormatError(std::string("checkpoint: bad header: ") + e.what());
  }
}

}  // namespace

model::ModelConfig checkpoint_model_config(const ad::Checkpoint& ck) {
  try {
    return parse_header(ck).at("model").get<model::ModelConfig>();
  } catch (const model::ConfigError& e) {
    throw ad::FormatError(std::string("checkpoint: ") + e.what());
  }
}

std::unique_ptr<model::UniScaleModel> load_model(const ad::Checkpoint& ck) {
  auto m = std::make_unique<model::UniScaleModel>(checkpoint_model_config(ck));
  ad::restore(ck, m->params(), nullptr);
  return m;
}

Trainer Trainer::resume(const ad::Checkpoint& ck, std::vector<synth::SceneSample> scenes) {
  const json h = parse_header(ck);
  if (h.value("kind", "") != "trainer") throw ad::FormatError("checkpoint: not a trainer checkpoint");
  TrainConfig tc;
  model::ModelConfig mc;
  try {
    tc = h.at("train").get<TrainConfig>();
    mc = h.at("model").get<model::ModelConfig>();
  } catch (const std::exception& e) {
    throw ad::FormatError(std::string("checkpoint: ") + e.what());
  }
  Trainer t(mc, tc, std::move(scenes));
  try {
    t.steps_ = h.at("steps").get<std::int64_t>();
    t.optimizer_.step = h.at("optimizer_step").get<std::int64_t>();
    t.optimizer_.rejected_steps = h.at("rejected_steps").get<std::int64_t>();
    const std::string state = h.at("rng").get<std::string>();
    restore_rng_state(t.rng_, state);
    if (rng_state(t.rng_) != state) throw ad::FormatError("checkpoint: unreadable random-generator state");
  } catch (const json::exception& e) {
    throw ad::FormatError(std::string("checkpoint: ") + e.what());
  }
  ad::restore(ck, t.model_->params(), &t.optimizer_);
  return t;
}

}  // namespace scalerecon::train
