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

#include "scalerecon/train/model_check.hpp"

#include <map>
#include <sstream>

#include "scalerecon/train/trainer.hpp"

namespace scalerecon::train {

model::ModelConfig micro_model_config() {
  model::ModelConfig c;
  c.image_size = 16;
  c.patch_size = 4;
  c.embed_dim = 16;
  c.attention_heads = 2;
  c.aggregator_blocks = 2;
  c.register_count = 2;
  c.mlp_ratio = 2;
  c.dense_channels1 = 8;
  c.dense_channels2 = 4;
  c.seed = 11;
  return c;
}

std::string ModelCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " sampled=" << sampled << " checked=" << checked << " excluded=" << excluded
     << " worst_rel_err=" << worst_error;
  if (!worst_parameter.empty()) os << " (" << worst_parameter << ")";
  if (!failure.empty()) os << ": " << failure;
  return os.str();
}

ModelCheckReport check_model_gradients(std::size_t coordinates, std::uint64_t seed, double tolerance) {
  model::UniScaleModel net(micro_model_config());
  Rng rng(seed);
  // Move off the initialization so zero-initialized layers carry gradient
  // and the scale head is not saturated at exactly 1.
  for (auto& e : net.params().entries()) {
    for (double& v : e.tensor.mutable_data()) v += 0.05 * normal(rng);
  }

  synth::SceneSpec spec;
  spec.seed = seed;
  spec.frames = 2;
  spec.image_size = 16;
  const TrainExample ex = make_example(synth::generate_scene(spec));
  prior::PriorConfig all;
  all.inject_any = all.use_pose = all.use_intrinsics = all.supervise_scale = true;
  const prior::PriorBundle priors = select_priors(ex, all);
  auto loss = [&] { return sup::compute_losses(net.forward(ex.images, priors), ex.targets, true).total; };

  const auto& entries = net.params().entries();
  const std::size_t total = net.params().total_size();
  std::map<std::size_t, std::vector<std::size_t>> picks;  // entry index -> local coordinates
  for (std::size_t k = 0; k < coordinates; ++k) {
    std::size_t flat = uniform_index(rng, total);
    std::size_t i = 0;
    while (flat >= entries[i].tensor.numel()) flat -= entries[i++].tensor.numel();
    picks[i].push_back(flat);
  }

  ModelCheckReport report;
  report.sampled = coordinates;
  for (auto& [index, local] : picks) {
    ad::GradCheckOptions options;
    options.tolerance = tolerance;
    options.coordinates = local;
    const ad::GradCheckReport r = ad::finite_diff_check_leaf(loss, entries[index].tensor, options);
    report.checked += r.checked;
    report.excluded += r.excluded.size();
    if (r.worst_error > report.worst_error) {
      report.worst_error = r.worst_error;
      report.worst_parameter = entries[index].name;
    }
    if (!r.passed && report.passed) {
      report.passed = false;
      report.failure = entries[index].name + ": " + r.summary();
    }
  }
  return report;
}

}  // namespace scalerecon::train
