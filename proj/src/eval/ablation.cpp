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

#include "scalerecon/eval/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace scalerecon::eval {

std::vector<double> moving_average(const std::vector<double>& x, std::size_t window) {
  if (window == 0) window = 1;
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    if (i >= window) sum -= x[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

AblationResult run_ablation(const AblationSpec& spec, const std::vector<synth::SceneSample>& train_scenes,
                            const std::vector<NamedScene>& eval_scenes, std::ostream* progress) {
  std::vector<std::string> names{"full"};
  for (const auto& v : spec.variants) {
    model::with_variant(spec.base, v);  // rejects unknown names before any training
    if (std::find(names.begin(), names.end(), v) == names.end()) names.push_back(v);
  }
  std::vector<NamedScene> metric_scenes;
  for (const auto& s : eval_scenes) {
    if (s.sample.metric) metric_scenes.push_back(s);
  }

  AblationResult result;
  for (const auto& name : names) {
    VariantResult vr;
    vr.variant = name;
    vr.model = model::with_variant(spec.base, name);
    train::Trainer trainer(vr.model, spec.train, train_scenes);
    while (trainer.steps() < spec.train.steps) {
      const train::StepRecord r = trainer.step();
      vr.loss.push_back(r.losses.total);
      vr.depth_loss.push_back(r.losses.depth);
    }
    EvalConfig c = spec.eval;
    c.mode = EvalMode::kAligned;
    c.use_pose = c.use_intrinsics = false;
    vr.aligned_none = evaluate(trainer.model(), eval_scenes, c);
    c.use_pose = c.use_intrinsics = true;
    vr.aligned_kp = evaluate(trainer.model(), eval_scenes, c);
    if (!metric_scenes.empty()) {
      c.mode = EvalMode::kMetric;
      vr.metric_kp = evaluate(trainer.model(), metric_scenes, c);
      c.use_pose = c.use_intrinsics = false;
      vr.metric_none = evaluate(trainer.model(), metric_scenes, c);
    }
    if (progress) {
      *progress << "variant " << name << ": aligned rel " << vr.aligned_none.mean_rel << ", K+P "
                << vr.aligned_kp.mean_rel << '\n';
    }
    result.variants.push_back(std::move(vr));
  }
  return result;
}

nlohmann::json AblationResult::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : variants) {
    nlohmann::json j{{"variant", v.variant},
                     {"model", v.model},
                     {"loss", v.loss},
                     {"depth_loss", v.depth_loss},
                     {"aligned_none", v.aligned_none.to_json()},
                     {"aligned_kp", v.aligned_kp.to_json()}};
    if (v.metric_none) j["metric_none"] = v.metric_none->to_json();
    if (v.metric_kp) j["metric_kp"] = v.metric_kp->to_json();
    out.push_back(std::move(j));
  }
  return out;
}

std::string AblationResult::table() const {
  auto cell = [](const std::optional<EvalReport>& r, bool tau) -> std::string {
    if (!r) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, tau ? "%.1f" : "%.2f", tau ? r->mean_tau : r->mean_rel);
    return buf;
  };
  std::vector<std::vector<std::string>> rows{{"variant", "metric rel", "metric tau", "aligned rel", "aligned tau",
                                              "K+P metric rel", "K+P aligned rel", "S/S_gt"}};
  for (const auto& v : variants) {
    char ratio[32] = "-";
    if (v.metric_none && v.metric_none->scale_count > 0) {
      std::snprintf(ratio, sizeof ratio, "%.3f", v.metric_none->scale_ratio_mean);
    }
    rows.push_back({v.variant, cell(v.metric_none, false), cell(v.metric_none, true), cell(v.aligned_none, false),
                    cell(v.aligned_none, true), cell(v.metric_kp, false), cell(v.aligned_kp, false), ratio});
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      if (c > 0) os << "  ";
      os << (c == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[c])) << rows[i][c];
    }
    os << '\n';
  }
  return os.str();
}

std::string AblationResult::loss_chart(std::size_t window) const {
  std::vector<Series> series;
  for (const auto& v : variants) {
    Series s{v.variant, {}, moving_average(v.loss, window)};
    for (std::size_t i = 0; i < v.loss.size(); ++i) s.x.push_back(static_cast<double>(i + 1));
    series.push_back(std::move(s));
  }
  return svg_line_chart("training loss (moving average over " + std::to_string(window) + " steps)", "step", "loss",
                        series);
}

}  // namespace scalerecon::eval
