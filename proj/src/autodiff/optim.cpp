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

#include "scalerecon/autodiff/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scalerecon::ad {

double WarmupSchedule::at(std::int64_t step) const {
  if (step < warmup_steps) {
    if (step <= 0) return start;
    const double frac = static_cast<double>(step) / static_cast<double>(warmup_steps);
    return start + (peak - start) * frac;
  }
  if (total_steps <= warmup_steps) return peak;
  const double frac =
      std::min(1.0, static_cast<double>(step - warmup_steps) / static_cast<double>(total_steps - warmup_steps));
  const double floor = peak * final_fraction;
  return floor + (peak - floor) * 0.5 * (1.0 + std::cos(M_PI * frac));
}

AdamWResult adamw_step(ParameterStore& params, AdamWState& state, const double (&lr)[2], const AdamWConfig& config) {
  if (lr[0] < 0.0 || lr[1] < 0.0) throw std::invalid_argument("adamw_step: negative learning rate");
  AdamWResult result;
  double sq = 0.0;
  for (auto& p : params.entries()) {
    if (!p.tensor.has_grad()) continue;
    for (double g : p.tensor.grad()) sq += g * g;
  }
  result.grad_norm = std::sqrt(sq);
  if (!std::isfinite(result.grad_norm)) {
    ++state.rejected_steps;
    return result;
  }
  if (config.clip_norm > 0.0 && result.grad_norm > config.clip_norm) {
    result.clip_scale = config.clip_norm / result.grad_norm;
  }
  const std::int64_t t = state.step + 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (auto& p : params.entries()) {
    auto values = p.tensor.mutable_data();
    auto& mom = state.moments[p.name];
    if (mom.m.size() != values.size()) {
      if (!mom.m.empty()) throw std::invalid_argument("adamw_step: state shape mismatch for " + p.name);
      mom.m.assign(values.size(), 0.0);
      mom.v.assign(values.size(), 0.0);
    }
    const double rate = lr[static_cast<int>(p.group)];
    const bool has_grad = p.tensor.has_grad();
    const double* grad = has_grad ? p.tensor.grad().data() : nullptr;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = has_grad ? grad[i] * result.clip_scale : 0.0;
      mom.m[i] = config.beta1 * mom.m[i] + (1.0 - config.beta1) * g;
      mom.v[i] = config.beta2 * mom.v[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = mom.m[i] / bc1;
      const double v_hat = mom.v[i] / bc2;
      values[i] -= rate * config.weight_decay * values[i];
      values[i] -= rate * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
  state.step = t;
  result.applied = true;
  return result;
}

}  // namespace scalerecon::ad
