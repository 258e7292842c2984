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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scalerecon/autodiff/parameters.hpp"

namespace scalerecon::ad {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  /// Global L2 norm cap applied to all gradients before the moment update.
  double clip_norm = 1.0;
};

/// Linear warmup from `start` to `peak` over `warmup_steps`. After warmup
/// the rate stays at `peak`, or follows a half-cosine from `peak` down to
/// `peak * final_fraction` at step `total_steps` when that is set.
struct WarmupSchedule {
  double start = 1e-8;
  double peak = 1e-6;
  std::int64_t warmup_steps = 1000;
  std::int64_t total_steps = 0;  // 0 = no decay
  double final_fraction = 1.0;

  double at(std::int64_t step) const;
};

/// Per-group schedules. Defaults are the fine-tuning rates: 5e-5 for the
/// scale head and prior encoders, 1e-6 for everything else.
struct GroupSchedules {
  WarmupSchedule backbone{1e-8, 1e-6, 1000};
  WarmupSchedule scale_and_priors{1e-8, 5e-5, 1000};

  const WarmupSchedule& for_group(ParamGroup group) const {
    return group == ParamGroup::kScaleAndPriors ? scale_and_priors : backbone;
  }
};

struct AdamWMoments {
  std::vector<double> m;
  std::vector<double> v;
};

struct AdamWState {
  std::int64_t step = 0;           // applied updates
  std::int64_t rejected_steps = 0;  // updates refused for non-finite grads
  std::map<std::string, AdamWMoments> moments;
};

struct AdamWResult {
  bool applied = false;
  double grad_norm = 0.0;   // before clipping
  double clip_scale = 1.0;  // factor applied to gradients
};

/// One decoupled-weight-decay Adam update over every parameter in `params`,
/// using each parameter's own gradient buffer. The learning rate for a
/// parameter is `lr[group]`. A non-finite gradient anywhere rejects the whole
/// step and increments `state.rejected_steps`.
AdamWResult adamw_step(ParameterStore& params, AdamWState& state, const double (&lr)[2], const AdamWConfig& config);

}  // namespace scalerecon::ad
