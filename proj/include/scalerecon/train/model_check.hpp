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
#include <string>

#include "scalerecon/autodiff/gradcheck.hpp"
#include "scalerecon/model/config.hpp"

namespace scalerecon::train {

/// 2-frame, 16x16 configuration used for whole-network gradient checks.
model::ModelConfig micro_model_config();

struct ModelCheckReport {
  bool passed = true;
  std::size_t sampled = 0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
  double worst_error = 0.0;
  std::string worst_parameter;
  std::string failure;

  std::string summary() const;
};

/// Finite-difference check of the full training loss (all four terms, both
/// priors injected) with respect to `coordinates` parameter entries sampled
/// uniformly over the whole network.
ModelCheckReport check_model_gradients(std::size_t coordinates, std::uint64_t seed, double tolerance = 1e-4);

}  // namespace scalerecon::train
