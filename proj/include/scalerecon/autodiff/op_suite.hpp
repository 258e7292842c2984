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
#include <vector>

#include "scalerecon/autodiff/gradcheck.hpp"
#include "scalerecon/autodiff/ops.hpp"

namespace scalerecon::ad {

struct OpCheckResult {
  OpKind kind;
  std::size_t draws = 0;
  std::size_t input_checks = 0;  // (draw, input) pairs checked
  double worst_error = 0.0;
  std::size_t excluded = 0;
  bool passed = true;
  std::string detail;  // first failure, if any
};

/// Finite-difference check of every op kind on `draws` random inputs each.
/// Each draw reduces the op output against a random weight tensor so the
/// upstream gradient is non-trivial, then checks every differentiable input.
std::vector<OpCheckResult> check_all_ops(std::uint64_t seed, std::size_t draws, const GradCheckOptions& options = {});

}  // namespace scalerecon::ad
