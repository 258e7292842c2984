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

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scalerecon/autodiff/tensor.hpp"

namespace scalerecon::ad {

struct GradCheckOptions {
  double step = 1e-6;
  double tolerance = 1e-5;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double denominator_floor = 1e-3;
  // One-sided slopes disagreeing by more than this (relative to
  // max(1, |slope|)) mark a non-differentiable coordinate, which is excluded.
  double kink_threshold = 1e-3;
  // Coordinates to check; all when empty.
  std::vector<std::size_t> coordinates;
};

struct GradCheckReport {
  bool passed = true;
  std::size_t checked = 0;
  std::vector<std::size_t> excluded;
  double worst_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::string failure;  // set when a value is non-finite or the tolerance is exceeded

  std::string summary() const;
};

/// Compares the analytic gradient of scalar `loss()` w.r.t. `leaf` against
/// central differences, perturbing `leaf` in place. `loss` must rebuild its
/// graph on every call and be deterministic.
GradCheckReport finite_diff_check_leaf(const std::function<Tensor()>& loss, Tensor leaf,
                                       const GradCheckOptions& options = {});

/// Convenience form: `f` maps a fresh requires-grad copy of `x` to a scalar.
GradCheckReport finite_diff_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                                  const GradCheckOptions& options = {});

}  // namespace scalerecon::ad
