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

#include "scalerecon/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace scalerecon::ad {

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " checked=" << checked << " excluded=" << excluded.size()
     << " worst_rel_err=" << worst_error << " at index " << worst_index << " (analytic " << worst_analytic
     << ", numeric " << worst_numeric << ")";
  if (!failure.empty()) os << ": " << failure;
  return os.str();
}

GradCheckReport finite_diff_check_leaf(const std::function<Tensor()>& loss, Tensor leaf,
                                       const GradCheckOptions& options) {
  GradCheckReport report;
  if (!(options.step > 0.0)) {
    report.passed = false;
    report.failure = "step must be positive";
    return report;
  }
  if (!leaf.requires_grad()) leaf.set_requires_grad(true);
  leaf.zero_grad();
  Tensor l0 = loss();
  const double f0 = l0.item();
  if (!std::isfinite(f0)) {
    report.passed = false;
    report.failure = "loss is non-finite at the base point";
    return report;
  }
  l0.backward();
  const std::vector<double> analytic(leaf.grad().begin(), leaf.grad().end());

  std::vector<std::size_t> coords = options.coordinates;
  if (coords.empty()) {
    coords.resize(leaf.numel());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
  }

  NoGradGuard no_grad;
  auto values = leaf.mutable_data();
  const double h = options.step;
  for (std::size_t idx : coords) {
    const double x0 = values[idx];
    values[idx] = x0 + h;
    const double fp = loss().item();
    values[idx] = x0 - h;
    const double fm = loss().item();
    values[idx] = x0;
    const double a = analytic[idx];
    if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(a)) {
      report.passed = false;
      report.failure = "non-finite value at index " + std::to_string(idx);
      report.worst_index = idx;
      return report;
    }
    const double slope_fwd = (fp - f0) / h;
    const double slope_bwd = (f0 - fm) / h;
    if (std::abs(slope_fwd - slope_bwd) >
        options.kink_threshold * std::max({1.0, std::abs(slope_fwd), std::abs(slope_bwd)})) {
      report.excluded.push_back(idx);
      continue;
    }
    const double numeric = (fp - fm) / (2.0 * h);
    const double err =
        std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
    ++report.checked;
    if (report.checked == 1 || err > report.worst_error) {
      report.worst_error = err;
      report.worst_index = idx;
      report.worst_analytic = a;
      report.worst_numeric = numeric;
    }
  }
  if (report.worst_error >= options.tolerance) {
    report.passed = false;
    report.failure = "relative error exceeds tolerance " + std::to_string(options.tolerance);
  }
  return report;
}

GradCheckReport finite_diff_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                                  const GradCheckOptions& options) {
  Tensor leaf = Tensor::from(x.shape(), std::vector<double>(x.data().begin(), x.data().end()), true);
  return finite_diff_check_leaf([&] { return f(leaf); }, leaf, options);
}

}  // namespace scalerecon::ad
