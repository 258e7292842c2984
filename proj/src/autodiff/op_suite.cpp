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

#include "scalerecon/autodiff/op_suite.hpp"

#include <algorithm>
#include <numeric>

#include "scalerecon/common/random.hpp"

namespace scalerecon::ad {

namespace {

struct OpCase {
  std::vector<Tensor> inputs;
  OpAttrs attrs;
};

Tensor random_tensor(Shape shape, Rng& rng, double lo, double hi) {
  std::vector<double> v(numel_of(shape));
  for (auto& x : v) x = uniform(rng, lo, hi);
  return Tensor::from(std::move(shape), std::move(v), true);
}

OpCase make_case(OpKind kind, std::size_t draw, Rng& rng) {
  OpCase c;
  auto rt = [&](Shape s, double lo = -1.5, double hi = 1.5) { return random_tensor(std::move(s), rng, lo, hi); };
  switch (kind) {
    case OpKind::kMatmul:
      if (draw % 2 == 0) {
        c.inputs = {rt({2, 3, 4}), rt({4, 5})};
      } else {
        c.inputs = {rt({2, 3, 4}), rt({2, 4, 5})};
      }
      break;
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
      switch (draw % 3) {
        case 0: c.inputs = {rt({3, 4}), rt({3, 4})}; break;
        case 1: c.inputs = {rt({2, 3, 4}), rt({4})}; break;
        default: c.inputs = {rt({3, 4}), rt({1})}; break;
      }
      break;
    case OpKind::kScale:
      c.inputs = {rt({3, 4})};
      c.attrs.scalar = uniform(rng, -2.0, 2.0);
      break;
    case OpKind::kConcat:
      if (draw % 2 == 0) {
        c.inputs = {rt({2, 3}), rt({2, 1}), rt({2, 4})};
        c.attrs.axis = -1;
      } else {
        c.inputs = {rt({2, 3, 2}), rt({2, 1, 2}), rt({2, 4, 2})};
        c.attrs.axis = 1;
      }
      break;
    case OpKind::kSoftmax:
      c.inputs = {rt({3, 4, 2}, -3.0, 3.0)};
      c.attrs.axis = static_cast<int>(uniform_index(rng, 3));
      break;
    case OpKind::kExp: c.inputs = {rt({3, 4}, -2.0, 2.0)}; break;
    case OpKind::kLog: c.inputs = {rt({3, 4}, 0.2, 3.0)}; break;
    case OpKind::kAbs: c.inputs = {rt({3, 4})}; break;
    case OpKind::kHuber:
      c.inputs = {rt({3, 4}, -2.0, 2.0)};
      c.attrs.scalar = 0.5;
      break;
    case OpKind::kRelu: c.inputs = {rt({3, 4})}; break;
    case OpKind::kSigmoid: c.inputs = {rt({3, 4}, -3.0, 3.0)}; break;
    case OpKind::kLayerNorm: c.inputs = {rt({3, 5})}; break;
    case OpKind::kL2Normalize: c.inputs = {rt({3, 4})}; break;
    case OpKind::kMean:
    case OpKind::kSum:
      c.inputs = {rt({2, 3, 4})};
      c.attrs.axis = static_cast<int>(uniform_index(rng, 3));
      c.attrs.keepdim = draw % 2 == 1;
      break;
    case OpKind::kSlice: {
      c.inputs = {rt({3, 4, 5})};
      const int axis = static_cast<int>(uniform_index(rng, 3));
      const std::size_t extent = c.inputs[0].shape()[axis];
      c.attrs.axis = axis;
      c.attrs.start = uniform_index(rng, extent);
      c.attrs.length = 1 + uniform_index(rng, extent - c.attrs.start);
      break;
    }
    case OpKind::kReshape:
      c.inputs = {rt({2, 6})};
      c.attrs.shape = {3, 4};
      break;
    case OpKind::kTransposeLastTwo: c.inputs = {rt({2, 3, 4})}; break;
    case OpKind::kPermute: {
      c.inputs = {rt({2, 3, 4})};
      c.attrs.axes = {0, 1, 2};
      for (std::size_t i = 2; i > 0; --i) std::swap(c.attrs.axes[i], c.attrs.axes[uniform_index(rng, i + 1)]);
      break;
    }
  }
  return c;
}

}  // namespace

std::vector<OpCheckResult> check_all_ops(std::uint64_t seed, std::size_t draws, const GradCheckOptions& options) {
  std::vector<OpCheckResult> results;
  Rng rng(seed);
  for (OpKind kind : all_op_kinds()) {
    OpCheckResult res;
    res.kind = kind;
    for (std::size_t d = 0; d < draws; ++d) {
      OpCase c = make_case(kind, d, rng);
      Tensor probe;
      {
        NoGradGuard ng;
        probe = forward_op(kind, c.inputs, c.attrs);
      }
      Tensor weights = random_tensor(probe.shape(), rng, -1.0, 1.0).detach();
      ++res.draws;
      for (std::size_t i = 0; i < c.inputs.size(); ++i) {
        for (auto& t : c.inputs) t.zero_grad();
        auto report = finite_diff_check_leaf(
            [&] { return sum_all(mul(forward_op(kind, c.inputs, c.attrs), weights)); }, c.inputs[i], options);
        ++res.input_checks;
        res.excluded += report.excluded.size();
        res.worst_error = std::max(res.worst_error, report.worst_error);
        if (!report.passed && res.passed) {
          res.passed = false;
          res.detail = "draw " + std::to_string(d) + " input " + std::to_string(i) + ": " + report.summary();
        }
      }
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace scalerecon::ad
