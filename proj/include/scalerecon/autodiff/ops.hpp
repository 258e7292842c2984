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
#include <span>
#include <string_view>
#include <vector>

#include "scalerecon/autodiff/tensor.hpp"

namespace scalerecon::ad {

// Broadcasting rules
// ------------------
// Binary elementwise ops (add, sub, mul) accept either identical shapes, a
// right operand whose shape is a trailing suffix of the left operand's shape
// (leading-axis expansion, e.g. [B, T, C] + [C]), or a right operand with a
// single element. Anything else needs an explicit reshape.
//
// matmul contracts the last axis of `a` with the second-to-last of `b`.
// `b` of rank 2 is shared across all leading axes of `a`; otherwise the
// leading axes of both operands must match exactly.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);

/// Concatenation along the last axis; all leading extents must agree.
Tensor concat_last(std::span<const Tensor> parts);
Tensor concat_last(std::initializer_list<Tensor> parts);
/// Concatenation along `axis`; all other extents must agree.
Tensor concat(std::span<const Tensor> parts, int axis);
Tensor concat(std::initializer_list<Tensor> parts, int axis);

Tensor softmax(const Tensor& x, int axis);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
/// Subgradient 0 at x == 0.
Tensor abs(const Tensor& x);
/// Elementwise Huber: x^2/2 for |x| <= delta, delta*(|x| - delta/2) beyond.
Tensor huber(const Tensor& x, double delta);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Parameter-free normalization over the last axis to zero mean and unit
/// variance (biased variance, eps added before the square root).
Tensor layer_norm(const Tensor& x, double eps = 1e-6);
/// x / max(||x||, eps) over the last axis.
Tensor l2_normalize(const Tensor& x, double eps = 1e-12);

Tensor sum(const Tensor& x, int axis, bool keepdim = false);
Tensor mean(const Tensor& x, int axis, bool keepdim = false);
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);

Tensor slice(const Tensor& x, int axis, std::size_t start, std::size_t length);
Tensor reshape(const Tensor& x, Shape shape);
Tensor transpose_last_two(const Tensor& x);
Tensor permute(const Tensor& x, std::span<const std::size_t> axes);
Tensor permute(const Tensor& x, std::initializer_list<std::size_t> axes);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

// Generic dispatch
// ----------------
// Every differentiable kind, addressable by name. The gradient-check suite
// walks this list.

enum class OpKind : std::uint8_t {
  kMatmul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kConcat,
  kSoftmax,
  kExp,
  kLog,
  kAbs,
  kHuber,
  kRelu,
  kSigmoid,
  kLayerNorm,
  kL2Normalize,
  kMean,
  kSum,
  kSlice,
  kReshape,
  kTransposeLastTwo,
  kPermute,
};

struct OpAttrs {
  int axis = -1;
  double scalar = 0.0;  // scale factor / huber delta / eps
  std::size_t start = 0;
  std::size_t length = 0;
  bool keepdim = false;
  Shape shape;                     // reshape target
  std::vector<std::size_t> axes;   // permutation
};

std::span<const OpKind> all_op_kinds();
std::string_view op_name(OpKind kind);
Tensor forward_op(OpKind kind, std::span<const Tensor> inputs, const OpAttrs& attrs = {});

}  // namespace scalerecon::ad
