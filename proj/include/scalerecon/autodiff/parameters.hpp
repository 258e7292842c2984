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
#include <string_view>
#include <vector>

#include "scalerecon/autodiff/tensor.hpp"
#include "scalerecon/common/random.hpp"

namespace scalerecon::ad {

/// Learning-rate group. The scale head and the prior encoders train at a
/// higher peak rate than the rest of the network.
enum class ParamGroup : std::uint8_t { kBackbone = 0, kScaleAndPriors = 1 };

struct NamedParameter {
  std::string name;
  Tensor tensor;
  ParamGroup group = ParamGroup::kBackbone;
};

/// Ordered registry of trainable leaves. Registration order is the
/// serialization and optimizer-update order.
class ParameterStore {
 public:
  Tensor& add(std::string name, Tensor tensor, ParamGroup group);

  /// N(0, stddev^2) initialized parameter.
  Tensor& add_normal(std::string name, Shape shape, double stddev, Rng& rng, ParamGroup group);
  Tensor& add_zeros(std::string name, Shape shape, ParamGroup group);

  const Tensor& get(std::string_view name) const;
  Tensor& get(std::string_view name);
  bool contains(std::string_view name) const;

  std::vector<NamedParameter>& entries() { return entries_; }
  const std::vector<NamedParameter>& entries() const { return entries_; }
  std::size_t total_size() const;

  void zero_grad();

 private:
  std::vector<NamedParameter> entries_;
};

}  // namespace scalerecon::ad
