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

#include "scalerecon/autodiff/parameters.hpp"

#include <algorithm>
#include <stdexcept>

namespace scalerecon::ad {

Tensor& ParameterStore::add(std::string name, Tensor tensor, ParamGroup group) {
  if (contains(name)) throw std::invalid_argument("parameter registered twice: " + name);
  if (!tensor.is_leaf()) throw GraphError("parameter " + name + " is not a leaf");
  tensor.set_requires_grad(true);
  entries_.push_back({std::move(name), std::move(tensor), group});
  return entries_.back().tensor;
}

Tensor& ParameterStore::add_normal(std::string name, Shape shape, double stddev, Rng& rng, ParamGroup group) {
  std::vector<double> values(numel_of(shape));
  for (auto& v : values) v = stddev * normal(rng);
  return add(std::move(name), Tensor::from(std::move(shape), std::move(values)), group);
}

Tensor& ParameterStore::add_zeros(std::string name, Shape shape, ParamGroup group) {
  return add(std::move(name), Tensor::zeros(std::move(shape)), group);
}

bool ParameterStore::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const NamedParameter& p) { return p.name == name; });
}

const Tensor& ParameterStore::get(std::string_view name) const {
  for (const auto& p : entries_) {
    if (p.name == name) return p.tensor;
  }
  throw std::out_of_range("unknown parameter: " + std::string(name));
}

Tensor& ParameterStore::get(std::string_view name) {
  return const_cast<Tensor&>(static_cast<const ParameterStore&>(*this).get(name));
}

std::size_t ParameterStore::total_size() const {
  std::size_t n = 0;
  for (const auto& p : entries_) n += p.tensor.numel();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : entries_) p.tensor.zero_grad();
}

}  // namespace scalerecon::ad
