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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalerecon/autodiff/optim.hpp"
#include "scalerecon/autodiff/parameters.hpp"

namespace scalerecon::ad {

// Checkpoint file layout (all integers little-endian):
//
//   "USCK"                      4 bytes
//   version                     u32 (= 1)
//   header length               u32
//   header                      UTF-8 JSON (model config, run metadata)
//   record count                u32
//   record * count:
//     name length               u32
//     name                      UTF-8
//     rank                      u32
//     extents                   u32 * rank
//     payload                   f64 * prod(extents), IEEE-754 little-endian

inline constexpr std::uint32_t kCheckpointVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckpointRecord {
  std::string name;
  Shape shape;
  std::vector<double> values;

  bool operator==(const CheckpointRecord&) const = default;
};

struct Checkpoint {
  std::string header_json;
  std::vector<CheckpointRecord> records;

  bool operator==(const Checkpoint&) const = default;
  const CheckpointRecord* find(std::string_view name) const;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Parameter records in registration order, followed by AdamW moments as
/// "adam.m/<name>" and "adam.v/<name>" when `state` is given.
Checkpoint snapshot(const ParameterStore& params, const AdamWState* state, std::string header_json);

/// Restores every parameter of `params` from `checkpoint` (names and shapes
/// must match) and, when `state` is given, the optimizer moments.
void restore(const Checkpoint& checkpoint, ParameterStore& params, AdamWState* state);

}  // namespace scalerecon::ad
