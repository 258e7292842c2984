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

#include "scalerecon/autodiff/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "scalerecon/common/binary_io.hpp"

namespace scalerecon::ad {

namespace {
constexpr char kMagic[4] = {'U', 'S', 'C', 'K'};
}  // namespace

const CheckpointRecord* Checkpoint::find(std::string_view name) const {
  for (const auto& r : records) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
  io::ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(checkpoint.header_json.size()));
  w.bytes(checkpoint.header_json.data(), checkpoint.header_json.size());
  w.u32(static_cast<std::uint32_t>(checkpoint.records.size()));
  for (const auto& rec : checkpoint.records) {
    if (numel_of(rec.shape) != rec.values.size()) {
      throw FormatError("checkpoint record " + rec.name + ": shape does not match payload");
    }
    w.u32(static_cast<std::uint32_t>(rec.name.size()));
    w.bytes(rec.name.data(), rec.name.size());
    w.u32(static_cast<std::uint32_t>(rec.shape.size()));
    for (auto e : rec.shape) w.u32(static_cast<std::uint32_t>(e));
    for (double v : rec.values) w.f64(v);
  }
  return std::move(w).take();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  io::BasicByteReader<FormatError> r(bytes, "checkpoint");
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("checkpoint: bad magic (expected USCK)");
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.header_json = r.string(r.u32());
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointRecord rec;
    rec.name = r.string(r.u32());
    const auto rank = r.u32();
    if (rank > 16) throw FormatError("checkpoint: record " + rec.name + " has implausible rank");
    for (std::uint32_t d = 0; d < rank; ++d) rec.shape.push_back(r.u32());
    const std::size_t n = numel_of(rec.shape);
    if (n > r.remaining() / 8) throw FormatError("checkpoint: truncated payload for " + rec.name);
    rec.values.resize(n);
    for (auto& v : rec.values) v = r.f64();
    ck.records.push_back(std::move(rec));
  }
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes after last record");
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  io::write_file(path, encode_checkpoint(checkpoint));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_file(path)); }

Checkpoint snapshot(const ParameterStore& params, const AdamWState* state, std::string header_json) {
  Checkpoint ck;
  ck.header_json = std::move(header_json);
  for (const auto& p : params.entries()) {
    ck.records.push_back({p.name, p.tensor.shape(), {p.tensor.data().begin(), p.tensor.data().end()}});
  }
  if (state) {
    for (const auto& p : params.entries()) {
      auto it = state->moments.find(p.name);
      if (it == state->moments.end()) continue;
      ck.records.push_back({"adam.m/" + p.name, p.tensor.shape(), it->second.m});
      ck.records.push_back({"adam.v/" + p.name, p.tensor.shape(), it->second.v});
    }
  }
  return ck;
}

void restore(const Checkpoint& checkpoint, ParameterStore& params, AdamWState* state) {
  for (auto& p : params.entries()) {
    const auto* rec = checkpoint.find(p.name);
    if (!rec) throw FormatError("checkpoint: missing parameter " + p.name);
    if (rec->shape != p.tensor.shape()) {
      throw FormatError("checkpoint: parameter " + p.name + " has shape " + shape_str(rec->shape) + ", model expects " +
                        shape_str(p.tensor.shape()));
    }
    std::copy(rec->values.begin(), rec->values.end(), p.tensor.mutable_data().begin());
  }
  if (state) {
    state->moments.clear();
    for (auto& p : params.entries()) {
      const auto* m = checkpoint.find("adam.m/" + p.name);
      const auto* v = checkpoint.find("adam.v/" + p.name);
      if (!m || !v) continue;
      if (m->values.size() != p.tensor.numel() || v->values.size() != p.tensor.numel()) {
        throw FormatError("checkpoint: optimizer moments for " + p.name + " have the wrong size");
      }
      state->moments[p.name] = {m->values, v->values};
    }
  }
}

}  // namespace scalerecon::ad
