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

// Layered command configuration: defaults, then a JSON file, then
// UNISCALE_* environment variables, then command-line flags.
//
// Every setting has one dotted key ("train.lr_backbone") that maps to the
// nested JSON object {"train": {"lr_backbone": ...}}, to the flag
// --train.lr-backbone and to the variable UNISCALE_TRAIN_LR_BACKBONE.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace scalerecon::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitData = 3, kExitNumeric = 4 };

/// Leaves of a nested object keyed by dotted path. Arrays are leaves.
using Flat = std::map<std::string, nlohmann::json>;

Flat flatten(const nlohmann::json& object);
nlohmann::json unflatten(const Flat& flat);

std::string flag_name(const std::string& key);
std::string env_name(const std::string& key);

/// Parses `text` as a value of the same JSON type as `like`.
nlohmann::json parse_value(const std::string& key, const std::string& text, const nlohmann::json& like);

struct ConfigLayers {
  std::optional<nlohmann::json> file;
  std::map<std::string, std::string> env;    // key -> text
  std::map<std::string, std::string> flags;  // key -> text
};

struct ResolvedConfig {
  nlohmann::json config;
  std::set<std::string> explicit_keys;  // keys set by any layer
};

/// Throws ConfigError on unknown keys and on values of the wrong type.
ResolvedConfig resolve_config(const nlohmann::json& defaults, const ConfigLayers& layers);

/// UNISCALE_* variables for the keys of `defaults`, read through `getenv`.
std::map<std::string, std::string> read_env(const nlohmann::json& defaults,
                                            const std::function<const char*(const char*)>& getenv);

}  // namespace scalerecon::cli
