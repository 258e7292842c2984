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

// The uniscale command surface: synth, train, eval, ablate, gradcheck and
// infer.

#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace scalerecon::cli {

using EnvGetter = std::function<const char*(const char*)>;

/// Default settings of one subcommand, nested like its JSON config file.
nlohmann::json command_defaults(const std::string& command);

std::vector<std::string> command_names();

/// Parses `args` (without the program name) and runs the subcommand.
/// Returns the process exit code: 0 success, 2 config error, 3 data error,
/// 4 numeric failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvGetter& getenv = [](const char* name) -> const char* { return std::getenv(name); });

}  // namespace scalerecon::cli
