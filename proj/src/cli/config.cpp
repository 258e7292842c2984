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

#include "scalerecon/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace scalerecon::cli {

using json = nlohmann::json;

namespace {

void flatten_into(const json& j, const std::string& prefix, Flat& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      flatten_into(v, key, out);
    } else {
      out[key] = v;
    }
  }
}

const char* type_name(const json& like) {
  if (like.is_boolean()) return "bool";
  if (like.is_number_unsigned()) return "unsigned integer";
  if (like.is_number_integer()) return "integer";
  if (like.is_number_float()) return "number";
  if (like.is_string()) return "string";
  return "value";
}

// Converts a JSON value from a config file to the type of the default.
json coerce(const std::string& key, const json& v, const json& like) {
  auto fail = [&] {
    return ConfigError("config key \"" + key + "\": expected " + type_name(like) + ", got " + v.dump());
  };
  if (like.is_boolean()) {
    if (!v.is_boolean()) throw fail();
    return v;
  }
  if (like.is_number_unsigned()) {
    if (v.is_number_unsigned()) return v;
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return json(v.get<std::uint64_t>());
    throw fail();
  }
  if (like.is_number_integer()) {
    if (v.is_number_integer()) return json(v.get<std::int64_t>());
    throw fail();
  }
  if (like.is_number_float()) {
    if (!v.is_number()) throw fail();
    return json(v.get<double>());
  }
  if (like.is_string()) {
    if (!v.is_string()) throw fail();
    return v;
  }
  if (v.type() != like.type()) throw fail();
  return v;
}

}  // namespace

Flat flatten(const json& object) {
  Flat out;
  flatten_into(object, "", out);
  return out;
}

json unflatten(const Flat& flat) {
  json out = json::object();
  for (const auto& [key, value] : flat) {
    json* node = &out;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
      node = &(*node)[key.substr(start, dot - start)];
      start = dot + 1;
    }
    (*node)[key.substr(start)] = value;
  }
  return out;
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

std::string env_name(const std::string& key) {
  std::string s = "UNISCALE_";
  for (char c : key) s += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

json parse_value(const std::string& key, const std::string& text, const json& like) {
  auto fail = [&] {
    return ConfigError("setting \"" + key + "\": expected " + type_name(like) + ", got \"" + text + "\"");
  };
  if (like.is_string()) return text;
  if (like.is_boolean()) {
    if (text == "true" || text == "1" || text == "on") return true;
    if (text == "false" || text == "0" || text == "off") return false;
    throw fail();
  }
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (like.is_number_unsigned()) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw fail();
    return v;
  }
  if (like.is_number_integer()) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw fail();
    return v;
  }
  if (like.is_number_float()) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw fail();
    return v;
  }
  try {
    return coerce(key, json::parse(text), like);
  } catch (const json::parse_error&) {
    throw fail();
  }
}

ResolvedConfig resolve_config(const json& defaults, const ConfigLayers& layers) {
  Flat flat = flatten(defaults);
  ResolvedConfig out;
  auto check_key = [&](const std::string& key) {
    if (!flat.contains(key)) throw ConfigError("unknown config key \"" + key + "\"");
  };
  if (layers.file) {
    if (!layers.file->is_object()) throw ConfigError("config file: expected a JSON object");
    for (const auto& [key, value] : flatten(*layers.file)) {
      check_key(key);
      flat[key] = coerce(key, value, flat.at(key));
      out.explicit_keys.insert(key);
    }
  }
  for (const auto* layer : {&layers.env, &layers.flags}) {
    for (const auto& [key, text] : *layer) {
      check_key(key);
      flat[key] = parse_value(key, text, flat.at(key));
      out.explicit_keys.insert(key);
    }
  }
  out.config = unflatten(flat);
  return out;
}

std::map<std::string, std::string> read_env(const json& defaults,
                                            const std::function<const char*(const char*)>& getenv) {
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : flatten(defaults)) {
    if (const char* v = getenv(env_name(key).c_str())) out[key] = v;
  }
  return out;
}

}  // namespace scalerecon::cli
