// Copyright 2026 The DP Consent Pipeline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "testing/schema_validator.h"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <stdexcept>

namespace dpconsent::testing {
namespace {

const std::set<std::string>& KnownKeywords() {
  static const std::set<std::string> k = {
      "$schema",  "$id",       "title",      "description",
      "$defs",    "$ref",      "type",       "enum",
      "const",    "properties", "required",  "additionalProperties",
      "propertyNames", "items", "minItems",  "maxItems",
      "minLength", "pattern",  "minimum",    "maximum",
      "exclusiveMinimum", "anyOf", "oneOf"};
  return k;
}

bool HasType(const nlohmann::json& v, const std::string& type) {
  if (type == "null") return v.is_null();
  if (type == "boolean") return v.is_boolean();
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && std::floor(d) == d;
  }
  throw std::invalid_argument("unknown schema type " + type);
}

}  // namespace

SchemaValidator::SchemaValidator(nlohmann::json schema)
    : root_(std::move(schema)) {}

const nlohmann::json& SchemaValidator::Resolve(const std::string& ref) const {
  const std::string prefix = "#/$defs/";
  if (ref.rfind(prefix, 0) != 0) {
    throw std::invalid_argument("unsupported $ref " + ref);
  }
  return root_.at("$defs").at(ref.substr(prefix.size()));
}

std::vector<std::string> SchemaValidator::Validate(
    const nlohmann::json& instance) const {
  std::vector<std::string> errors;
  Check(root_, instance, "", errors);
  return errors;
}

void SchemaValidator::Check(const nlohmann::json& s,
                            const nlohmann::json& v, const std::string& path,
                            std::vector<std::string>& errors) const {
  auto fail = [&](const std::string& msg) {
    errors.push_back((path.empty() ? "/" : path) + ": " + msg);
  };
  if (s.is_boolean()) {
    if (!s.get<bool>()) fail("no value allowed here");
    return;
  }
  for (const auto& [key, unused] : s.items()) {
    if (!KnownKeywords().count(key)) fail("unsupported keyword " + key);
  }
  if (s.contains("$ref")) {
    Check(Resolve(s["$ref"].get<std::string>()), v, path, errors);
  }
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok |= HasType(v, t.get<std::string>());
    } else {
      ok = HasType(v, s["type"].get<std::string>());
    }
    if (!ok) {
      fail("expected type " + s["type"].dump() + ", got " + v.dump());
      return;
    }
  }
  if (s.contains("const") && v != s["const"]) {
    fail("expected " + s["const"].dump() + ", got " + v.dump());
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found |= e == v;
    if (!found) fail(v.dump() + " not in " + s["enum"].dump());
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (s.contains("minimum") && d < s["minimum"].get<double>()) {
      fail(v.dump() + " < minimum " + s["minimum"].dump());
    }
    if (s.contains("maximum") && d > s["maximum"].get<double>()) {
      fail(v.dump() + " > maximum " + s["maximum"].dump());
    }
    if (s.contains("exclusiveMinimum") &&
        !(d > s["exclusiveMinimum"].get<double>())) {
      fail(v.dump() + " <= exclusiveMinimum " + s["exclusiveMinimum"].dump());
    }
  }
  if (v.is_string()) {
    const std::string str = v.get<std::string>();
    if (s.contains("minLength") &&
        str.size() < s["minLength"].get<size_t>()) {
      fail("string shorter than " + s["minLength"].dump());
    }
    if (s.contains("pattern") &&
        !std::regex_search(str, std::regex(s["pattern"].get<std::string>()))) {
      fail("'" + str + "' does not match " + s["pattern"].dump());
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<size_t>()) {
      fail("fewer than " + s["minItems"].dump() + " items");
    }
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<size_t>()) {
      fail("more than " + s["maxItems"].dump() + " items");
    }
    if (s.contains("items")) {
      for (size_t i = 0; i < v.size(); ++i) {
        Check(s["items"], v[i], path + "/" + std::to_string(i), errors);
      }
    }
  }
  if (v.is_object()) {
    if (s.contains("required")) {
      for (const auto& r : s["required"]) {
        if (!v.contains(r.get<std::string>())) {
          fail("missing required property " + r.dump());
        }
      }
    }
    const nlohmann::json* props =
        s.contains("properties") ? &s["properties"] : nullptr;
    for (const auto& [key, child] : v.items()) {
      const std::string child_path = path + "/" + key;
      if (s.contains("propertyNames")) {
        Check(s["propertyNames"], key, child_path, errors);
      }
      if (props != nullptr && props->contains(key)) {
        Check((*props)[key], child, child_path, errors);
      } else if (s.contains("additionalProperties")) {
        Check(s["additionalProperties"], child, child_path, errors);
      }
    }
  }
  if (s.contains("anyOf")) {
    bool any = false;
    for (const auto& option : s["anyOf"]) {
      std::vector<std::string> sub;
      Check(option, v, path, sub);
      any |= sub.empty();
    }
    if (!any) fail("matches no anyOf option: " + v.dump().substr(0, 120));
  }
  if (s.contains("oneOf")) {
    int matches = 0;
    for (const auto& option : s["oneOf"]) {
      std::vector<std::string> sub;
      Check(option, v, path, sub);
      matches += sub.empty();
    }
    if (matches != 1) {
      fail("matches " + std::to_string(matches) + " oneOf options");
    }
  }
}

SchemaValidator LoadSchema(const std::string& name) {
  const std::string path = std::string(DPCONSENT_SCHEMA_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema " + path);
  return SchemaValidator(nlohmann::json::parse(in));
}

}  // namespace dpconsent::testing
