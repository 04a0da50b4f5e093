#pragma once

// Minimal JSON Schema checker for the subset used by docs/schemas: type,
// properties, required, additionalProperties=false, items, enum, minimum,
// maximum, exclusiveMinimum, minItems, minLength, pattern.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <regex>
#include <string>
#include <vector>

namespace testing_schema {

using nlohmann::json;

inline json load_schema(const std::string& name) {
  std::ifstream in(std::filesystem::path(COVERGEN_SCHEMA_DIR) / name);
  if (!in) throw std::runtime_error("schema not found: " + name);
  return json::parse(in);
}

inline bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

inline void check(const json& v, const json& s, const std::string& at, std::vector<std::string>& errors) {
  if (const auto t = s.find("type"); t != s.end()) {
    bool ok = false;
    if (t->is_string()) ok = has_type(v, *t);
    else for (const auto& alt : *t) ok = ok || has_type(v, alt);
    if (!ok) {
      errors.push_back(at + ": expected type " + t->dump());
      return;
    }
  }
  if (const auto e = s.find("enum"); e != s.end() && std::find(e->begin(), e->end(), v) == e->end())
    errors.push_back(at + ": not in enum");
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) errors.push_back(at + ": below minimum");
    if (s.contains("maximum") && x > s["maximum"].get<double>()) errors.push_back(at + ": above maximum");
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
      errors.push_back(at + ": not above exclusiveMinimum");
  }
  if (v.is_string()) {
    const auto str = v.get<std::string>();
    if (s.contains("minLength") && str.size() < s["minLength"].get<std::size_t>()) errors.push_back(at + ": too short");
    if (s.contains("pattern") && !std::regex_search(str, std::regex(s["pattern"].get<std::string>())))
      errors.push_back(at + ": pattern mismatch");
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) errors.push_back(at + ": too few items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], at + "[" + std::to_string(i) + "]", errors);
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s["required"])
        if (!v.contains(r.get<std::string>())) errors.push_back(at + ": missing " + r.get<std::string>());
    const json props = s.value("properties", json::object());
    for (const auto& [key, value] : v.items()) {
      if (props.contains(key)) check(value, props[key], at + "." + key, errors);
      else if (s.contains("additionalProperties") && s["additionalProperties"] == false)
        errors.push_back(at + ": unexpected property " + key);
    }
  }
}

/// Empty on success, else one line per violation.
inline std::vector<std::string> validate(const json& value, const std::string& schema_name) {
  std::vector<std::string> errors;
  check(value, load_schema(schema_name), "$", errors);
  return errors;
}

}  // namespace testing_schema
