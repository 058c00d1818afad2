#pragma once

// Small JSON-Schema checker covering the subset used by
// data/report.schema.json: type (single or list), enum, required,
// properties, additionalProperties (boolean), items.

#include <string>
#include <vector>

#include "json.hpp"

namespace testsupport {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

inline void validate_schema(const nlohmann::json& value, const nlohmann::json& schema,
                            const std::string& path, std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(value, t.get<std::string>());
    } else {
      for (const auto& alt : t)
        if (type_matches(value, alt.get<std::string>())) ok = true;
    }
    if (!ok) errors.push_back(path + ": type mismatch (got " + std::string(value.type_name()) + ")");
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& alt : schema["enum"])
      if (value == alt) ok = true;
    if (!ok) errors.push_back(path + ": value not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& name : schema["required"])
        if (!value.contains(name.get<std::string>()))
          errors.push_back(path + ": missing required field '" + name.get<std::string>() + "'");
    const bool closed = schema.contains("additionalProperties") &&
                        schema["additionalProperties"].is_boolean() &&
                        !schema["additionalProperties"].get<bool>();
    for (const auto& [key, sub] : value.items()) {
      if (schema.contains("properties") && schema["properties"].contains(key)) {
        validate_schema(sub, schema["properties"][key], path + "." + key, errors);
      } else if (closed) {
        errors.push_back(path + ": unexpected field '" + key + "'");
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& item : value) {
      validate_schema(item, schema["items"], path + "[" + std::to_string(i) + "]", errors);
      ++i;
    }
  }
}

inline std::vector<std::string> schema_errors(const nlohmann::json& value,
                                              const nlohmann::json& schema) {
  std::vector<std::string> errors;
  validate_schema(value, schema, "$", errors);
  return errors;
}

}  // namespace testsupport
