// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace gar::llm {

using StructuredValue = nlohmann::json;

enum class FieldKind { IntegerRange, Enum, String, StringList, ObjectList, PositiveNumber };

struct Field {
  std::string name;
  FieldKind kind = FieldKind::String;
  long long lo = 0;  // IntegerRange, inclusive
  long long hi = 0;  // IntegerRange, inclusive
  std::vector<std::string> values;  // Enum
  std::vector<Field> item_fields;   // ObjectList
  bool required = true;
  bool non_empty = false;  // String: reject "" / whitespace-only

  static Field integer(std::string name, long long lo, long long hi);
  static Field enumeration(std::string name, std::vector<std::string> values);
  static Field string(std::string name, bool non_empty = false);
  static Field string_list(std::string name);
  static Field object_list(std::string name, std::vector<Field> items);
  static Field positive_number(std::string name);
  Field optional() &&;
};

struct OutputSchema {
  std::string schema_id;
  std::vector<Field> required_fields;

  /// Human-readable JSON shape description appended to prompts.
  std::string instructions() const;

  /// std::nullopt when `value` satisfies every field; otherwise the first
  /// violation as a path-qualified message.
  std::optional<std::string> violation(const StructuredValue& value) const;
};

/// Extracts a JSON object from raw model output. Tolerates a surrounding
/// markdown code fence and nothing else. Returns the parse error on failure.
std::optional<StructuredValue> parse_json_object(const std::string& raw, std::string* error);

}  // namespace gar::llm
