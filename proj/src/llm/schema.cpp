// SPDX-License-Identifier: Apache-2.0

#include "gar/llm/schema.hpp"

#include <sstream>

#include "gar/core/text.hpp"

namespace gar::llm {

Field Field::integer(std::string name, long long lo, long long hi) {
  Field f;
  f.name = std::move(name);
  f.kind = FieldKind::IntegerRange;
  f.lo = lo;
  f.hi = hi;
  return f;
}

Field Field::enumeration(std::string name, std::vector<std::string> values) {
  Field f;
  f.name = std::move(name);
  f.kind = FieldKind::Enum;
  f.values = std::move(values);
  return f;
}

Field Field::string(std::string name, bool non_empty) {
  Field f;
  f.name = std::move(name);
  f.kind = FieldKind::String;
  f.non_empty = non_empty;
  return f;
}

Field Field::string_list(std::string name) {
  Field f;
  f.name = std::move(name);
  f.kind = FieldKind::StringList;
  return f;
}

Field Field::object_list(std::string name, std::vector<Field> items) {
  Field f;
  f.name = std::move(name);
  f.kind = FieldKind::ObjectList;
  f.item_fields = std::move(items);
  return f;
}

Field Field::positive_number(std::string name) {
  Field f;
  f.name = std::move(name);
  f.kind = FieldKind::PositiveNumber;
  return f;
}

Field Field::optional() && {
  required = false;
  return std::move(*this);
}

namespace {

void describe(const std::vector<Field>& fields, std::ostringstream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const auto& f : fields) {
    os << pad << "\"" << f.name << "\": ";
    switch (f.kind) {
      case FieldKind::IntegerRange: os << "integer from " << f.lo << " to " << f.hi; break;
      case FieldKind::Enum: {
        os << "one of ";
        for (std::size_t i = 0; i < f.values.size(); ++i) os << (i ? ", " : "") << "\"" << f.values[i] << "\"";
        break;
      }
      case FieldKind::String: os << "string"; break;
      case FieldKind::StringList: os << "list of strings"; break;
      case FieldKind::PositiveNumber: os << "positive number"; break;
      case FieldKind::ObjectList:
        os << "list of objects with fields:\n";
        describe(f.item_fields, os, indent + 2);
        continue;
    }
    if (!f.required) os << " (optional)";
    os << "\n";
  }
}

std::optional<std::string> check_fields(const std::vector<Field>& fields, const nlohmann::json& obj,
                                        const std::string& prefix) {
  if (!obj.is_object()) return prefix + ": expected a JSON object";
  for (const auto& f : fields) {
    const std::string path = prefix.empty() ? f.name : prefix + "." + f.name;
    const auto it = obj.find(f.name);
    if (it == obj.end() || it->is_null()) {
      if (f.required) return path + ": missing";
      continue;
    }
    const nlohmann::json& v = *it;
    switch (f.kind) {
      case FieldKind::IntegerRange: {
        if (!v.is_number_integer()) return path + ": expected an integer";
        const long long x = v.get<long long>();
        if (x < f.lo || x > f.hi) {
          return path + ": " + std::to_string(x) + " outside [" + std::to_string(f.lo) + ", " + std::to_string(f.hi) +
                 "]";
        }
        break;
      }
      case FieldKind::Enum: {
        if (!v.is_string()) return path + ": expected a string";
        const auto s = v.get<std::string>();
        bool ok = false;
        for (const auto& allowed : f.values) ok = ok || allowed == s;
        if (!ok) return path + ": \"" + s + "\" is not an allowed value";
        break;
      }
      case FieldKind::String:
        if (!v.is_string()) return path + ": expected a string";
        if (f.non_empty && text::trim(v.get<std::string>()).empty()) return path + ": must be non-empty";
        break;
      case FieldKind::StringList:
        if (!v.is_array()) return path + ": expected a list";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!v[i].is_string()) return path + "[" + std::to_string(i) + "]: expected a string";
        }
        break;
      case FieldKind::PositiveNumber:
        if (!v.is_number()) return path + ": expected a number";
        if (!(v.get<double>() > 0.0)) return path + ": must be positive";
        break;
      case FieldKind::ObjectList:
        if (!v.is_array()) return path + ": expected a list";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (auto err = check_fields(f.item_fields, v[i], path + "[" + std::to_string(i) + "]")) return err;
        }
        break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string OutputSchema::instructions() const {
  std::ostringstream os;
  os << "Respond with a single JSON object and nothing else. Fields:\n";
  describe(required_fields, os, 2);
  return os.str();
}

std::optional<std::string> OutputSchema::violation(const StructuredValue& value) const {
  return check_fields(required_fields, value, "");
}

std::optional<StructuredValue> parse_json_object(const std::string& raw, std::string* error) {
  std::string body = text::trim(raw);
  if (body.rfind("```", 0) == 0) {
    const std::size_t first_nl = body.find('\n');
    const std::size_t last_fence = body.rfind("```");
    if (first_nl != std::string::npos && last_fence > first_nl) {
      body = text::trim(body.substr(first_nl + 1, last_fence - first_nl - 1));
    }
  }
  auto parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    if (error) *error = "response is not valid JSON";
    return std::nullopt;
  }
  if (!parsed.is_object()) {
    if (error) *error = "response is not a JSON object";
    return std::nullopt;
  }
  return parsed;
}

}  // namespace gar::llm
