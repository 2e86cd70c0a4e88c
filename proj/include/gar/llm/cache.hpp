// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "json.hpp"

namespace gar::llm {

/// Response cache: a concurrent map, optionally mirrored to an append-only
/// JSONL file under `dir`. Last writer wins on identical keys.
class ResponseCache {
 public:
  ResponseCache() = default;
  /// Loads `dir/cache.jsonl` when present and appends new entries to it.
  explicit ResponseCache(std::string dir);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& value);
  std::size_t size() const;
  bool persistent() const { return !file_.empty(); }

  /// sha256 over NUL-joined parts.
  static std::string key(std::initializer_list<std::string_view> parts);

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, nlohmann::json> entries_;
  std::string file_;
};

}  // namespace gar::llm
