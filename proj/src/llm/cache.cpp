// SPDX-License-Identifier: Apache-2.0

#include "gar/llm/cache.hpp"

#include <filesystem>
#include <fstream>

#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"

namespace gar::llm {

ResponseCache::ResponseCache(std::string dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  file_ = (std::filesystem::path(dir) / "cache.jsonl").string();
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    // A torn trailing line from an interrupted run is skipped.
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("value")) continue;
    entries_.insert_or_assign(j["key"].get<std::string>(), j["value"]);
  }
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const nlohmann::json& value) {
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(key, value);
  if (file_.empty()) return;
  std::ofstream out(file_, std::ios::app);
  if (!out) throw Error(Errc::Io, "cannot append to cache " + file_, {{"path", file_}});
  out << nlohmann::json{{"key", key}, {"value", value}}.dump() << "\n";
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string ResponseCache::key(std::initializer_list<std::string_view> parts) {
  std::string joined;
  for (auto p : parts) {
    joined.append(p);
    joined.push_back('\0');
  }
  return sha256_hex(joined);
}

}  // namespace gar::llm
