// SPDX-License-Identifier: Apache-2.0

#include "gar/pipeline/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <functional>
#include <sstream>

#include "gar/core/error.hpp"
#include "gar/review/review.hpp"

namespace gar::pipeline {

namespace {

namespace fs = std::filesystem;

struct Key {
  const char* section;
  const char* name;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

template <typename T>
T parse_number(const std::string& s, const std::string& key) {
  std::istringstream is(s);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) throw Error(Errc::InvalidConfig, "invalid value for " + key + ": " + s, {{"key", key}});
  return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(Errc::InvalidConfig, "invalid boolean for " + key + ": " + s, {{"key", key}});
}

#define GAR_STR(sec, key, field)                                               \
  Key{sec, key, [](Config& c, const std::string& v) { c.field = v; },           \
      [](const Config& c) { return c.field; }}
#define GAR_NUM(sec, key, field, T)                                                                         \
  Key{sec, key, [](Config& c, const std::string& v) { c.field = parse_number<T>(v, sec "." key); },           \
      [](const Config& c) { return fmt_double(static_cast<double>(c.field)); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      GAR_STR("run", "corpus", corpus),
      GAR_STR("run", "targets", targets),
      GAR_STR("run", "output_dir", output_dir),
      Key{"run", "seed", [](Config& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(v, "run.seed"); },
          [](const Config& c) { return std::to_string(c.seed); }},
      GAR_NUM("run", "workers", workers, int),
      GAR_STR("run", "backend", backend),
      GAR_STR("run", "fixtures", fixtures),
      GAR_NUM("gateway", "repair_retries", gateway.repair_retries, int),
      GAR_NUM("gateway", "temperature_extraction", gateway.temperature_extraction, double),
      GAR_NUM("gateway", "temperature_prose", gateway.temperature_prose, double),
      GAR_NUM("gateway", "requests_per_minute", gateway.requests_per_minute, double),
      GAR_NUM("gateway", "rate_limit_retries", gateway.rate_limit_retries, int),
      GAR_NUM("gateway", "max_retry_after_seconds", gateway.max_retry_after_seconds, double),
      GAR_STR("gateway", "cache_dir", gateway.cache_dir),
      GAR_NUM("graph", "max_chunk_tokens", max_chunk_tokens, int),
      GAR_NUM("graph", "leiden_restarts", leiden_restarts, int),
      GAR_NUM("graph", "resolution", resolution, double),
      GAR_NUM("memory", "retrieved", retrieved, int),
      GAR_NUM("memory", "tau", tau, double),
      GAR_STR("persona", "mode", persona_mode),
      GAR_NUM("persona", "comparisons", comparisons, int),
      GAR_NUM("persona", "committee_size", committee_size, int),
      GAR_NUM("persona", "max_focus_areas", max_focus_areas, int),
      GAR_NUM("novelty", "max_keywords", max_keywords, int),
      GAR_NUM("novelty", "max_candidates", max_candidates, int),
      Key{"novelty", "external_search",
          [](Config& c, const std::string& v) { c.external_search = parse_bool(v, "novelty.external_search"); },
          [](const Config& c) { return std::string(c.external_search ? "true" : "false"); }},
      GAR_NUM("review", "rounds", rounds, int),
      GAR_NUM("review", "max_items", max_items, int),
      GAR_STR("meta", "mode", meta_mode),
      GAR_NUM("meta", "exemplars", exemplars, int),
      GAR_NUM("meta", "turns", turns, int),
      GAR_NUM("meta", "threshold", threshold, double),
      GAR_NUM("meta", "tau", meta_tau, double),
      GAR_NUM("eval", "min_reviews", min_reviews, int),
  };
  return k;
}

#undef GAR_STR
#undef GAR_NUM

void invalid(const std::string& what) { throw Error(Errc::InvalidConfig, what); }

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

}  // namespace

void validate(const Config& c) {
  if (c.committee_size < review::kMinCommittee || c.committee_size > review::kMaxCommittee) {
    throw Error(Errc::CommitteeSizeOutOfRange,
                "committee size " + std::to_string(c.committee_size) + " outside [3, 6]",
                {{"committee_size", c.committee_size}});
  }
  if (c.rounds < 1) throw Error(Errc::KZero, "review.rounds must be at least 1");
  if (c.backend != "scripted" && c.backend != "http") invalid("run.backend must be scripted or http");
  if (c.persona_mode != "historical" && c.persona_mode != "random") invalid("persona.mode must be historical or random");
  if (c.meta_mode != "agentic" && c.meta_mode != "threshold") invalid("meta.mode must be agentic or threshold");
  if (c.workers < 1) invalid("run.workers must be at least 1");
  if (c.gateway.repair_retries < 0) invalid("gateway.repair_retries must be >= 0");
  if (c.gateway.requests_per_minute < 0) invalid("gateway.requests_per_minute must be >= 0");
  if (c.max_chunk_tokens < 1) invalid("graph.max_chunk_tokens must be positive");
  if (c.leiden_restarts < 1) invalid("graph.leiden_restarts must be positive");
  if (c.resolution <= 0) invalid("graph.resolution must be positive");
  if (c.retrieved < 1) invalid("memory.retrieved must be positive");
  if (c.tau < 0 || c.tau >= 1) invalid("memory.tau must lie in [0, 1)");
  if (c.meta_tau < 0 || c.meta_tau >= 1) invalid("meta.tau must lie in [0, 1)");
  if (c.comparisons < 1) invalid("persona.comparisons must be positive");
  if (c.max_focus_areas < 1) invalid("persona.max_focus_areas must be positive");
  if (c.max_keywords < 1 || c.max_candidates < 1) invalid("novelty limits must be positive");
  if (c.max_items < 1) invalid("review.max_items must be positive");
  if (c.exemplars < 0) invalid("meta.exemplars must be >= 0");
  if (c.turns < 0) invalid("meta.turns must be >= 0");
  if (c.min_reviews < 1) invalid("eval.min_reviews must be positive");
}

Config load_config(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(Errc::InvalidConfig, e.what(), {{"path", path}});
  }
  Config c;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) invalid("key " + section + " outside any section");
    for (const auto& [name, value] : entries) {
      const auto it = std::find_if(keys().begin(), keys().end(),
                                   [&](const Key& k) { return k.section == section && k.name == name; });
      if (it == keys().end()) {
        throw Error(Errc::InvalidConfig, "unknown config key " + section + "." + name,
                    {{"key", section + "." + name}});
      }
      it->set(c, value.data());
    }
  }
  const fs::path base = fs::absolute(path).parent_path();
  c.corpus = resolve(base, c.corpus);
  c.targets = resolve(base, c.targets);
  c.output_dir = resolve(base, c.output_dir);
  c.fixtures = resolve(base, c.fixtures);
  c.gateway.cache_dir = resolve(base, c.gateway.cache_dir);
  validate(c);
  return c;
}

std::string to_ini(const Config& c) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      section = k.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(c) + "\n";
  }
  return out;
}

nlohmann::json to_json(const Config& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : keys()) j[k.section][k.name] = k.get(c);
  return j;
}

Config config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) invalid("config snapshot is not an object");
  Config c;
  for (const auto& [section, entries] : j.items()) {
    if (!entries.is_object()) invalid("config section " + section + " is not an object");
    for (const auto& [name, value] : entries.items()) {
      const auto it = std::find_if(keys().begin(), keys().end(),
                                   [&](const Key& k) { return k.section == section && k.name == name; });
      if (it == keys().end() || !value.is_string()) invalid("unknown config key " + section + "." + name);
      it->set(c, value.get<std::string>());
    }
  }
  validate(c);
  return c;
}

}  // namespace gar::pipeline
