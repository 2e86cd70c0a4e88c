// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "gar/llm/gateway.hpp"
#include "json.hpp"

namespace gar::pipeline {

struct Config {
  // [run]
  std::string corpus;       // memory / persona corpus (JSONL)
  std::string targets;      // papers to review; empty = the corpus itself
  std::string output_dir = "gar-run";
  std::uint64_t seed = 42;
  int workers = 4;
  std::string backend = "scripted";  // scripted | http
  std::string fixtures;              // optional scripted fixture JSONL

  // [gateway]
  llm::GatewayConfig gateway;  // cache_dir empty = <output_dir>/cache

  // [graph]
  int max_chunk_tokens = 1200;
  int leiden_restarts = 10;
  double resolution = 1.0;

  // [memory]
  int retrieved = 3;   // M
  double tau = 0.8;

  // [persona]
  std::string persona_mode = "historical";  // historical | random
  int comparisons = 20;                     // N
  int committee_size = 3;
  int max_focus_areas = 5;

  // [novelty]
  int max_keywords = 10;
  int max_candidates = 10;
  bool external_search = false;

  // [review]
  int rounds = 3;  // K
  int max_items = 10;

  // [meta]
  std::string meta_mode = "agentic";  // agentic | threshold
  int exemplars = 5;                  // K2
  int turns = 2;                      // T
  double threshold = 6.0;
  double meta_tau = 0.8;

  // [eval]
  int min_reviews = 3;
};

/// Parses an INI file ([section] key = value). Unknown sections or keys and
/// unparsable values throw InvalidConfig; relative paths are resolved against
/// the file's directory. The result is validated.
Config load_config(const std::string& path);

/// Throws InvalidConfig, CommitteeSizeOutOfRange or KZero.
void validate(const Config& c);

/// Every setting as INI text, in the shipped-default layout.
std::string to_ini(const Config& c);

nlohmann::json to_json(const Config& c);
/// Inverse of to_json (used to replay a manifest's config snapshot).
Config config_from_json(const nlohmann::json& j);

}  // namespace gar::pipeline
