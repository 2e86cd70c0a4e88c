// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>

#include "gar/llm/gateway.hpp"
#include "gar/pipeline/config.hpp"
#include "json.hpp"

namespace gar::pipeline {

/// Gateway for the configured backend: the synthetic scripted backend (plus
/// optional fixture lines) or the HTTP backends configured through the
/// environment.
std::unique_ptr<llm::Gateway> make_gateway(const Config& c);

struct RunManifest {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string chat_backend;
  std::string chat_model;
  std::string embedding_model;
  std::map<std::string, std::string> inputs;     // path -> sha256
  std::map<std::string, std::string> artifacts;  // path relative to output_dir -> sha256
  std::map<std::string, std::string> decisions;  // paper_id -> decision
  std::map<std::string, double> timings;         // phase -> seconds
  std::size_t backend_requests = 0;
  std::size_t cache_hits = 0;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const RunManifest& m);

/// Graph construction, reviewer selection, reviewer evaluation and
/// meta-review for every target paper, followed by classification metrics
/// when every target has a decision. Artifacts already present in the output
/// directory (graphs, personas, memory, novelty, review rounds) are reused, so
/// a failed run resumes where it stopped. Writes <output_dir>/manifest.json.
RunManifest run_pipeline(const Config& c, llm::Gateway& gateway);

/// sha256 of every file under `dir` except the cache directory and the
/// manifest, keyed by relative path.
std::map<std::string, std::string> hash_artifacts(const std::string& dir);

}  // namespace gar::pipeline
