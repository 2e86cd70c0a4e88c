// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gar/ingest/corpus.hpp"
#include "gar/memory/memory.hpp"
#include "gar/review/review.hpp"

namespace gar::llm {
class Gateway;
}

namespace gar::meta {

enum class Mode { Agentic, Threshold };

struct MetaReview {
  std::string summary;
  ingest::Decision decision = ingest::Decision::Reject;
  std::vector<std::string> turn_summaries;
  std::vector<std::string> retrieved_meta_ids;
  Mode mode = Mode::Agentic;

  bool operator==(const MetaReview&) const = default;
};

/// Arithmetic mean of overall scores. Throws EmptyCommittee.
double mean_score(const std::vector<review::Review>& reviews);

/// accept_poster when the mean overall score is at least `threshold`,
/// otherwise reject. Never calls a model.
MetaReview threshold_meta(const std::vector<review::Review>& reviews, double threshold = 6.0);

enum class Binary { Accept, Reject };
Binary to_binary(ingest::Decision d);
std::string to_string(Binary b);

struct AgenticOptions {
  int exemplars = 5;  // K2
  int turns = 2;      // T
  double tau = 0.8;
};

/// T reflection turns, each seeing the previous summaries, the retrieved
/// meta-reviews and every final review, then one decision call. An empty
/// meta-memory renders no exemplars and records a warning.
MetaReview agentic_meta(const std::vector<review::Review>& reviews, const memory::MetaMemory& meta_memory,
                        const std::vector<llm::EmbeddingVector>& paper_signature,
                        const std::optional<std::string>& paper_id, const AgenticOptions& options,
                        llm::Gateway& gateway, Diagnostics* diag = nullptr);

/// Final reviews as shown to the meta-reviewer.
std::string render_committee(const std::vector<review::Review>& reviews);

void to_json(nlohmann::json& j, const MetaReview& m);
void from_json(const nlohmann::json& j, MetaReview& m);

}  // namespace gar::meta
