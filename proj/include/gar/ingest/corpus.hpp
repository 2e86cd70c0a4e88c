// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gar/ingest/manuscript.hpp"

namespace gar::ingest {

enum class Decision { AcceptOral, AcceptPoster, Reject };

std::string to_string(Decision d);
/// Accepts "accept_oral" | "accept_poster" | "reject".
std::optional<Decision> parse_decision(const std::string& s);

struct ReviewRecord {
  std::string paper_id;
  std::string reviewer_id;
  std::string text;
  int soundness = 1;     // 1..4
  int presentation = 1;  // 1..4
  int contribution = 1;  // 1..4
  int overall = 1;       // 1..10
  int confidence = 1;    // 1..5

  bool operator==(const ReviewRecord&) const = default;
};

struct PaperRecord {
  Manuscript manuscript;
  std::string markdown;
  std::vector<ReviewRecord> reviews;
  std::optional<std::string> meta_review_text;
  std::optional<Decision> decision;
};

/// Parses one corpus line. `line_no` is only used in error details.
PaperRecord parse_paper_record(const std::string& line, int line_no, const ChunkingOptions& options = {});

/// Loads a JSONL corpus. Throws Io, MalformedLine(n) or ScoreOutOfRange(n, field).
std::vector<PaperRecord> load_corpus(const std::string& path, const ChunkingOptions& options = {});

/// Corpus used as evaluation ground truth: every record needs a decision
/// (MissingDecision(n)) and at least `min_reviews` reviews.
std::vector<PaperRecord> load_ground_truth(const std::string& path, std::size_t min_reviews = 3,
                                           const ChunkingOptions& options = {});

nlohmann::json to_corpus_json(const PaperRecord& record);

void to_json(nlohmann::json& j, const ReviewRecord& r);

}  // namespace gar::ingest
