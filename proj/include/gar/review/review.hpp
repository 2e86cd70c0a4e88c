// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "gar/graph/paper_graph.hpp"
#include "gar/llm/schema.hpp"
#include "gar/memory/memory.hpp"
#include "gar/novelty/novelty.hpp"
#include "gar/persona/persona.hpp"

namespace gar::llm {
class Gateway;
}

namespace gar::review {

struct Review {
  std::string reviewer_id;
  int round = 0;
  int soundness = 1;     // 1..4
  int presentation = 1;  // 1..4
  int contribution = 1;  // 1..4
  int overall = 1;       // 1..10
  int confidence = 1;    // 1..5
  std::vector<std::string> strengths;
  std::vector<std::string> weaknesses;
  std::vector<std::string> suggestions;
  std::string summary;
  std::string decision;  // "accept" | "reject"
  std::string rationale;

  bool operator==(const Review&) const = default;
};

const llm::OutputSchema& review_schema();

/// Review from a schema-valid value. Lists longer than max_items are truncated.
Review review_from_value(const nlohmann::json& value, const std::string& reviewer_id, int round, int max_items);

/// Plain-text rendering passed to later prompts.
std::string render_review(const Review& r);

struct RoundPlan {
  std::vector<std::vector<int>> blocks;  // community ids per round
};

/// Balanced blocks in community-id order: sizes differ by at most one and the
/// first |C| mod K blocks get the extra descriptor. Empty blocks are dropped,
/// so fewer descriptors than rounds gives one singleton block each. Throws KZero.
RoundPlan plan_rounds(const std::vector<int>& descriptor_ids, int k);

/// Persona segment of the initial prompt.
std::string render_style(const persona::ReviewerPersona& p, llm::Gateway& gateway);

Review initial_review(const persona::ReviewerPersona& p, const graph::PaperGraph& g,
                      const novelty::NoveltyAssessment& nov, llm::Gateway& gateway, int max_items = 10);

struct RetrievedPair {
  std::string paper_id;
  int community_id = 0;
  std::string descriptor_text;
  std::string review_snippet;
  double similarity = 0.0;
};

struct DescriptorRetrieval {
  int community_id = 0;
  std::vector<RetrievedPair> pairs;  // similarity descending
};

using RetrievalBundle = std::vector<DescriptorRetrieval>;

/// Top-M memory pairs for each descriptor of the block (none from the paper
/// itself). An empty memory yields empty lists.
RetrievalBundle retrieve_for_block(const graph::PaperGraph& g, const std::vector<int>& block,
                                   const memory::MemoryIndex& index, int m, llm::Gateway& gateway);

/// "Idea i / Most Similar Claims / Similar Claim j / Reviewer comment" layout.
std::string render_prompt_block(const graph::PaperGraph& g, const std::vector<int>& block,
                                const RetrievalBundle& bundle);

/// Round k = prev.round + 1. The bundle must cover exactly the block.
Review refine_round(const Review& initial, const Review& prev, const graph::PaperGraph& g,
                    const std::vector<int>& block, const RetrievalBundle& bundle, llm::Gateway& gateway,
                    int max_items = 10);

struct ReviewerOptions {
  int rounds = 3;           // K
  int retrieved = 3;        // M
  int max_items = 10;
  std::string transcript_dir;  // empty: no persistence
};

struct ReviewerRun {
  Review final_review;
  std::vector<Review> transcript;  // rounds 0..K without gaps
};

/// Initial review plus one refinement per planned block. With a transcript
/// directory each round is written to <dir>/round_<k>.json and existing
/// rounds are loaded instead of recomputed.
ReviewerRun run_reviewer(const persona::ReviewerPersona& p, const graph::PaperGraph& g,
                         const novelty::NoveltyAssessment& nov, const memory::MemoryIndex& index,
                         const ReviewerOptions& options, llm::Gateway& gateway);

inline constexpr int kMinCommittee = 3;
inline constexpr int kMaxCommittee = 6;

/// Independent reviewers run in parallel; transcripts go to
/// <transcript_dir>/<reviewer_id>/. Throws CommitteeSizeOutOfRange.
std::vector<ReviewerRun> run_committee(const std::vector<persona::ReviewerPersona>& personas,
                                       const graph::PaperGraph& g, const novelty::NoveltyAssessment& nov,
                                       const memory::MemoryIndex& index, const ReviewerOptions& options,
                                       llm::Gateway& gateway, int workers = 4);

void to_json(nlohmann::json& j, const Review& r);
void from_json(const nlohmann::json& j, Review& r);

}  // namespace gar::review
