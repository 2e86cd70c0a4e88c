// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gar/core/error.hpp"
#include "gar/ingest/corpus.hpp"
#include "gar/llm/backend.hpp"
#include "gar/llm/embedding.hpp"
#include "gar/llm/rate_limiter.hpp"

namespace gar::llm {
class Gateway;
}

namespace gar::novelty {

struct PriorWorkCandidate {
  std::string id;
  std::string title;
  std::string abstract;
  std::string introduction;  // may be empty
  int year = 0;

  bool operator==(const PriorWorkCandidate&) const = default;
};

struct NoveltyAssessment {
  int score = 1;  // 1 (not novel) .. 4 (highly novel)
  std::string explanation;
  std::vector<std::string> cited_candidate_ids;

  bool operator==(const NoveltyAssessment&) const = default;
};

/// Lowercase search phrases from the introduction, at most `max_keywords`.
/// The manuscript needs at least one section.
std::vector<std::string> extract_novelty_keywords(const ingest::Manuscript& m, llm::Gateway& gateway,
                                                  int max_keywords = 10);

/// Exact cosine index over title + abstract embeddings of corpus papers.
class LocalPriorIndex {
 public:
  static LocalPriorIndex build(const std::vector<ingest::PaperRecord>& corpus, llm::Gateway& gateway);

  /// Candidates with year < target_year by descending similarity to the
  /// keyword query (ties by id).
  std::vector<PriorWorkCandidate> search(const std::vector<std::string>& keywords, int target_year,
                                         std::size_t max_candidates, llm::Gateway& gateway) const;
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<std::pair<PriorWorkCandidate, llm::EmbeddingVector>> items_;
};

/// JSON-over-HTTP scholarly search: POST {query, limit, year_lt}; the reply
/// is a list (or {"data": list}) of {id, title, abstract, year}.
class ExternalSearchClient {
 public:
  ExternalSearchClient(llm::HttpEndpoint endpoint, double requests_per_minute = 0.0);
  /// Reads GAR_SEARCH_URL and GAR_SEARCH_KEY; nullptr when the URL is unset.
  static std::unique_ptr<ExternalSearchClient> from_env(double requests_per_minute = 0.0);

  /// Throws SourceUnavailable on transport, HTTP or format errors.
  std::vector<PriorWorkCandidate> search(const std::string& query, int year_lt, std::size_t limit);

 private:
  llm::HttpEndpoint endpoint_;
  llm::TokenBucket limiter_;
};

/// Prior work for the keywords, strictly older than target_year, at most
/// max_candidates. Uses the external client when given and falls back to the
/// local index (with a warning) when it is unavailable. Throws EmptyQuery.
std::vector<PriorWorkCandidate> search_prior_work(const std::vector<std::string>& keywords, int target_year,
                                                  const LocalPriorIndex& local, llm::Gateway& gateway,
                                                  ExternalSearchClient* external = nullptr,
                                                  std::size_t max_candidates = 10, Diagnostics* diag = nullptr);

/// Scored novelty judgment. Citations outside `candidates` are dropped with a warning.
NoveltyAssessment assess_novelty(const ingest::Manuscript& m, const std::vector<PriorWorkCandidate>& candidates,
                                 const ingest::AcronymTable& acronyms, llm::Gateway& gateway,
                                 Diagnostics* diag = nullptr);

void to_json(nlohmann::json& j, const PriorWorkCandidate& c);
void from_json(const nlohmann::json& j, PriorWorkCandidate& c);
void to_json(nlohmann::json& j, const NoveltyAssessment& a);
void from_json(const nlohmann::json& j, NoveltyAssessment& a);

}  // namespace gar::novelty
