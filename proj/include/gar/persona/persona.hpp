// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gar/ingest/corpus.hpp"
#include "json.hpp"

namespace gar::llm {
class Gateway;
}

namespace gar::persona {

enum class Level { Low, Medium, High };

std::string to_string(Level level);
std::optional<Level> parse_level(const std::string& s);

enum class Trait { Strictness, EvidenceFocus, OpenMindedness, Tone, TechnicalFocus, EthicFocus };

inline constexpr std::array<Trait, 6> kTraits{Trait::Strictness,  Trait::EvidenceFocus,  Trait::OpenMindedness,
                                              Trait::Tone,        Trait::TechnicalFocus, Trait::EthicFocus};

std::string to_string(Trait trait);  // "strictness", "evidence_focus", ...
std::optional<Trait> parse_trait(const std::string& s);
/// Comparison prompt used to judge the trait.
const char* comparison_template(Trait trait);

enum class Provenance { Historical, Random };

struct ReviewerPersona {
  std::string reviewer_id;
  std::map<Trait, Level> levels;  // all six traits
  int expertise = 3;              // 1..5
  std::vector<std::string> focus_areas;
  std::map<Trait, double> raw_scores;  // present iff historical
  Provenance provenance = Provenance::Historical;

  bool operator==(const ReviewerPersona&) const = default;
  Level level(Trait t) const { return levels.at(t); }
};

struct ComparisonSample {
  std::string target_review;
  std::vector<std::string> anchor_reviews;
  std::string other_review;
};

struct PersonaOptions {
  int comparisons = 20;  // N
  std::uint64_t seed = 7;
  int max_focus_areas = 5;
  int workers = 4;
};

/// The reviewer's most recent review (highest paper year, later corpus
/// position on ties). Throws PreconditionViolation if the reviewer has none.
const ingest::ReviewRecord& target_review(const std::string& reviewer_id, const std::vector<ingest::PaperRecord>& corpus);

/// N comparison samples for the reviewer: anchors are the other reviews of the
/// target's paper; opponents are drawn uniformly without replacement from
/// reviews of other papers by other reviewers. Throws InsufficientCorpus(N).
std::vector<ComparisonSample> sample_comparisons(const std::string& reviewer_id,
                                                 const std::vector<ingest::PaperRecord>& corpus, int n,
                                                 std::uint64_t seed);

/// Fraction of samples where the judge prefers the target for the trait.
double judge_comparisons(const std::vector<ComparisonSample>& samples, Trait trait, llm::Gateway& gateway);

/// Contrastive trait score in [0, 1]: judge_comparisons over sample_comparisons.
double contrastive_trait_score(const std::string& reviewer_id, Trait trait,
                               const std::vector<ingest::PaperRecord>& corpus, llm::Gateway& gateway, int n,
                               std::uint64_t seed);

/// Linear-interpolation percentile (p in [0, 100]) of a non-empty sample.
double percentile(std::vector<double> values, double p);

/// low if score < P33, high if score > P67, medium otherwise. Ties with either
/// cut point fall in the middle band.
Level bin_trait(double score, const std::vector<double>& corpus_scores);

/// Half-up rounded mean confidence. Throws EmptyList; values must be 1..5.
int expertise_from_confidence(const std::vector<int>& confidences);

/// Lowercased, deduplicated keywords from a semicolon-separated answer,
/// truncated to `max_items`.
std::vector<std::string> parse_focus_areas(const std::string& answer, int max_items);

/// Focus keywords via the focus prompt. `reviews` must be non-empty.
std::vector<std::string> extract_focus_areas(const std::vector<std::string>& reviews, llm::Gateway& gateway,
                                             int max_items = 5);

/// Historical personas for `reviewer_ids` (every reviewer in the corpus when
/// empty). Trait levels are binned against the raw scores of the reviewers
/// being built.
std::map<std::string, ReviewerPersona> build_personas(const std::vector<ingest::PaperRecord>& corpus,
                                                      llm::Gateway& gateway, const PersonaOptions& options = {},
                                                      const std::vector<std::string>& reviewer_ids = {});

/// Persona with every attribute drawn uniformly under the seed.
ReviewerPersona random_persona(const std::string& reviewer_id, std::uint64_t seed);

void to_json(nlohmann::json& j, const ReviewerPersona& p);
void from_json(const nlohmann::json& j, ReviewerPersona& p);

}  // namespace gar::persona
