// SPDX-License-Identifier: Apache-2.0

#include "gar/persona/persona.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "gar/core/hash.hpp"
#include "gar/core/parallel.hpp"
#include "gar/core/text.hpp"
#include "gar/llm/gateway.hpp"

namespace gar::persona {

using nlohmann::json;

std::string to_string(Level level) {
  switch (level) {
    case Level::Low: return "low";
    case Level::Medium: return "medium";
    case Level::High: return "high";
  }
  return "medium";
}

std::optional<Level> parse_level(const std::string& s) {
  if (s == "low") return Level::Low;
  if (s == "medium") return Level::Medium;
  if (s == "high") return Level::High;
  return std::nullopt;
}

std::string to_string(Trait trait) {
  switch (trait) {
    case Trait::Strictness: return "strictness";
    case Trait::EvidenceFocus: return "evidence_focus";
    case Trait::OpenMindedness: return "open_mindedness";
    case Trait::Tone: return "tone";
    case Trait::TechnicalFocus: return "technical_focus";
    case Trait::EthicFocus: return "ethic_focus";
  }
  return "strictness";
}

std::optional<Trait> parse_trait(const std::string& s) {
  for (Trait t : kTraits) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

const char* comparison_template(Trait trait) {
  switch (trait) {
    case Trait::Strictness: return llm::tmpl::kCompare;
    case Trait::EvidenceFocus: return llm::tmpl::kCompareEvidence;
    case Trait::OpenMindedness: return llm::tmpl::kCompareOpen;
    case Trait::Tone: return llm::tmpl::kCompareTone;
    case Trait::TechnicalFocus: return llm::tmpl::kCompareTechnical;
    case Trait::EthicFocus: return llm::tmpl::kCompareEthic;
  }
  return llm::tmpl::kCompare;
}

const ingest::ReviewRecord& target_review(const std::string& reviewer_id,
                                          const std::vector<ingest::PaperRecord>& corpus) {
  const ingest::ReviewRecord* best = nullptr;
  int best_year = 0;
  for (const auto& paper : corpus) {
    for (const auto& r : paper.reviews) {
      if (r.reviewer_id != reviewer_id) continue;
      if (best == nullptr || paper.manuscript.year >= best_year) {
        best = &r;
        best_year = paper.manuscript.year;
      }
    }
  }
  if (best == nullptr) throw Error(Errc::PreconditionViolation, "reviewer " + reviewer_id + " has no reviews");
  return *best;
}

std::vector<ComparisonSample> sample_comparisons(const std::string& reviewer_id,
                                                 const std::vector<ingest::PaperRecord>& corpus, int n,
                                                 std::uint64_t seed) {
  require(n >= 1, "N >= 1");
  const ingest::ReviewRecord& target = target_review(reviewer_id, corpus);

  std::vector<std::string> anchors;
  std::vector<const std::string*> pool;
  for (const auto& paper : corpus) {
    for (const auto& r : paper.reviews) {
      if (r.paper_id == target.paper_id) {
        if (&r != &target) anchors.push_back(r.text);
      } else if (r.reviewer_id != reviewer_id) {
        pool.push_back(&r.text);
      }
    }
  }
  if (pool.size() < static_cast<std::size_t>(n)) {
    throw Error(Errc::InsufficientCorpus,
                "need " + std::to_string(n) + " foreign reviews, corpus has " + std::to_string(pool.size()),
                {{"n", n}, {"available", pool.size()}});
  }

  // Partial Fisher-Yates: the first n positions are a uniform sample without replacement.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  std::vector<ComparisonSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back({target.text, anchors, *pool[static_cast<std::size_t>(i)]});
  return out;
}

double judge_comparisons(const std::vector<ComparisonSample>& samples, Trait trait, llm::Gateway& gateway) {
  require(!samples.empty(), "at least one comparison sample");
  static const llm::OutputSchema schema{"comparison", {llm::Field::enumeration("preferred", {"target", "other"})}};
  int wins = 0;
  for (const auto& s : samples) {
    const std::string anchors = s.anchor_reviews.empty() ? "(none)" : text::join(s.anchor_reviews, "\n---\n");
    const auto prompt =
        gateway.render(comparison_template(trait), {{"target", s.target_review}, {"anchor", anchors}, {"other", s.other_review}});
    if (gateway.complete_structured(prompt, schema).at("preferred") == "target") ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(samples.size());
}

double contrastive_trait_score(const std::string& reviewer_id, Trait trait,
                               const std::vector<ingest::PaperRecord>& corpus, llm::Gateway& gateway, int n,
                               std::uint64_t seed) {
  return judge_comparisons(sample_comparisons(reviewer_id, corpus, n, seed), trait, gateway);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(Errc::EmptyList, "percentile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Level bin_trait(double score, const std::vector<double>& corpus_scores) {
  if (corpus_scores.empty()) throw Error(Errc::EmptyList, "binning needs corpus scores");
  if (score < percentile(corpus_scores, 33.0)) return Level::Low;
  if (score > percentile(corpus_scores, 67.0)) return Level::High;
  return Level::Medium;
}

int expertise_from_confidence(const std::vector<int>& confidences) {
  if (confidences.empty()) throw Error(Errc::EmptyList, "no confidence scores");
  long long sum = 0;
  for (int c : confidences) {
    require(c >= 1 && c <= 5, "confidence in 1..5");
    sum += c;
  }
  const auto n = static_cast<long long>(confidences.size());
  // floor(sum / n + 1/2) in integers.
  const long long rounded = (2 * sum + n) / (2 * n);
  return static_cast<int>(std::clamp<long long>(rounded, 1, 5));
}

std::vector<std::string> parse_focus_areas(const std::string& answer, int max_items) {
  std::vector<std::string> out;
  for (const auto& piece : text::split(answer, ';')) {
    const std::string kw = text::to_lower(text::squash_whitespace(piece));
    if (kw.empty() || std::find(out.begin(), out.end(), kw) != out.end()) continue;
    if (static_cast<int>(out.size()) == max_items) break;
    out.push_back(kw);
  }
  return out;
}

std::vector<std::string> extract_focus_areas(const std::vector<std::string>& reviews, llm::Gateway& gateway,
                                             int max_items) {
  require(!reviews.empty(), "at least one review");
  require(max_items >= 1, "max_focus_areas >= 1");
  static const llm::OutputSchema schema{"focus", {llm::Field::string("focus_areas", true)}};
  const auto prompt = gateway.render(llm::tmpl::kFocus,
                                     {{"max_items", std::to_string(max_items)}, {"reviews", text::join(reviews, "\n---\n")}});
  const auto value = gateway.complete_structured(prompt, schema);
  auto out = parse_focus_areas(value.at("focus_areas").get<std::string>(), max_items);
  if (out.empty()) throw Error(Errc::SchemaViolation, "focus answer has no keywords", {{"schema_id", "focus"}});
  return out;
}

std::map<std::string, ReviewerPersona> build_personas(const std::vector<ingest::PaperRecord>& corpus,
                                                      llm::Gateway& gateway, const PersonaOptions& options,
                                                      const std::vector<std::string>& reviewer_ids) {
  std::vector<std::string> ids = reviewer_ids;
  if (ids.empty()) {
    std::set<std::string> seen;
    for (const auto& paper : corpus) {
      for (const auto& r : paper.reviews) {
        if (seen.insert(r.reviewer_id).second) ids.push_back(r.reviewer_id);
      }
    }
  }
  std::map<std::string, ReviewerPersona> out;
  if (ids.empty()) return out;

  const std::size_t per = kTraits.size();
  std::vector<double> raw(ids.size() * per);
  parallel_for(raw.size(), options.workers, [&](std::size_t k) {
    const std::string& id = ids[k / per];
    const Trait trait = kTraits[k % per];
    const std::uint64_t seed = derive_seed(options.seed, "persona/" + id + "/" + to_string(trait));
    raw[k] = contrastive_trait_score(id, trait, corpus, gateway, options.comparisons, seed);
  });

  std::vector<std::vector<std::string>> focus(ids.size());
  parallel_for(ids.size(), options.workers, [&](std::size_t i) {
    std::vector<std::string> texts;
    for (const auto& paper : corpus) {
      for (const auto& r : paper.reviews) {
        if (r.reviewer_id == ids[i]) texts.push_back(r.text);
      }
    }
    focus[i] = extract_focus_areas(texts, gateway, options.max_focus_areas);
  });

  for (std::size_t t = 0; t < per; ++t) {
    std::vector<double> population;
    for (std::size_t i = 0; i < ids.size(); ++i) population.push_back(raw[i * per + t]);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ReviewerPersona& p = out[ids[i]];
      p.levels[kTraits[t]] = bin_trait(raw[i * per + t], population);
      p.raw_scores[kTraits[t]] = raw[i * per + t];
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ReviewerPersona& p = out[ids[i]];
    p.reviewer_id = ids[i];
    p.provenance = Provenance::Historical;
    std::vector<int> confidences;
    for (const auto& paper : corpus) {
      for (const auto& r : paper.reviews) {
        if (r.reviewer_id == ids[i]) confidences.push_back(r.confidence);
      }
    }
    p.expertise = expertise_from_confidence(confidences);
    p.focus_areas = std::move(focus[i]);
  }
  return out;
}

ReviewerPersona random_persona(const std::string& reviewer_id, std::uint64_t seed) {
  static const std::vector<std::string> kVocabulary{"clarity",          "technical depth",    "writing quality",
                                                    "novelty",          "experimental rigor", "reproducibility",
                                                    "theoretical soundness", "related work"};
  std::mt19937_64 rng(derive_seed(seed, "persona/random/" + reviewer_id));
  std::uniform_int_distribution<int> level(0, 2);
  ReviewerPersona p;
  p.reviewer_id = reviewer_id;
  p.provenance = Provenance::Random;
  for (Trait t : kTraits) p.levels[t] = static_cast<Level>(level(rng));
  p.expertise = std::uniform_int_distribution<int>(1, 5)(rng);
  std::vector<std::string> pool = kVocabulary;
  std::shuffle(pool.begin(), pool.end(), rng);
  const int k = std::uniform_int_distribution<int>(1, 3)(rng);
  p.focus_areas.assign(pool.begin(), pool.begin() + k);
  return p;
}

void to_json(json& j, const ReviewerPersona& p) {
  j = json{{"reviewer_id", p.reviewer_id},
           {"expertise", p.expertise},
           {"focus_areas", p.focus_areas},
           {"provenance", p.provenance == Provenance::Historical ? "historical" : "random"}};
  for (const auto& [t, level] : p.levels) j[to_string(t)] = to_string(level);
  if (p.provenance == Provenance::Historical) {
    json raw = json::object();
    for (const auto& [t, v] : p.raw_scores) raw[to_string(t)] = v;
    j["raw_scores"] = raw;
  }
}

void from_json(const json& j, ReviewerPersona& p) {
  j.at("reviewer_id").get_to(p.reviewer_id);
  j.at("expertise").get_to(p.expertise);
  j.at("focus_areas").get_to(p.focus_areas);
  const std::string prov = j.at("provenance").get<std::string>();
  if (prov != "historical" && prov != "random") throw Error(Errc::PreconditionViolation, "unknown provenance " + prov);
  p.provenance = prov == "historical" ? Provenance::Historical : Provenance::Random;
  p.levels.clear();
  for (Trait t : kTraits) {
    const auto level = parse_level(j.at(to_string(t)).get<std::string>());
    if (!level) throw Error(Errc::PreconditionViolation, "unknown level for " + to_string(t));
    p.levels[t] = *level;
  }
  p.raw_scores.clear();
  if (j.contains("raw_scores")) {
    for (const auto& [name, v] : j["raw_scores"].items()) {
      const auto t = parse_trait(name);
      if (t) p.raw_scores[*t] = v.get<double>();
    }
  }
}

}  // namespace gar::persona
