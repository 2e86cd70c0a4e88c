// SPDX-License-Identifier: Apache-2.0

#include "gar/novelty/novelty.hpp"

#include <algorithm>

#include "gar/core/text.hpp"
#include "gar/llm/gateway.hpp"
#include "gar/memory/memory.hpp"

namespace gar::novelty {

using nlohmann::json;

std::vector<std::string> extract_novelty_keywords(const ingest::Manuscript& m, llm::Gateway& gateway,
                                                  int max_keywords) {
  require(!m.sections.empty(), "manuscript has at least one section");
  require(max_keywords >= 1, "max_keywords >= 1");
  static const llm::OutputSchema schema{"keywords", {llm::Field::string_list("keywords")}};
  const auto prompt = gateway.render(llm::tmpl::kNoveltyKeywords, {{"max_keywords", std::to_string(max_keywords)},
                                                                   {"title", m.title},
                                                                   {"introduction", m.introduction()}});
  const auto value = gateway.complete_structured(prompt, schema);
  std::vector<std::string> out;
  for (const auto& k : value.at("keywords")) {
    const std::string kw = text::to_lower(text::squash_whitespace(k.get<std::string>()));
    if (kw.empty() || std::find(out.begin(), out.end(), kw) != out.end()) continue;
    if (static_cast<int>(out.size()) == max_keywords) break;
    out.push_back(kw);
  }
  if (out.empty()) throw Error(Errc::SchemaViolation, "keyword answer is empty", {{"schema_id", "keywords"}});
  return out;
}

LocalPriorIndex LocalPriorIndex::build(const std::vector<ingest::PaperRecord>& corpus, llm::Gateway& gateway) {
  LocalPriorIndex index;
  for (const auto& p : corpus) {
    const auto& m = p.manuscript;
    PriorWorkCandidate c{m.id, m.title, m.abstract, m.introduction(), m.year};
    index.items_.emplace_back(std::move(c), gateway.embed(m.title + "\n" + m.abstract));
  }
  return index;
}

std::vector<PriorWorkCandidate> LocalPriorIndex::search(const std::vector<std::string>& keywords, int target_year,
                                                        std::size_t max_candidates, llm::Gateway& gateway) const {
  if (keywords.empty()) throw Error(Errc::EmptyQuery, "prior-work search needs at least one keyword");
  if (items_.empty()) return {};
  const llm::EmbeddingVector query = gateway.embed(text::join(keywords, "; "));
  std::vector<std::pair<double, const PriorWorkCandidate*>> scored;
  for (const auto& [c, emb] : items_) {
    if (c.year >= target_year) continue;
    scored.emplace_back(memory::cosine(query, emb), &c);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  std::vector<PriorWorkCandidate> out;
  for (const auto& [_, c] : scored) {
    if (out.size() == max_candidates) break;
    out.push_back(*c);
  }
  return out;
}

ExternalSearchClient::ExternalSearchClient(llm::HttpEndpoint endpoint, double requests_per_minute)
    : endpoint_(std::move(endpoint)), limiter_(requests_per_minute) {}

std::unique_ptr<ExternalSearchClient> ExternalSearchClient::from_env(double requests_per_minute) {
  const char* url = std::getenv("GAR_SEARCH_URL");
  if (url == nullptr || std::string(url).empty()) return nullptr;
  const char* key = std::getenv("GAR_SEARCH_KEY");
  return std::make_unique<ExternalSearchClient>(llm::HttpEndpoint{url, "", key ? key : "", 30.0}, requests_per_minute);
}

std::vector<PriorWorkCandidate> ExternalSearchClient::search(const std::string& query, int year_lt, std::size_t limit) {
  limiter_.acquire();
  std::string raw;
  try {
    raw = llm::post_json(endpoint_, json{{"query", query}, {"limit", limit}, {"year_lt", year_lt}}.dump());
  } catch (const Error& e) {
    throw Error(Errc::SourceUnavailable, std::string("scholarly search failed: ") + e.what(), e.details());
  }
  json resp = json::parse(raw, nullptr, false);
  if (resp.is_object() && resp.contains("data")) resp = resp["data"];
  if (!resp.is_array()) throw Error(Errc::SourceUnavailable, "scholarly search returned no result list");
  std::vector<PriorWorkCandidate> out;
  for (const auto& item : resp) {
    if (!item.is_object() || !item.contains("year") || !item["year"].is_number_integer()) continue;
    PriorWorkCandidate c;
    c.id = item.contains("id") && item["id"].is_string() ? item["id"].get<std::string>() : "";
    c.title = item.value("title", "");
    c.abstract = item.contains("abstract") && item["abstract"].is_string() ? item["abstract"].get<std::string>() : "";
    c.introduction = item.contains("introduction") && item["introduction"].is_string()
                         ? item["introduction"].get<std::string>()
                         : "";
    c.year = item["year"].get<int>();
    if (c.id.empty() || c.year <= 1900) continue;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<PriorWorkCandidate> search_prior_work(const std::vector<std::string>& keywords, int target_year,
                                                  const LocalPriorIndex& local, llm::Gateway& gateway,
                                                  ExternalSearchClient* external, std::size_t max_candidates,
                                                  Diagnostics* diag) {
  if (keywords.empty()) throw Error(Errc::EmptyQuery, "prior-work search needs at least one keyword");
  if (external != nullptr) {
    try {
      std::vector<PriorWorkCandidate> found;
      for (auto& c : external->search(text::join(keywords, " "), target_year, max_candidates)) {
        if (c.year < target_year && found.size() < max_candidates) found.push_back(std::move(c));
      }
      return found;
    } catch (const Error& e) {
      if (e.code() != Errc::SourceUnavailable) throw;
      warn(diag, std::string("external search unavailable, using the local index: ") + e.what());
    }
  }
  return local.search(keywords, target_year, max_candidates, gateway);
}

namespace {

std::string render_candidates(const std::vector<PriorWorkCandidate>& candidates) {
  if (candidates.empty()) return "(none)";
  std::string out;
  for (const auto& c : candidates) {
    if (!out.empty()) out += "\n\n";
    out += "[" + c.id + "] " + c.title + " (" + std::to_string(c.year) + ")\nAbstract: " + c.abstract;
    if (!c.introduction.empty()) out += "\nIntroduction: " + c.introduction;
  }
  return out;
}

}  // namespace

NoveltyAssessment assess_novelty(const ingest::Manuscript& m, const std::vector<PriorWorkCandidate>& candidates,
                                 const ingest::AcronymTable& acronyms, llm::Gateway& gateway, Diagnostics* diag) {
  static const llm::OutputSchema schema{"novelty",
                                        {llm::Field::integer("score", 1, 4), llm::Field::string("explanation", true),
                                         llm::Field::string_list("cited_ids")}};
  const auto prompt = gateway.render(llm::tmpl::kNovelty, {{"acronyms", ingest::render_acronyms(acronyms)},
                                                           {"title", m.title},
                                                           {"abstract", m.abstract},
                                                           {"introduction", m.introduction()},
                                                           {"candidates", render_candidates(candidates)}});
  const auto value = gateway.complete_structured(prompt, schema);
  NoveltyAssessment a;
  a.score = value.at("score").get<int>();
  a.explanation = text::trim(value.at("explanation").get<std::string>());
  for (const auto& id : value.at("cited_ids")) {
    const std::string s = text::trim(id.get<std::string>());
    const bool known = std::any_of(candidates.begin(), candidates.end(), [&](const auto& c) { return c.id == s; });
    if (!known) {
      warn(diag, "dropped unverifiable citation " + s);
      continue;
    }
    if (std::find(a.cited_candidate_ids.begin(), a.cited_candidate_ids.end(), s) == a.cited_candidate_ids.end()) {
      a.cited_candidate_ids.push_back(s);
    }
  }
  return a;
}

void to_json(json& j, const PriorWorkCandidate& c) {
  j = json{{"id", c.id}, {"title", c.title}, {"abstract", c.abstract}, {"introduction", c.introduction}, {"year", c.year}};
}

void from_json(const json& j, PriorWorkCandidate& c) {
  j.at("id").get_to(c.id);
  j.at("title").get_to(c.title);
  j.at("abstract").get_to(c.abstract);
  c.introduction = j.value("introduction", "");
  j.at("year").get_to(c.year);
}

void to_json(json& j, const NoveltyAssessment& a) {
  j = json{{"score", a.score}, {"explanation", a.explanation}, {"cited_candidate_ids", a.cited_candidate_ids}};
}

void from_json(const json& j, NoveltyAssessment& a) {
  j.at("score").get_to(a.score);
  j.at("explanation").get_to(a.explanation);
  j.at("cited_candidate_ids").get_to(a.cited_candidate_ids);
}

}  // namespace gar::novelty
