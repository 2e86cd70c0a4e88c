// SPDX-License-Identifier: Apache-2.0

#include "gar/llm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>

#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"
#include "gar/core/text.hpp"

namespace gar::llm {

using nlohmann::json;

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> s{
      "about", "above", "after", "again", "also",  "among", "been",  "before", "being", "between", "both",
      "could", "does",  "during", "each", "even",  "from",  "further", "have", "here",  "into",  "itself",
      "more",  "most",  "much",  "must",  "only",  "other", "over",  "paper", "same",  "should", "some",
      "such",  "than",  "that",  "their", "them",  "then",  "there", "these", "they",  "this",  "those",
      "through", "under", "upon", "very", "were",  "what",  "when",  "where", "which", "while", "will",
      "with",  "within", "without", "would", "your", "review", "reviewer", "authors", "manuscript", "work",
      "none",  "idea",  "ideas", "claim", "claims", "similar", "comment", "retrieved", "most"};
  return s;
}

std::vector<std::string> content_words(const std::string& s) {
  std::vector<std::string> out;
  for (auto& w : text::words(s)) {
    if (w.size() >= 4 && !stopwords().count(w) && !std::all_of(w.begin(), w.end(), ::isdigit)) out.push_back(w);
  }
  return out;
}

std::set<std::string> word_set(const std::string& s) {
  const auto ws = content_words(s);
  return {ws.begin(), ws.end()};
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.count(w);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

// Sentences as trimmed verbatim substrings of `s`.
std::vector<std::string> sentences(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    const bool end = i == s.size() || s[i] == '\n' ||
                     ((s[i] == '.' || s[i] == '!' || s[i] == '?') && (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1]))));
    if (!end) continue;
    const std::size_t stop = (i < s.size() && s[i] != '\n') ? i + 1 : i;
    std::string piece = text::trim(s.substr(start, stop - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    start = i + 1;
  }
  return out;
}

std::vector<std::string> top_words(const std::string& s, std::size_t k) {
  std::map<std::string, int> freq;
  std::map<std::string, std::size_t> first;
  const auto ws = content_words(s);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    ++freq[ws[i]];
    first.emplace(ws[i], i);
  }
  std::vector<std::string> keys;
  for (const auto& [w, _] : freq) keys.push_back(w);
  std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return first[a] < first[b];
  });
  if (keys.size() > k) keys.resize(k);
  return keys;
}

std::string binding(const ScriptCall& c, const std::string& key) {
  const auto it = c.bindings.find(key);
  return it == c.bindings.end() ? std::string() : it->second;
}

int int_binding(const ScriptCall& c, const std::string& key, int fallback) {
  try {
    return std::stoi(binding(c, key));
  } catch (...) {
    return fallback;
  }
}

std::string first_words(const std::string& s, std::size_t n) {
  std::vector<std::string> parts;
  for (const auto& w : text::split(text::squash_whitespace(s), ' ')) {
    if (parts.size() == n) break;
    parts.push_back(w);
  }
  std::string out = text::join(parts, " ");
  while (!out.empty() && std::ispunct(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

std::string lines_after(const std::string& s, const std::string& prefix) {
  std::string out;
  for (const auto& line : text::split(s, '\n')) {
    if (line.rfind(prefix, 0) == 0) {
      if (!out.empty()) out += "\n";
      out += line.substr(prefix.size());
    }
  }
  return out;
}

int count_any(const std::string& s, const std::vector<std::string>& cues) {
  int n = 0;
  for (const auto& w : text::words(s)) {
    for (const auto& c : cues) {
      if (w.rfind(c, 0) == 0) {
        ++n;
        break;
      }
    }
  }
  return n;
}

const std::vector<std::string> kNegative{"unclear", "lack", "limited", "weak", "missing", "insufficient", "flaw",
                                         "concern", "unconvincing", "incremental", "confusing", "fail"};
const std::vector<std::string> kPositive{"strong", "novel", "clear", "convincing", "solid", "interesting",
                                         "promising", "thorough", "elegant", "impressive"};

std::string acronyms(const ScriptCall& c) {
  const std::string span = binding(c, "title") + "\n" + binding(c, "abstract") + "\n" + binding(c, "introduction");
  static const std::regex re(R"(((?:[A-Za-z][\w-]*\s+){1,8})\(([A-Z][A-Za-z0-9]{1,9})\))");
  json list = json::array();
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(span.begin(), span.end(), re); it != std::sregex_iterator(); ++it) {
    const std::string acr = (*it)[2];
    const auto n = static_cast<std::size_t>(std::count_if(acr.begin(), acr.end(), ::isupper));
    const auto words = text::split(text::squash_whitespace((*it)[1].str()), ' ');
    if (n == 0 || words.size() < n || seen.count(acr)) continue;
    std::vector<std::string> tail(words.end() - static_cast<long>(n), words.end());
    std::string exp = text::join(tail, " ");
    if (span.find(exp) == std::string::npos) continue;
    seen.insert(acr);
    list.push_back({{"acronym", acr}, {"expansion", exp}});
  }
  return json{{"acronyms", list}}.dump();
}

std::string entity_kind(const std::string& sentence) {
  const std::string s = text::to_lower(sentence);
  for (const char* cue : {"table", "figure", "experiment", "results", "accuracy", "%", "dataset", "benchmark"}) {
    if (s.find(cue) != std::string::npos) return "evidence";
  }
  for (const char* cue : {"we propose", "we introduce", "we present", "our approach", "our method", "idea"}) {
    if (s.find(cue) != std::string::npos) return "idea";
  }
  for (const char* cue : {"show", "demonstrate", "outperform", "improve", "prove", "guarantee"}) {
    if (s.find(cue) != std::string::npos) return "claim";
  }
  return "technical_detail";
}

std::string extract(const ScriptCall& c) {
  json entities = json::array();
  json relations = json::array();
  std::vector<std::pair<std::string, std::string>> picked;  // name, kind
  std::set<std::string> names;
  for (const auto& s : sentences(binding(c, "chunk"))) {
    if (s.rfind("#", 0) == 0 || content_words(s).size() < 3) continue;
    const std::string name = first_words(s, 8);
    if (name.empty() || names.count(name)) continue;
    names.insert(name);
    picked.emplace_back(name, entity_kind(s));
    entities.push_back({{"name", name}, {"kind", picked.back().second}});
    if (picked.size() == 6) break;
  }
  for (std::size_t i = 0; i + 1 < picked.size(); ++i) {
    const auto& [src, _] = picked[i];
    const auto& [dst, kind] = picked[i + 1];
    relations.push_back({{"source", src},
                         {"target", dst},
                         {"kind", kind == "evidence" ? "supports" : "elaborates"},
                         {"description", src + " leads to " + dst}});
  }
  // Entities sharing a distinctive word are related as well.
  for (std::size_t i = 0; i < picked.size(); ++i) {
    for (std::size_t j = i + 2; j < picked.size(); ++j) {
      if (jaccard(word_set(picked[i].first), word_set(picked[j].first)) >= 0.25) {
        relations.push_back({{"source", picked[i].first},
                             {"target", picked[j].first},
                             {"kind", "relates_to"},
                             {"description", picked[i].first + " shares terminology with " + picked[j].first}});
      }
    }
  }
  return json{{"entities", entities}, {"relations", relations}}.dump();
}

std::string merges(const ScriptCall& c) {
  struct Row {
    std::string id, kind, name;
    std::set<std::string> words;
  };
  std::vector<Row> rows;
  for (const auto& line : text::split(binding(c, "entities"), '\n')) {
    const auto parts = text::split(line, '|');
    if (parts.size() < 3) continue;
    Row r{text::trim(parts[0]), text::trim(parts[1]), text::trim(parts[2]), {}};
    r.words = word_set(r.name);
    rows.push_back(std::move(r));
  }
  json groups = json::array();
  std::vector<char> used(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::string> ids{rows[i].id};
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (!used[j] && rows[j].kind == rows[i].kind && jaccard(rows[i].words, rows[j].words) >= 0.5) {
        used[j] = 1;
        ids.push_back(rows[j].id);
      }
    }
    if (ids.size() > 1) groups.push_back({{"ids", ids}, {"label", rows[i].name}});
  }
  return json{{"merges", groups}}.dump();
}

std::string descriptor(const ScriptCall& c) {
  std::vector<std::string> labels;
  for (const auto& line : text::split(binding(c, "entities"), '\n')) {
    const auto close = line.find("] ");
    if (close != std::string::npos) labels.push_back(line.substr(close + 2));
  }
  std::string out = "This community groups " + std::to_string(labels.size()) + " related elements: " +
                    text::join(labels, "; ") + ".";
  const auto rel = text::split(binding(c, "relations"), '\n');
  if (!rel.empty() && !text::trim(rel[0]).empty() && rel[0] != "(none)") out += " Key relation: " + text::trim(rel[0]) + ".";
  return json{{"description", out}}.dump();
}

std::vector<std::string> trait_cues(const std::string& template_id) {
  if (template_id == tmpl::kCompareEvidence) return {"experiment", "evidence", "result", "ablation", "baseline", "empiric"};
  if (template_id == tmpl::kCompareOpen) return {"interesting", "novel", "promising", "creative", "original"};
  if (template_id == tmpl::kCompareTone) return {"please", "thank", "appreciate", "kindly", "nice"};
  if (template_id == tmpl::kCompareTechnical) return {"proof", "algorithm", "theorem", "complexity", "derivation", "equation"};
  if (template_id == tmpl::kCompareEthic) return {"bias", "ethic", "privacy", "fairness", "societal", "harm"};
  return kNegative;
}

std::string comparison(const ScriptCall& c) {
  const auto cues = trait_cues(c.template_id);
  const int t = count_any(binding(c, "target"), cues);
  const int o = count_any(binding(c, "other"), cues);
  bool target = t > o;
  if (t == o) target = (fnv1a64(c.bindings_hash) & 1u) != 0;
  return json{{"preferred", target ? "target" : "other"}}.dump();
}

std::string focus(const ScriptCall& c) {
  auto ws = top_words(binding(c, "reviews"), 3);
  if (ws.empty()) ws.push_back("overall quality");
  return json{{"focus_areas", text::join(ws, "; ")}}.dump();
}

std::string keywords(const ScriptCall& c) {
  const int k = std::max(1, int_binding(c, "max_keywords", 5));
  auto ws = top_words(binding(c, "title") + "\n" + binding(c, "introduction"), static_cast<std::size_t>(k));
  if (ws.empty()) ws.push_back("machine learning");
  return json{{"keywords", ws}}.dump();
}

std::string novelty(const ScriptCall& c) {
  const auto own = word_set(binding(c, "title") + " " + binding(c, "abstract"));
  static const std::regex id_re(R"(^\[([^\]]+)\])");
  std::vector<std::pair<std::string, std::string>> cands;  // id, block
  for (const auto& line : text::split(binding(c, "candidates"), '\n')) {
    std::smatch m;
    if (std::regex_search(line, m, id_re)) {
      cands.emplace_back(m[1], line);
    } else if (!cands.empty()) {
      cands.back().second += "\n" + line;
    }
  }
  double best = 0.0;
  std::string best_id;
  for (const auto& [id, block] : cands) {
    const double s = jaccard(own, word_set(block));
    if (s > best) {
      best = s;
      best_id = id;
    }
  }
  const int score = best < 0.05 ? 4 : best < 0.12 ? 3 : best < 0.25 ? 2 : 1;
  json cited = json::array();
  std::string explanation;
  if (best_id.empty()) {
    explanation = "No closely related prior work was found, so the contribution appears new.";
  } else {
    cited.push_back(best_id);
    explanation = "The closest prior work is [" + best_id + "] with lexical overlap " +
                  std::to_string(static_cast<int>(std::lround(best * 100))) + "%; the differences are " +
                  (score >= 3 ? "substantial." : "limited.");
  }
  return json{{"score", score}, {"explanation", explanation}, {"cited_ids", cited}}.dump();
}

std::string mention(const ScriptCall& c) {
  const auto target = word_set(binding(c, "descriptor"));
  std::string best;
  std::size_t best_overlap = 0;
  for (const auto& s : sentences(binding(c, "reviews"))) {
    if (s == "---") continue;
    std::size_t overlap = 0;
    for (const auto& w : word_set(s)) overlap += target.count(w);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = s;
    }
  }
  std::string sentinel = binding(c, "sentinel");
  return json{{"quote", best_overlap >= 2 ? best : sentinel}}.dump();
}

struct Scores {
  int soundness = 2, presentation = 2, contribution = 2, overall = 5, confidence = 3;
};

int clamp_int(int v, int lo, int hi) { return std::clamp(v, lo, hi); }

Scores scores_from_overall(int overall, int novelty, int confidence, std::uint64_t h) {
  Scores s;
  s.overall = clamp_int(overall, 1, 10);
  s.soundness = clamp_int((s.overall + 1) / 2 - 1 + static_cast<int>(h % 2), 1, 4);
  s.presentation = clamp_int((s.overall + 2) / 3 + static_cast<int>((h >> 1) % 2), 1, 4);
  s.contribution = clamp_int(novelty, 1, 4);
  s.confidence = clamp_int(confidence, 1, 5);
  return s;
}

std::string level_of(const std::string& style, const std::string& label) {
  const std::string line = lines_after(style, "- " + label + ": ");
  return text::trim(line);
}

json review_json(const std::string& summary, std::vector<std::string> strengths, std::vector<std::string> weaknesses,
                 std::vector<std::string> suggestions, const Scores& s, const std::string& rationale) {
  return {{"summary", summary},           {"strengths", strengths},
          {"weaknesses", weaknesses},     {"suggestions", suggestions},
          {"soundness", s.soundness},     {"presentation", s.presentation},
          {"contribution", s.contribution}, {"overall", s.overall},
          {"confidence", s.confidence},   {"decision", s.overall >= 6 ? "accept" : "reject"},
          {"rationale", rationale}};
}

std::string initial_review(const ScriptCall& c) {
  const std::string style = binding(c, "style");
  const int novelty_score = int_binding(c, "novelty_score", 2);
  int overall = 2 + novelty_score;
  const std::string strict = level_of(style, "Strictness");
  if (strict == "high") overall -= 1;
  if (strict == "low") overall += 1;
  if (level_of(style, "Open-mindedness") == "high") overall += 1;
  const std::uint64_t h = fnv1a64(binding(c, "descriptors") + style);
  overall += static_cast<int>(h % 3) - 1;
  int confidence = 3;
  try {
    confidence = std::stoi(level_of(style, "Expertise level (1-5)"));
  } catch (...) {
  }

  std::vector<std::string> ideas;
  for (const auto& line : text::split(binding(c, "descriptors"), '\n')) {
    if (line.rfind("Idea ", 0) == 0) ideas.push_back(line);
  }
  std::vector<std::string> strengths;
  std::vector<std::string> weaknesses;
  std::vector<std::string> suggestions;
  for (std::size_t i = 0; i < ideas.size() && i < 3; ++i) {
    const auto colon = ideas[i].find(": ");
    const std::string head = ideas[i].substr(0, colon);
    const std::string body = colon == std::string::npos ? ideas[i] : ideas[i].substr(colon + 2);
    const auto topic = top_words(body, 3);
    const std::string about = topic.empty() ? "its topic" : text::join(topic, ", ");
    strengths.push_back(head + " is clearly motivated (" + about + ").");
    weaknesses.push_back("Evidence supporting " + head + " (" + about + ") is limited.");
    suggestions.push_back("Add ablations isolating " + head + ".");
  }
  const auto focus = level_of(style, "Focus areas");
  if (!focus.empty()) suggestions.push_back("Clarify aspects related to " + focus + ".");
  const auto summary_words = top_words(binding(c, "descriptors"), 5);
  const std::string summary = "The manuscript studies " +
                              (summary_words.empty() ? std::string("its problem") : text::join(summary_words, ", ")) +
                              " across " + std::to_string(ideas.size()) + " core ideas.";
  const Scores s = scores_from_overall(overall, novelty_score, confidence, h);
  const std::string rationale = "Novelty is rated " + std::to_string(novelty_score) + " of 4 and strictness is " +
                                (strict.empty() ? "medium" : strict) + ".";
  return review_json(summary, strengths, weaknesses, suggestions, s, rationale).dump();
}

std::vector<std::string> section_items(const std::string& review, const std::string& heading) {
  std::vector<std::string> out;
  bool in = false;
  for (const auto& line : text::split(review, '\n')) {
    if (line == heading + ":") {
      in = true;
      continue;
    }
    if (!in) continue;
    if (line.rfind("- ", 0) != 0) break;
    if (line != "- (none)") out.push_back(line.substr(2));
  }
  return out;
}

int score_in(const std::string& review, const std::string& name, int fallback) {
  const std::regex re(name + R"( (\d+))");
  std::smatch m;
  return std::regex_search(review, m, re) ? std::stoi(m[1]) : fallback;
}

std::string check_review(const ScriptCall& c) {
  const std::string prev = binding(c, "previous_review");
  const std::string block = binding(c, "prompt_block");
  const std::string comments = lines_after(block, "  Reviewer comment: ");
  const int neg = count_any(comments, kNegative);
  const int pos = count_any(comments, kPositive);
  int overall = score_in(prev, "overall", 5);
  auto strengths = section_items(prev, "Strengths");
  auto weaknesses = section_items(prev, "Weaknesses");
  auto suggestions = section_items(prev, "Suggestions");
  std::string idea;
  for (const auto& line : text::split(block, '\n')) {
    if (line.rfind("Idea ", 0) == 0) {
      idea = line.substr(0, line.find(':'));
      break;
    }
  }
  std::string change = "No change was needed after checking " + (idea.empty() ? std::string("the block") : idea) + ".";
  if (neg > pos) {
    overall -= 1;
    weaknesses.push_back("Human comments on similar work raise concerns that also apply to " + idea + ".");
    change = "Lowered the overall score: similar work drew " + std::to_string(neg) + " critical remarks.";
  } else if (pos > neg) {
    overall += 1;
    strengths.push_back("Similar work was received positively, which supports " + idea + ".");
    change = "Raised the overall score: similar work drew " + std::to_string(pos) + " positive remarks.";
  }
  Scores s;
  s.overall = clamp_int(overall, 1, 10);
  s.soundness = clamp_int(score_in(prev, "soundness", 2) + (s.overall < 4 ? -1 : 0), 1, 4);
  s.presentation = clamp_int(score_in(prev, "presentation", 2), 1, 4);
  s.contribution = clamp_int(score_in(prev, "contribution", 2), 1, 4);
  s.confidence = clamp_int(score_in(prev, "confidence", 3), 1, 5);
  const std::string summary = text::trim(lines_after(prev, "Summary: "));
  return review_json(summary.empty() ? "The manuscript was re-examined." : summary, strengths, weaknesses, suggestions, s,
                     change)
      .dump();
}

std::pair<double, int> committee_stats(const std::string& reviews) {
  static const std::regex re(R"(overall (\d+))");
  double sum = 0.0;
  int n = 0;
  for (auto it = std::sregex_iterator(reviews.begin(), reviews.end(), re); it != std::sregex_iterator(); ++it) {
    sum += std::stoi((*it)[1]);
    ++n;
  }
  return {n == 0 ? 0.0 : sum / n, n};
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string reflect(const ScriptCall& c) {
  const std::string reviews = binding(c, "reviews");
  const auto [mean, n] = committee_stats(reviews);
  const auto themes = top_words(lines_after(reviews, "- "), 4);
  std::string s = "Turn " + binding(c, "turn") + ": " + std::to_string(n) + " reviews with mean overall score " +
                  fixed2(mean) + ". Recurring themes: " + (themes.empty() ? "none" : text::join(themes, ", ")) + ".";
  return json{{"summary", s}}.dump();
}

std::string meta(const ScriptCall& c) {
  const auto [mean, n] = committee_stats(binding(c, "reviews"));
  const char* decision = mean >= 8.0 ? "ACCEPT (ORAL)" : mean >= 6.0 ? "ACCEPT (POSTER)" : "REJECT";
  const std::string s = "The committee of " + std::to_string(n) + " reviewers gives a mean overall score of " +
                        fixed2(mean) + ". " + text::trim(text::split(binding(c, "summaries"), '\n').back());
  return json{{"summary", s}, {"decision", decision}}.dump();
}

}  // namespace

Responder synthetic_responder() {
  return [](const ScriptCall& c) -> std::optional<std::string> {
    const std::string& t = c.template_id;
    if (t == tmpl::kAcronyms) return acronyms(c);
    if (t == tmpl::kExtract) return extract(c);
    if (t == tmpl::kMerge) return merges(c);
    if (t == tmpl::kSummarize) return descriptor(c);
    if (c.schema_id == "comparison") return comparison(c);
    if (t == tmpl::kFocus) return focus(c);
    if (t == tmpl::kNoveltyKeywords) return keywords(c);
    if (t == tmpl::kNovelty) return novelty(c);
    if (t == tmpl::kMention) return mention(c);
    if (t == tmpl::kInitialReview) return initial_review(c);
    if (t == tmpl::kCheck) return check_review(c);
    if (t == tmpl::kMetaReflect) return reflect(c);
    if (t == tmpl::kMeta) return meta(c);
    return std::nullopt;
  };
}

Embedder hashing_embedder(std::size_t dim) {
  require(dim >= 2, "embedding dimension >= 2");
  return [dim](const std::string& s) -> std::optional<std::vector<float>> {
    std::vector<double> v(dim, 0.0);
    v[dim - 1] = 0.05;
    for (const auto& w : text::words(s)) {
      const std::uint64_t h = fnv1a64(w);
      v[h % (dim - 1)] += (h >> 63) ? -1.0 : 1.0;
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    std::vector<float> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / n);
    return out;
  };
}

std::shared_ptr<ScriptedBackend> make_synthetic_chat() {
  auto chat = std::make_shared<ScriptedBackend>(kSyntheticChatModel);
  chat->set_fallback(synthetic_responder());
  return chat;
}

std::shared_ptr<ScriptedEmbedder> make_hashing_embedder() {
  auto emb = std::make_shared<ScriptedEmbedder>(kHashingEmbeddingModel);
  emb->set_fallback(hashing_embedder());
  return emb;
}

}  // namespace gar::llm
