// SPDX-License-Identifier: Apache-2.0

#include "gar/ingest/corpus.hpp"

#include <fstream>

namespace gar::ingest {

using nlohmann::json;

std::string to_string(Decision d) {
  switch (d) {
    case Decision::AcceptOral: return "accept_oral";
    case Decision::AcceptPoster: return "accept_poster";
    case Decision::Reject: return "reject";
  }
  return "reject";
}

std::optional<Decision> parse_decision(const std::string& s) {
  if (s == "accept_oral") return Decision::AcceptOral;
  if (s == "accept_poster") return Decision::AcceptPoster;
  if (s == "reject") return Decision::Reject;
  return std::nullopt;
}

namespace {

[[noreturn]] void malformed(int line_no, const std::string& why) {
  throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": " + why, {{"line", line_no}});
}

int score_field(const json& j, const char* field, int lo, int hi, int line_no) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    malformed(line_no, std::string("review field ") + field + " missing or not an integer");
  }
  const long long v = j[field].get<long long>();
  if (v < lo || v > hi) {
    throw Error(Errc::ScoreOutOfRange,
                "line " + std::to_string(line_no) + ": " + field + "=" + std::to_string(v) + " outside [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]",
                {{"line", line_no}, {"field", field}, {"value", v}});
  }
  return static_cast<int>(v);
}

std::string string_field(const json& j, const char* field, int line_no) {
  if (!j.contains(field) || !j[field].is_string()) malformed(line_no, std::string("field ") + field + " missing");
  return j[field].get<std::string>();
}

}  // namespace

PaperRecord parse_paper_record(const std::string& line, int line_no, const ChunkingOptions& options) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) malformed(line_no, "not a JSON object");

  PaperRecord rec;
  const std::string id = string_field(j, "id", line_no);
  if (!j.contains("year") || !j["year"].is_number_integer()) malformed(line_no, "field year missing");
  const int year = j["year"].get<int>();
  if (year <= 1900) malformed(line_no, "year must be > 1900");
  rec.markdown = string_field(j, "markdown", line_no);
  try {
    rec.manuscript = parse_manuscript(rec.markdown, id, year, options);
  } catch (const Error& e) {
    malformed(line_no, e.what());
  }
  rec.manuscript.title = string_field(j, "title", line_no);
  rec.manuscript.abstract = string_field(j, "abstract", line_no);

  if (!j.contains("reviews") || !j["reviews"].is_array()) malformed(line_no, "field reviews missing");
  for (const auto& r : j["reviews"]) {
    if (!r.is_object()) malformed(line_no, "review is not an object");
    ReviewRecord rv;
    rv.paper_id = id;
    rv.reviewer_id = string_field(r, "reviewer_id", line_no);
    rv.text = string_field(r, "text", line_no);
    rv.soundness = score_field(r, "soundness", 1, 4, line_no);
    rv.presentation = score_field(r, "presentation", 1, 4, line_no);
    rv.contribution = score_field(r, "contribution", 1, 4, line_no);
    rv.overall = score_field(r, "overall", 1, 10, line_no);
    rv.confidence = score_field(r, "confidence", 1, 5, line_no);
    rec.reviews.push_back(std::move(rv));
  }
  if (j.contains("meta_review") && j["meta_review"].is_string() && !j["meta_review"].get<std::string>().empty()) {
    rec.meta_review_text = j["meta_review"].get<std::string>();
  }
  if (j.contains("decision") && !j["decision"].is_null()) {
    if (!j["decision"].is_string()) malformed(line_no, "decision must be a string or null");
    rec.decision = parse_decision(j["decision"].get<std::string>());
    if (!rec.decision) malformed(line_no, "unknown decision " + j["decision"].get<std::string>());
  }
  return rec;
}

namespace {

std::vector<std::pair<int, PaperRecord>> load_numbered(const std::string& path, const ChunkingOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open corpus " + path, {{"path", path}});
  std::vector<std::pair<int, PaperRecord>> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.emplace_back(n, parse_paper_record(line, n, options));
  }
  return out;
}

}  // namespace

std::vector<PaperRecord> load_corpus(const std::string& path, const ChunkingOptions& options) {
  std::vector<PaperRecord> out;
  for (auto& [_, rec] : load_numbered(path, options)) out.push_back(std::move(rec));
  return out;
}

std::vector<PaperRecord> load_ground_truth(const std::string& path, std::size_t min_reviews,
                                           const ChunkingOptions& options) {
  std::vector<PaperRecord> out;
  for (auto& [ln, rec] : load_numbered(path, options)) {
    if (!rec.decision) {
      throw Error(Errc::MissingDecision, "line " + std::to_string(ln) + ": ground-truth record has no decision",
                  {{"line", ln}, {"paper_id", rec.manuscript.id}});
    }
    if (rec.reviews.size() < min_reviews) {
      throw Error(Errc::PreconditionViolation,
                  "line " + std::to_string(ln) + ": ground-truth record needs at least " +
                      std::to_string(min_reviews) + " reviews",
                  {{"line", ln}, {"paper_id", rec.manuscript.id}});
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void to_json(json& j, const ReviewRecord& r) {
  j = json{{"reviewer_id", r.reviewer_id},   {"text", r.text},       {"soundness", r.soundness},
           {"presentation", r.presentation}, {"contribution", r.contribution}, {"overall", r.overall},
           {"confidence", r.confidence}};
}

json to_corpus_json(const PaperRecord& record) {
  const Manuscript& m = record.manuscript;
  json j{{"id", m.id},
         {"title", m.title},
         {"abstract", m.abstract},
         {"year", m.year},
         {"markdown", record.markdown},
         {"reviews", record.reviews},
         {"meta_review", record.meta_review_text ? json(*record.meta_review_text) : json(nullptr)},
         {"decision", record.decision ? json(to_string(*record.decision)) : json(nullptr)}};
  return j;
}

}  // namespace gar::ingest
