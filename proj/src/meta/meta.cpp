// SPDX-License-Identifier: Apache-2.0

#include "gar/meta/meta.hpp"

#include <cstdio>

#include "gar/core/text.hpp"
#include "gar/llm/gateway.hpp"

namespace gar::meta {

using nlohmann::json;

double mean_score(const std::vector<review::Review>& reviews) {
  if (reviews.empty()) throw Error(Errc::EmptyCommittee, "no reviews to aggregate");
  long long sum = 0;
  for (const auto& r : reviews) sum += r.overall;
  return static_cast<double>(sum) / static_cast<double>(reviews.size());
}

MetaReview threshold_meta(const std::vector<review::Review>& reviews, double threshold) {
  const double mean = mean_score(reviews);
  std::size_t strengths = 0;
  std::size_t weaknesses = 0;
  for (const auto& r : reviews) {
    strengths += r.strengths.size();
    weaknesses += r.weaknesses.size();
  }
  MetaReview m;
  m.mode = Mode::Threshold;
  m.decision = mean >= threshold ? ingest::Decision::AcceptPoster : ingest::Decision::Reject;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Mean overall score %.2f over %zu reviews against threshold %.2f; ", mean,
                reviews.size(), threshold);
  m.summary = std::string(buf) + std::to_string(strengths) + " strengths and " + std::to_string(weaknesses) +
              " weaknesses raised.";
  return m;
}

Binary to_binary(ingest::Decision d) { return d == ingest::Decision::Reject ? Binary::Reject : Binary::Accept; }

std::string to_string(Binary b) { return b == Binary::Accept ? "accept" : "reject"; }

std::string render_committee(const std::vector<review::Review>& reviews) {
  std::string out;
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    if (!out.empty()) out += "\n\n";
    out += "Reviewer " + std::to_string(i + 1) + ":\n" + review::render_review(reviews[i]);
  }
  return out;
}

namespace {

std::string numbered(const std::vector<std::string>& xs, const std::string& label) {
  if (xs.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!out.empty()) out += "\n\n";
    out += label + " " + std::to_string(i + 1) + ":\n" + xs[i];
  }
  return out;
}

ingest::Decision parse_final(const std::string& s) {
  if (s == "ACCEPT (ORAL)") return ingest::Decision::AcceptOral;
  if (s == "ACCEPT (POSTER)") return ingest::Decision::AcceptPoster;
  return ingest::Decision::Reject;
}

}  // namespace

MetaReview agentic_meta(const std::vector<review::Review>& reviews, const memory::MetaMemory& meta_memory,
                        const std::vector<llm::EmbeddingVector>& paper_signature,
                        const std::optional<std::string>& paper_id, const AgenticOptions& options,
                        llm::Gateway& gateway, Diagnostics* diag) {
  if (reviews.empty()) throw Error(Errc::EmptyCommittee, "no reviews to aggregate");
  require(options.turns >= 0, "T >= 0");
  require(options.exemplars >= 1, "K2 >= 1");
  static const llm::OutputSchema reflect_schema{"reflection", {llm::Field::string("summary", true)}};
  static const llm::OutputSchema final_schema{
      "meta", {llm::Field::string("summary", true),
               llm::Field::enumeration("decision", {"ACCEPT (ORAL)", "ACCEPT (POSTER)", "REJECT"})}};

  MetaReview m;
  m.mode = Mode::Agentic;
  std::vector<std::string> exemplar_texts;
  if (meta_memory.empty() || paper_signature.empty()) {
    warn(diag, "meta-memory empty or paper has no descriptors; meta-review runs without exemplars");
  } else {
    for (const auto& match : meta_memory.retrieve(paper_signature, options.exemplars, options.tau, paper_id)) {
      m.retrieved_meta_ids.push_back(match.entry->paper_id);
      exemplar_texts.push_back(match.entry->meta_review_text);
    }
  }
  const std::string exemplars = numbered(exemplar_texts, "Meta-review");
  const std::string committee = render_committee(reviews);

  for (int t = 1; t <= options.turns; ++t) {
    const auto prompt = gateway.render(llm::tmpl::kMetaReflect, {{"turn", std::to_string(t)},
                                                                 {"exemplars", exemplars},
                                                                 {"previous_summaries", numbered(m.turn_summaries, "Turn")},
                                                                 {"reviews", committee}});
    m.turn_summaries.push_back(
        text::trim(gateway.complete_structured(prompt, reflect_schema).at("summary").get<std::string>()));
  }
  const auto prompt = gateway.render(
      llm::tmpl::kMeta,
      {{"exemplars", exemplars}, {"summaries", numbered(m.turn_summaries, "Turn")}, {"reviews", committee}});
  const auto value = gateway.complete_structured(prompt, final_schema);
  m.summary = text::trim(value.at("summary").get<std::string>());
  m.decision = parse_final(value.at("decision").get<std::string>());
  return m;
}

void to_json(json& j, const MetaReview& m) {
  j = json{{"summary", m.summary},
           {"decision", ingest::to_string(m.decision)},
           {"turn_summaries", m.turn_summaries},
           {"retrieved_meta_ids", m.retrieved_meta_ids},
           {"mode", m.mode == Mode::Agentic ? "agentic" : "threshold"}};
}

void from_json(const json& j, MetaReview& m) {
  j.at("summary").get_to(m.summary);
  const auto d = ingest::parse_decision(j.at("decision").get<std::string>());
  if (!d) throw Error(Errc::PreconditionViolation, "unknown decision " + j.at("decision").get<std::string>());
  m.decision = *d;
  j.at("turn_summaries").get_to(m.turn_summaries);
  j.at("retrieved_meta_ids").get_to(m.retrieved_meta_ids);
  m.mode = j.at("mode").get<std::string>() == "threshold" ? Mode::Threshold : Mode::Agentic;
}

}  // namespace gar::meta
