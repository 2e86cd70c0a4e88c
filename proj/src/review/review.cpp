// SPDX-License-Identifier: Apache-2.0

#include "gar/review/review.hpp"

#include <filesystem>
#include <set>

#include "gar/core/hash.hpp"
#include "gar/core/parallel.hpp"
#include "gar/core/text.hpp"
#include "gar/llm/gateway.hpp"

namespace gar::review {

using nlohmann::json;

const llm::OutputSchema& review_schema() {
  static const llm::OutputSchema schema{"review",
                                        {llm::Field::string("summary", true),
                                         llm::Field::string_list("strengths"),
                                         llm::Field::string_list("weaknesses"),
                                         llm::Field::string_list("suggestions"),
                                         llm::Field::integer("soundness", 1, 4),
                                         llm::Field::integer("presentation", 1, 4),
                                         llm::Field::integer("contribution", 1, 4),
                                         llm::Field::integer("overall", 1, 10),
                                         llm::Field::integer("confidence", 1, 5),
                                         llm::Field::enumeration("decision", {"accept", "reject"}),
                                         llm::Field::string("rationale")}};
  return schema;
}

namespace {

std::vector<std::string> items(const json& list, int max_items) {
  std::vector<std::string> out;
  for (const auto& v : list) {
    if (static_cast<int>(out.size()) == max_items) break;
    const std::string s = text::trim(v.get<std::string>());
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

std::string bullets(const std::vector<std::string>& xs) {
  if (xs.empty()) return "- (none)";
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += "\n";
    out += "- " + x;
  }
  return out;
}

std::string idea_label(int community_id) { return "Idea " + std::to_string(community_id + 1); }

}  // namespace

Review review_from_value(const json& value, const std::string& reviewer_id, int round, int max_items) {
  Review r;
  r.reviewer_id = reviewer_id;
  r.round = round;
  r.summary = text::trim(value.at("summary").get<std::string>());
  r.strengths = items(value.at("strengths"), max_items);
  r.weaknesses = items(value.at("weaknesses"), max_items);
  r.suggestions = items(value.at("suggestions"), max_items);
  r.soundness = value.at("soundness").get<int>();
  r.presentation = value.at("presentation").get<int>();
  r.contribution = value.at("contribution").get<int>();
  r.overall = value.at("overall").get<int>();
  r.confidence = value.at("confidence").get<int>();
  r.decision = value.at("decision").get<std::string>();
  r.rationale = text::trim(value.at("rationale").get<std::string>());
  return r;
}

std::string render_review(const Review& r) {
  return "Summary: " + r.summary + "\nStrengths:\n" + bullets(r.strengths) + "\nWeaknesses:\n" + bullets(r.weaknesses) +
         "\nSuggestions:\n" + bullets(r.suggestions) + "\nScores: soundness " + std::to_string(r.soundness) +
         ", presentation " + std::to_string(r.presentation) + ", contribution " + std::to_string(r.contribution) +
         ", overall " + std::to_string(r.overall) + ", confidence " + std::to_string(r.confidence) +
         "\nDecision: " + r.decision + "\nRationale: " + r.rationale;
}

RoundPlan plan_rounds(const std::vector<int>& descriptor_ids, int k) {
  if (k < 1) throw Error(Errc::KZero, "review rounds must be at least 1");
  require(!descriptor_ids.empty(), "at least one descriptor");
  const std::size_t n = descriptor_ids.size();
  const std::size_t rounds = static_cast<std::size_t>(k);
  RoundPlan plan;
  std::size_t next = 0;
  for (std::size_t b = 0; b < rounds; ++b) {
    const std::size_t size = n / rounds + (b < n % rounds ? 1 : 0);
    if (size == 0) continue;
    plan.blocks.emplace_back(descriptor_ids.begin() + static_cast<long>(next),
                             descriptor_ids.begin() + static_cast<long>(next + size));
    next += size;
  }
  return plan;
}

std::string render_style(const persona::ReviewerPersona& p, llm::Gateway& gateway) {
  using persona::Trait;
  const auto level = [&](Trait t) { return persona::to_string(p.level(t)); };
  return gateway
      .render(llm::tmpl::kStyle,
              {{"strictness", level(Trait::Strictness)},
               {"evidence_focus", level(Trait::EvidenceFocus)},
               {"open_mindedness", level(Trait::OpenMindedness)},
               {"tone", level(Trait::Tone)},
               {"technical_focus", level(Trait::TechnicalFocus)},
               {"ethic_focus", level(Trait::EthicFocus)},
               {"expertise", std::to_string(p.expertise)},
               {"focus_areas", p.focus_areas.empty() ? "(none)" : text::join(p.focus_areas, "; ")}})
      .rendered;
}

Review initial_review(const persona::ReviewerPersona& p, const graph::PaperGraph& g,
                      const novelty::NoveltyAssessment& nov, llm::Gateway& gateway, int max_items) {
  require(!g.descriptors.empty(), "graph has descriptors");
  std::string descriptors;
  for (const auto& [c, d] : g.descriptors) {
    if (!descriptors.empty()) descriptors += "\n\n";
    descriptors += idea_label(c) + ": " + d.text;
  }
  const auto prompt = gateway.render(
      llm::tmpl::kInitialReview,
      {{"review_instructions", gateway.render(llm::tmpl::kReviewInstructions, {}).rendered},
       {"novelty_instructions", gateway.render(llm::tmpl::kNoveltyInstructions, {}).rendered},
       {"style", render_style(p, gateway)},
       {"novelty_score", std::to_string(nov.score)},
       {"novelty_explanation", nov.explanation},
       {"acronyms", ingest::render_acronyms(g.acronyms)},
       {"descriptors", descriptors}});
  return review_from_value(gateway.complete_structured(prompt, review_schema()), p.reviewer_id, 0, max_items);
}

RetrievalBundle retrieve_for_block(const graph::PaperGraph& g, const std::vector<int>& block,
                                   const memory::MemoryIndex& index, int m, llm::Gateway& gateway) {
  RetrievalBundle bundle;
  for (int c : block) {
    DescriptorRetrieval dr;
    dr.community_id = c;
    if (!index.empty()) {
      const auto query = memory::descriptor_embedding(g.descriptors.at(c), gateway);
      for (const auto& match : memory::retrieve_communities(index, query, g.paper_id, m)) {
        dr.pairs.push_back({match.entry->paper_id, match.entry->community_id, match.entry->descriptor_text,
                            match.entry->review_snippet, match.similarity});
      }
    }
    bundle.push_back(std::move(dr));
  }
  return bundle;
}

std::string render_prompt_block(const graph::PaperGraph& g, const std::vector<int>& block,
                                const RetrievalBundle& bundle) {
  std::string out;
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (!out.empty()) out += "\n\n";
    out += idea_label(block[i]) + ": " + g.descriptors.at(block[i]).text + "\n\nMost Similar Claims:";
    const auto& pairs = bundle[i].pairs;
    if (pairs.empty()) out += "\n(none retrieved)";
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      out += "\n- Similar Claim " + std::to_string(j + 1) + ": " + pairs[j].descriptor_text +
             "\n  Reviewer comment: " + pairs[j].review_snippet;
    }
  }
  return out;
}

Review refine_round(const Review& initial, const Review& prev, const graph::PaperGraph& g,
                    const std::vector<int>& block, const RetrievalBundle& bundle, llm::Gateway& gateway,
                    int max_items) {
  require(!block.empty(), "non-empty block");
  require(bundle.size() == block.size(), "retrieval bundle covers the block");
  for (std::size_t i = 0; i < block.size(); ++i) {
    require(bundle[i].community_id == block[i], "retrieval bundle matches the block descriptors");
    require(g.descriptors.count(block[i]) == 1, "block descriptor exists");
  }
  const int round = prev.round + 1;
  const auto prompt = gateway.render(llm::tmpl::kCheck, {{"round", std::to_string(round)},
                                                         {"initial_review", render_review(initial)},
                                                         {"previous_review", render_review(prev)},
                                                         {"prompt_block", render_prompt_block(g, block, bundle)}});
  return review_from_value(gateway.complete_structured(prompt, review_schema()), prev.reviewer_id, round, max_items);
}

namespace {

std::string round_path(const std::string& dir, int k) { return dir + "/round_" + std::to_string(k) + ".json"; }

template <typename F>
Review checkpointed(const std::string& dir, int k, const std::string& reviewer_id, F compute) {
  if (!dir.empty() && std::filesystem::exists(round_path(dir, k))) {
    const json j = json::parse(read_file(round_path(dir, k)), nullptr, false);
    if (!j.is_discarded()) {
      Review r = j.get<Review>();
      if (r.round == k && r.reviewer_id == reviewer_id) return r;
    }
  }
  Review r = compute();
  if (!dir.empty()) write_file(round_path(dir, k), json(r).dump(2) + "\n");
  return r;
}

}  // namespace

ReviewerRun run_reviewer(const persona::ReviewerPersona& p, const graph::PaperGraph& g,
                         const novelty::NoveltyAssessment& nov, const memory::MemoryIndex& index,
                         const ReviewerOptions& options, llm::Gateway& gateway) {
  require(options.rounds >= 0, "rounds >= 0");
  require(options.retrieved >= 1, "M >= 1");
  ReviewerRun run;
  const std::string& dir = options.transcript_dir;
  const Review initial = checkpointed(dir, 0, p.reviewer_id,
                                      [&] { return initial_review(p, g, nov, gateway, options.max_items); });
  run.transcript.push_back(initial);
  if (options.rounds > 0) {
    std::vector<int> ids;
    for (const auto& [c, _] : g.descriptors) ids.push_back(c);
    const RoundPlan plan = plan_rounds(ids, options.rounds);
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
      const int k = static_cast<int>(b) + 1;
      const Review& prev = run.transcript.back();
      run.transcript.push_back(checkpointed(dir, k, p.reviewer_id, [&] {
        const auto bundle = retrieve_for_block(g, plan.blocks[b], index, options.retrieved, gateway);
        return refine_round(initial, prev, g, plan.blocks[b], bundle, gateway, options.max_items);
      }));
    }
  }
  run.final_review = run.transcript.back();
  return run;
}

std::vector<ReviewerRun> run_committee(const std::vector<persona::ReviewerPersona>& personas,
                                       const graph::PaperGraph& g, const novelty::NoveltyAssessment& nov,
                                       const memory::MemoryIndex& index, const ReviewerOptions& options,
                                       llm::Gateway& gateway, int workers) {
  const auto n = static_cast<int>(personas.size());
  if (n < kMinCommittee || n > kMaxCommittee) {
    throw Error(Errc::CommitteeSizeOutOfRange,
                "committee needs " + std::to_string(kMinCommittee) + " to " + std::to_string(kMaxCommittee) +
                    " reviewers, got " + std::to_string(n),
                {{"size", n}});
  }
  std::set<std::string> ids;
  for (const auto& p : personas) require(ids.insert(p.reviewer_id).second, "committee reviewer ids are unique");

  std::vector<ReviewerRun> runs(personas.size());
  parallel_for(personas.size(), workers, [&](std::size_t i) {
    ReviewerOptions own = options;
    if (!own.transcript_dir.empty()) own.transcript_dir += "/" + personas[i].reviewer_id;
    runs[i] = run_reviewer(personas[i], g, nov, index, own, gateway);
  });
  return runs;
}

void to_json(json& j, const Review& r) {
  j = json{{"reviewer_id", r.reviewer_id},   {"round", r.round},
           {"soundness", r.soundness},       {"presentation", r.presentation},
           {"contribution", r.contribution}, {"overall", r.overall},
           {"confidence", r.confidence},     {"strengths", r.strengths},
           {"weaknesses", r.weaknesses},     {"suggestions", r.suggestions},
           {"summary", r.summary},           {"decision", r.decision},
           {"rationale", r.rationale}};
}

void from_json(const json& j, Review& r) {
  j.at("reviewer_id").get_to(r.reviewer_id);
  j.at("round").get_to(r.round);
  j.at("soundness").get_to(r.soundness);
  j.at("presentation").get_to(r.presentation);
  j.at("contribution").get_to(r.contribution);
  j.at("overall").get_to(r.overall);
  j.at("confidence").get_to(r.confidence);
  j.at("strengths").get_to(r.strengths);
  j.at("weaknesses").get_to(r.weaknesses);
  j.at("suggestions").get_to(r.suggestions);
  j.at("summary").get_to(r.summary);
  j.at("decision").get_to(r.decision);
  j.at("rationale").get_to(r.rationale);
}

}  // namespace gar::review
