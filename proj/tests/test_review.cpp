// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "gar/core/hash.hpp"
#include "gar/llm/prompt.hpp"
#include "gar/review/review.hpp"
#include "support.hpp"

using namespace gar;
using namespace gar::review;
using nlohmann::json;
using testing::thrown_code;

namespace {

struct World {
  std::vector<ingest::PaperRecord> corpus = testing::e2e_corpus();
  testing::Harness h = testing::make_harness();
  std::vector<graph::PaperGraph> graphs;
  memory::MemoryIndex index;
  novelty::NoveltyAssessment nov{3, "moderately novel", {}};

  World() {
    for (const auto& p : corpus) graphs.push_back(graph::build_graph(p.manuscript, *h.gateway));
    std::vector<memory::PaperInput> inputs;
    for (std::size_t i = 0; i < corpus.size(); ++i) inputs.push_back({&graphs[i], &corpus[i].reviews});
    index = memory::build_index(inputs, *h.gateway, 1);
  }
};

std::vector<persona::ReviewerPersona> committee(int n) {
  std::vector<persona::ReviewerPersona> out;
  for (int i = 0; i < n; ++i) out.push_back(persona::random_persona("R" + std::to_string(i), 5));
  return out;
}

}  // namespace

TEST_CASE("plan_rounds balances blocks") {
  for (int n = 1; n <= 13; ++n) {
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    for (int k = 1; k <= 6; ++k) {
      const auto plan = plan_rounds(ids, k);
      CHECK(static_cast<int>(plan.blocks.size()) == std::min(n, k));
      std::vector<int> flat;
      for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
        const int expected = n / k + (static_cast<int>(b) < n % k ? 1 : 0);
        CHECK(static_cast<int>(plan.blocks[b].size()) == expected);
        flat.insert(flat.end(), plan.blocks[b].begin(), plan.blocks[b].end());
      }
      CHECK(flat == ids);
    }
  }
  const auto plan = plan_rounds({0, 1, 2, 3, 4}, 3);
  CHECK(plan.blocks == std::vector<std::vector<int>>{{0, 1}, {2, 3}, {4}});
  CHECK(thrown_code([] { plan_rounds({0, 1}, 0); }) == Errc::KZero);
}

TEST_CASE("review values are truncated and round-trip through json") {
  const json v{{"summary", " s "},   {"strengths", {"a", " ", "b", "c"}},
               {"weaknesses", {"w"}}, {"suggestions", json::array()},
               {"soundness", 3},      {"presentation", 2},
               {"contribution", 4},   {"overall", 7},
               {"confidence", 5},     {"decision", "accept"},
               {"rationale", "fine"}};
  const Review r = review_from_value(v, "R1", 2, 2);
  CHECK(r.summary == "s");
  CHECK(r.strengths == std::vector<std::string>{"a", "b"});
  CHECK(r.round == 2);
  CHECK(r.overall == 7);
  CHECK(json(r).get<Review>() == r);
  const auto text = render_review(r);
  CHECK(text.find("- a\n- b") != std::string::npos);
  CHECK(text.find("- (none)") != std::string::npos);
}

TEST_CASE("retrieval never returns the reviewed paper") {
  World w;
  for (const auto& g : w.graphs) {
    std::vector<int> block;
    for (const auto& [c, _] : g.descriptors) block.push_back(c);
    const auto bundle = retrieve_for_block(g, block, w.index, 3, *w.h.gateway);
    REQUIRE(bundle.size() == block.size());
    for (std::size_t i = 0; i < bundle.size(); ++i) {
      CHECK(bundle[i].community_id == block[i]);
      CHECK(bundle[i].pairs.size() <= 3);
      for (std::size_t j = 0; j < bundle[i].pairs.size(); ++j) {
        CHECK(bundle[i].pairs[j].paper_id != g.paper_id);
        if (j > 0) CHECK(bundle[i].pairs[j - 1].similarity >= bundle[i].pairs[j].similarity);
      }
    }
    const auto rendered = render_prompt_block(g, block, bundle);
    CHECK(rendered.find("Idea " + std::to_string(block[0] + 1) + ":") == 0);
    CHECK(rendered.find("Most Similar Claims:") != std::string::npos);

    const auto empty = retrieve_for_block(g, block, memory::MemoryIndex{}, 3, *w.h.gateway);
    CHECK(render_prompt_block(g, block, empty).find("(none retrieved)") != std::string::npos);
  }
}

TEST_CASE("reviewer transcript has one round per block") {
  World w;
  const auto& g = w.graphs[0];
  const auto p = persona::random_persona("R0", 1);
  ReviewerOptions options;
  options.rounds = 3;
  const auto run = run_reviewer(p, g, w.nov, w.index, options, *w.h.gateway);
  const auto expected = std::min<std::size_t>(3, g.descriptors.size()) + 1;
  REQUIRE(run.transcript.size() == expected);
  for (std::size_t k = 0; k < run.transcript.size(); ++k) {
    CHECK(run.transcript[k].round == static_cast<int>(k));
    CHECK(run.transcript[k].reviewer_id == "R0");
    CHECK((run.transcript[k].decision == "accept" || run.transcript[k].decision == "reject"));
  }
  CHECK(run.final_review == run.transcript.back());

  options.rounds = 0;
  CHECK(run_reviewer(p, g, w.nov, w.index, options, *w.h.gateway).transcript.size() == 1);
}

TEST_CASE("committee size is enforced") {
  World w;
  ReviewerOptions options;
  for (int n : {0, 2, 7}) {
    CHECK(thrown_code([&] { run_committee(committee(n), w.graphs[0], w.nov, w.index, options, *w.h.gateway); }) ==
          Errc::CommitteeSizeOutOfRange);
  }
  auto dup = committee(3);
  dup[2].reviewer_id = dup[0].reviewer_id;
  CHECK(thrown_code([&] { run_committee(dup, w.graphs[0], w.nov, w.index, options, *w.h.gateway); }) ==
        Errc::PreconditionViolation);
  for (int n : {3, 6}) CHECK(run_committee(committee(n), w.graphs[0], w.nov, w.index, options, *w.h.gateway).size() == n);
}

TEST_CASE("committee resumes from transcripts") {
  World w;
  testing::TempDir dir("review");
  ReviewerOptions options;
  options.transcript_dir = dir.str();
  const auto first = run_committee(committee(3), w.graphs[1], w.nov, w.index, options, *w.h.gateway, 2);

  // A fresh gateway with no cache and no responder: any model call would fail.
  auto offline = testing::make_harness(false);
  const auto resumed = run_committee(committee(3), w.graphs[1], w.nov, w.index, options, *offline.gateway, 2);
  CHECK(offline.chat->calls() == 0);
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(resumed[i].transcript == first[i].transcript);

  // Dropping the last round recomputes exactly that round.
  const auto last = static_cast<int>(first[0].transcript.size()) - 1;
  std::filesystem::remove(dir / ("R0/round_" + std::to_string(last) + ".json"));
  auto fresh = testing::make_harness();
  const auto again = run_committee(committee(3), w.graphs[1], w.nov, w.index, options, *fresh.gateway, 1);
  CHECK(again[0].transcript == first[0].transcript);
  CHECK(fresh.chat->calls() == 1);
}

TEST_CASE("runs are identical across worker counts") {
  World w;
  ReviewerOptions options;
  const auto a = run_committee(committee(4), w.graphs[2], w.nov, w.index, options, *w.h.gateway, 1);
  auto other = testing::make_harness();
  const auto b = run_committee(committee(4), w.graphs[2], w.nov, w.index, options, *other.gateway, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].transcript == b[i].transcript);
}
