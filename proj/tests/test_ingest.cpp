// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include "doctest.h"
#include "gar/core/text.hpp"
#include "gar/ingest/corpus.hpp"
#include "gar/ingest/manuscript.hpp"
#include "support.hpp"

using namespace gar;
using namespace gar::ingest;
using nlohmann::json;

namespace {

const char* kDoc = R"(# A Study of Things

## Abstract

We study things.

## Introduction

Things matter (TM).


Second paragraph.   

## Method

Figure 1 shows the pipeline.
)";

json record(const std::string& id, int overall = 5) {
  return {{"id", id},
          {"title", "T"},
          {"abstract", "A"},
          {"year", 2023},
          {"markdown", kDoc},
          {"reviews",
           {{{"reviewer_id", "r1"}, {"text", "ok"}, {"soundness", 3}, {"presentation", 3}, {"contribution", 2},
             {"overall", overall}, {"confidence", 4}}}},
          {"meta_review", "fine"},
          {"decision", "accept_poster"}};
}

}  // namespace

TEST_CASE("markdown sections, title, abstract and normalization") {
  const auto m = parse_manuscript(kDoc, "p", 2023);
  CHECK(m.title == "A Study of Things");
  CHECK(m.abstract == "We study things.");
  REQUIRE(m.sections.size() == 4);
  CHECK(m.sections[2].heading == "Introduction");
  CHECK(m.sections[2].body == "Things matter (TM).\n\nSecond paragraph.");
  CHECK(m.introduction() == m.sections[2].body);
  for (const auto& c : m.chunks) CHECK(c.token_estimate == text::estimate_tokens(c.text));
  CHECK(m.chunks.front().chunk_id == "p#c0");
}

TEST_CASE("manuscript errors and headingless input") {
  try {
    parse_manuscript("  \n", "p", 2023);
    FAIL("expected EmptyDocument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyDocument);
  }
  Diagnostics diag;
  const auto m = parse_manuscript("just text", "p", 2023, {}, &diag);
  CHECK(m.sections.size() == 1);
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("chunks respect the token limit and preserve the text") {
  std::string body;
  for (int i = 0; i < 30; ++i) body += "Paragraph " + std::to_string(i) + " " + std::string(40, 'x') + "\n\n";
  body += std::string(500, 'y');
  body = normalize_body(body);
  const auto chunks = chunk_section(body, 20);
  REQUIRE(chunks.size() > 1);
  std::string joined;
  for (const auto& c : chunks) {
    CHECK(text::estimate_tokens(c) <= 20);
    joined += c;
  }
  std::string squashed_body;
  for (char ch : body) {
    if (!std::isspace(static_cast<unsigned char>(ch))) squashed_body += ch;
  }
  std::string squashed_chunks;
  for (char ch : joined) {
    if (!std::isspace(static_cast<unsigned char>(ch))) squashed_chunks += ch;
  }
  CHECK(squashed_body == squashed_chunks);
  CHECK(chunk_section("short", 1200) == std::vector<std::string>{"short"});
}

TEST_CASE("figure captions attach after their markers") {
  const auto m = parse_manuscript(kDoc, "p", 2023);
  CHECK(find_figure_markers(m.sections[3].body) == std::vector<std::string>{"figure-1"});
  const auto out = attach_figure_captions(m, {{"figure-1", "The pipeline."}});
  CHECK(out.sections[3].body == "Figure 1 shows the pipeline.\nThe pipeline.");
  try {
    attach_figure_captions(m, {{"figure-9", "x"}});
    FAIL("expected UnknownFigureId");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownFigureId);
  }
}

TEST_CASE("acronyms keep only expansions present in the text") {
  auto h = testing::make_harness(false);
  h.chat->add_response(llm::tmpl::kAcronyms, "*",
                       R"({"acronyms": [{"acronym": "TM", "expansion": "Things matter"},
                                        {"acronym": "XYZ", "expansion": "Invented words"}]})");
  Diagnostics diag;
  const auto table = extract_acronyms(parse_manuscript(kDoc, "p", 2023), *h.gateway, &diag);
  CHECK(table == AcronymTable{{"TM", "Things matter"}});
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("corpus loading and line-numbered errors") {
  testing::TempDir dir("ingest");
  {
    std::ofstream f(dir / "ok.jsonl");
    f << record("a").dump() << "\n\n" << record("b").dump() << "\n";
  }
  const auto corpus = load_corpus(dir / "ok.jsonl");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[1].manuscript.id == "b");
  CHECK(corpus[0].reviews[0].paper_id == "a");
  CHECK(corpus[0].decision == Decision::AcceptPoster);
  CHECK(load_corpus(dir / "ok.jsonl")[0].manuscript == corpus[0].manuscript);

  {
    std::ofstream f(dir / "range.jsonl");
    f << record("a").dump() << "\n" << record("b", 11).dump() << "\n";
  }
  try {
    load_corpus(dir / "range.jsonl");
    FAIL("expected ScoreOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ScoreOutOfRange);
    CHECK(e.details().at("line") == 2);
    CHECK(e.details().at("field") == "overall");
  }
  {
    std::ofstream f(dir / "bad.jsonl");
    f << record("a").dump() << "\n{not json\n";
  }
  try {
    load_corpus(dir / "bad.jsonl");
    FAIL("expected MalformedLine");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedLine);
    CHECK(e.details().at("line") == 2);
  }
}

TEST_CASE("ground truth needs a decision and enough reviews") {
  testing::TempDir dir("truth");
  auto rec = record("a");
  rec["decision"] = nullptr;
  std::ofstream(dir / "nodecision.jsonl") << rec.dump() << "\n";
  try {
    load_ground_truth(dir / "nodecision.jsonl");
    FAIL("expected MissingDecision");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingDecision);
  }
  std::ofstream(dir / "few.jsonl") << record("a").dump() << "\n";
  CHECK_THROWS_AS(load_ground_truth(dir / "few.jsonl", 3), Error);
  CHECK(load_ground_truth(dir / "few.jsonl", 1).size() == 1);
}

TEST_CASE("corpus records round-trip through JSON") {
  const auto rec = parse_paper_record(record("a").dump(), 1);
  const auto again = parse_paper_record(to_corpus_json(rec).dump(), 1);
  CHECK(again.manuscript == rec.manuscript);
  CHECK(again.reviews == rec.reviews);
  CHECK(again.decision == rec.decision);
}
