// SPDX-License-Identifier: Apache-2.0

#include <thread>

#include "doctest.h"
#include "gar/llm/prompt.hpp"
#include "gar/novelty/novelty.hpp"
#include "httplib.h"
#include "support.hpp"

using namespace gar;
using namespace gar::novelty;
using nlohmann::json;
using testing::thrown_code;

namespace {

std::vector<std::string> ids(const std::vector<PriorWorkCandidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.id);
  return out;
}

}  // namespace

TEST_CASE("keywords are lowercase, distinct and bounded") {
  auto h = testing::make_harness(false);
  h.chat->add_response(llm::tmpl::kNoveltyKeywords, "*",
                       R"({"keywords": ["Sparse  Attention", "sparse attention", "", "Long Context", "Memory"]})");
  const auto corpus = testing::e2e_corpus();
  CHECK(extract_novelty_keywords(corpus[0].manuscript, *h.gateway, 2) ==
        std::vector<std::string>{"sparse attention", "long context"});

  auto empty = testing::make_harness(false);
  empty.chat->add_response(llm::tmpl::kNoveltyKeywords, "*", R"({"keywords": [" "]})");
  CHECK(thrown_code([&] { extract_novelty_keywords(corpus[0].manuscript, *empty.gateway); }) ==
        Errc::SchemaViolation);
}

TEST_CASE("local search only returns strictly older papers") {
  const auto corpus = testing::e2e_corpus();
  auto h = testing::make_harness();
  const auto index = LocalPriorIndex::build(corpus, *h.gateway);
  CHECK(index.size() == 3);

  for (int year : {2020, 2022, 2023, 2024, 2030}) {
    const auto found = index.search({"attention", "graph"}, year, 10, *h.gateway);
    std::size_t older = 0;
    for (const auto& p : corpus) older += p.manuscript.year < year ? 1 : 0;
    CHECK(found.size() == older);
    for (const auto& c : found) CHECK(c.year < year);
  }
  CHECK(index.search({"attention"}, 2030, 1, *h.gateway).size() == 1);
  CHECK(thrown_code([&] { index.search({}, 2030, 1, *h.gateway); }) == Errc::EmptyQuery);
  CHECK(thrown_code([&] { search_prior_work({}, 2030, index, *h.gateway); }) == Errc::EmptyQuery);
}

TEST_CASE("external search with local fallback") {
  httplib::Server server;
  json seen;
  server.Post("/search", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    res.set_content(json{{"data",
                          {{{"id", "X1"}, {"title", "old"}, {"year", 2010}},
                           {{"id", "X2"}, {"title", "too new"}, {"year", 2024}},
                           {{"title", "no id"}, {"year", 2011}},
                           {{"id", "X3"}, {"title", "older"}, {"abstract", "a"}, {"year", 2005}}}}}
                        .dump(),
                    "application/json");
  });
  server.Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  const auto corpus = testing::e2e_corpus();
  auto h = testing::make_harness();
  const auto local = LocalPriorIndex::build(corpus, *h.gateway);

  ExternalSearchClient up(llm::HttpEndpoint{base + "/search", "", "", 5});
  Diagnostics diag;
  const auto found = search_prior_work({"sparse", "attention"}, 2024, local, *h.gateway, &up, 10, &diag);
  CHECK(ids(found) == std::vector<std::string>{"X1", "X3"});
  CHECK(seen.at("query") == "sparse attention");
  CHECK(seen.at("year_lt") == 2024);
  CHECK(diag.warnings.empty());

  ExternalSearchClient down(llm::HttpEndpoint{base + "/down", "", "", 5});
  CHECK(thrown_code([&] { down.search("q", 2024, 3); }) == Errc::SourceUnavailable);
  const auto fallback = search_prior_work({"sparse", "attention"}, 2024, local, *h.gateway, &down, 10, &diag);
  CHECK(ids(fallback) == ids(local.search({"sparse", "attention"}, 2024, 10, *h.gateway)));
  CHECK(diag.warnings.size() == 1);

  server.stop();
  t.join();
}

TEST_CASE("assessment drops unverifiable citations") {
  const auto corpus = testing::e2e_corpus();
  const std::vector<PriorWorkCandidate> candidates{{"P1", "t", "a", "", 2022}};
  auto h = testing::make_harness(false);
  h.chat->add_response(llm::tmpl::kNovelty, "*",
                       R"({"score": 3, "explanation": " close to [P1] ", "cited_ids": ["P1", "ghost", "P1"]})");
  Diagnostics diag;
  const auto a = assess_novelty(corpus[2].manuscript, candidates, {}, *h.gateway, &diag);
  CHECK(a.score == 3);
  CHECK(a.explanation == "close to [P1]");
  CHECK(a.cited_candidate_ids == std::vector<std::string>{"P1"});
  CHECK(diag.warnings.size() == 1);
  const json j = a;
  CHECK(j.get<NoveltyAssessment>() == a);
}

TEST_CASE("out-of-range novelty scores are rejected") {
  const auto corpus = testing::e2e_corpus();
  for (int score : {0, 5}) {
    llm::GatewayConfig config;
    config.repair_retries = 2;
    auto h = testing::make_harness(false, config);
    h.chat->add_response(llm::tmpl::kNovelty, "*",
                         json{{"score", score}, {"explanation", "x"}, {"cited_ids", json::array()}}.dump());
    CHECK(thrown_code([&] { assess_novelty(corpus[0].manuscript, {}, {}, *h.gateway); }) == Errc::SchemaViolation);
    CHECK(h.chat->calls() == 3);
  }
}

TEST_CASE("synthetic assessment over corpus candidates") {
  const auto corpus = testing::e2e_corpus();
  auto h = testing::make_harness();
  const auto local = LocalPriorIndex::build(corpus, *h.gateway);
  const auto& m = corpus[2].manuscript;
  const auto kws = extract_novelty_keywords(m, *h.gateway);
  const auto candidates = search_prior_work(kws, m.year, local, *h.gateway);
  const auto a = assess_novelty(m, candidates, {}, *h.gateway);
  CHECK(a.score >= 1);
  CHECK(a.score <= 4);
  for (const auto& id : a.cited_candidate_ids) {
    const auto names = ids(candidates);
    CHECK(std::find(names.begin(), names.end(), id) != names.end());
  }
}
