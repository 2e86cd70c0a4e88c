// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "doctest.h"
#include "gar/core/error.hpp"
#include "gar/graph/paper_graph.hpp"
#include "gar/llm/prompt.hpp"
#include "support.hpp"

using namespace gar;
using namespace gar::graph;
using nlohmann::json;

namespace {

Entity entity(const std::string& id, EntityKind kind, const std::string& label) {
  Entity e;
  e.entity_id = id;
  e.kind = kind;
  e.label = label;
  e.source_chunk_ids = {id.substr(0, id.find('/'))};
  return e;
}

Relation relation(const std::string& s, const std::string& t, double w = 1.0, const std::string& desc = "") {
  return Relation{s, t, "uses", desc, w};
}

}  // namespace

TEST_CASE("combine_relations sums pairs and drops self-loops") {
  const std::vector<Relation> in{relation("a", "b", 1.0, "x"), relation("b", "a", 2.0, "y"), relation("c", "c"),
                                 relation("a", "c", 0.5)};
  const auto out = combine_relations(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].source == "a");
  CHECK(out[0].target == "b");
  CHECK(out[0].weight == 3.0);
  CHECK(out[0].description == "x; y");
  CHECK(out[1].weight == 0.5);

  const auto merged = combine_relations(in, {{"c", "b"}});
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].weight == 3.5);
}

TEST_CASE("to_weighted_graph combines parallel relations") {
  const std::vector<Entity> es{entity("c1/e1", EntityKind::Idea, "x"), entity("c1/e2", EntityKind::Claim, "y"),
                               entity("c1/e3", EntityKind::Claim, "z")};
  const auto g = to_weighted_graph(es, {relation("c1/e1", "c1/e2"), relation("c1/e2", "c1/e1", 2.0)});
  CHECK(g.size() == 3);
  CHECK(g.weight(0, 1) == 3.0);
  CHECK(g.degree(2) == 0.0);
}

TEST_CASE("extract_elements drops relations with unknown endpoints") {
  auto h = testing::make_harness(false);
  h.chat->add_response(llm::tmpl::kExtract, "*",
                       json{{"entities",
                             {{{"name", "sparse attention"}, {"kind", "idea"}},
                              {{"name", "linear cost"}, {"kind", "claim"}},
                              {{"name", "sparse attention"}, {"kind", "idea"}}}},
                            {"relations",
                             {{{"source", "sparse attention"}, {"target", "linear cost"}, {"kind", "yields"},
                               {"description", ""}},
                              {{"source", "sparse attention"}, {"target", "ghost"}, {"kind", "yields"},
                               {"description", ""}}}}}
                           .dump());
  ingest::Chunk chunk{"P/c1", "Method", "Sparse attention yields linear cost.", 9};
  Diagnostics diag;
  const auto out = extract_elements(chunk, {}, *h.gateway, &diag);
  REQUIRE(out.entities.size() == 2);
  CHECK(out.entities[0].entity_id == "P/c1/e1");
  CHECK(out.entities[1].entity_id == "P/c1/e2");
  REQUIRE(out.relations.size() == 1);
  CHECK(out.relations[0].source == "P/c1/e1");
  CHECK(out.relations[0].target == "P/c1/e2");
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("merge_concepts collapses valid groups and rejects invalid ones") {
  auto h = testing::make_harness(false);
  h.chat->add_response(llm::tmpl::kMerge, "*",
                       json{{"merges",
                             {{{"ids", {"c2/e1", "c1/e1"}}, {"label", "attention"}},
                              {{"ids", {"c1/e2", "c2/e2"}}},
                              {{"ids", {"c1/e3", "c9/e9"}}}}}}
                           .dump());
  Elements in;
  in.entities = {entity("c1/e1", EntityKind::Idea, "sparse attention"),
                 entity("c1/e2", EntityKind::Claim, "linear cost"),
                 entity("c1/e3", EntityKind::Evidence, "benchmark"),
                 entity("c2/e1", EntityKind::Idea, "attention sparsity"),
                 entity("c2/e2", EntityKind::Evidence, "linear cost")};
  in.relations = {relation("c1/e1", "c1/e2"), relation("c2/e1", "c1/e2"), relation("c1/e1", "c2/e1")};
  Diagnostics diag;
  const auto out = merge_concepts(in, {}, *h.gateway, &diag);
  CHECK(out.groups_applied == 1);
  CHECK(out.groups_rejected == 2);
  CHECK(diag.warnings.size() == 2);

  std::vector<std::string> ids;
  for (const auto& e : out.elements.entities) ids.push_back(e.entity_id);
  CHECK(ids == std::vector<std::string>{"c1/e2", "c1/e3", "c2/e1", "c2/e2"});
  const auto& rep = out.elements.entities[2];
  CHECK(rep.label == "attention");
  CHECK(rep.merged_from == std::vector<std::string>{"c2/e1", "c1/e1"});
  CHECK(rep.source_chunk_ids == std::vector<std::string>{"c2", "c1"});
  REQUIRE(out.elements.relations.size() == 1);
  CHECK(out.elements.relations[0].source == "c2/e1");
  CHECK(out.elements.relations[0].target == "c1/e2");
  CHECK(out.elements.relations[0].weight == 2.0);
}

TEST_CASE("describe_community requires members") {
  auto h = testing::make_harness();
  CHECK_THROWS_AS(describe_community(0, {}, {}, {}, *h.gateway), Error);
}

TEST_CASE("build_graph on a corpus paper") {
  const auto corpus = testing::e2e_corpus();
  auto h = testing::make_harness();
  GraphOptions options;
  options.leiden.seed = 3;
  options.workers = 2;
  BuildReport report;
  const auto g = build_graph(corpus[0].manuscript, *h.gateway, options, &report);

  CHECK(g.paper_id == corpus[0].manuscript.id);
  CHECK(report.chunks_processed == static_cast<int>(corpus[0].manuscript.chunks.size()));
  CHECK(report.entities_after_merge == static_cast<int>(g.entities.size()));
  CHECK(g.partition.size() == g.entities.size());

  std::set<int> communities;
  for (const auto& e : g.entities) {
    REQUIRE(g.partition.count(e.entity_id));
    communities.insert(g.partition.at(e.entity_id));
  }
  CHECK(static_cast<int>(communities.size()) == report.communities);
  CHECK(g.descriptors.size() == communities.size());
  for (const auto& [c, d] : g.descriptors) {
    CHECK(communities.count(c));
    CHECK(d.member_entity_ids == g.members(c));
    CHECK_FALSE(d.text.empty());
  }
  for (const auto& r : g.relations) {
    CHECK(g.find(r.source) != nullptr);
    CHECK(g.find(r.target) != nullptr);
    CHECK(r.source != r.target);
  }

  const auto wg = to_weighted_graph(g.entities, g.relations);
  if (wg.edge_count() > 0) {
    Partition p;
    for (const auto& e : g.entities) p.push_back(g.partition.at(e.entity_id));
    CHECK(modularity(wg, p) == doctest::Approx(report.modularity).epsilon(1e-12));
  }

  SUBCASE("json round trip") {
    const json j = g;
    CHECK(j.get<PaperGraph>() == g);
    CHECK(graph_hash(j.get<PaperGraph>()) == graph_hash(g));
  }
  SUBCASE("independent of worker count") {
    auto h2 = testing::make_harness();
    options.workers = 1;
    CHECK(graph_hash(build_graph(corpus[0].manuscript, *h2.gateway, options)) == graph_hash(g));
  }
}
