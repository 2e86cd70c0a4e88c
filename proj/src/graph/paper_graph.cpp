// SPDX-License-Identifier: Apache-2.0

#include "gar/graph/paper_graph.hpp"

#include <algorithm>
#include <set>

#include "gar/core/hash.hpp"
#include "gar/core/parallel.hpp"
#include "gar/core/text.hpp"
#include "gar/llm/gateway.hpp"

namespace gar::graph {

using nlohmann::json;

std::string to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Idea: return "idea";
    case EntityKind::Claim: return "claim";
    case EntityKind::TechnicalDetail: return "technical_detail";
    case EntityKind::Evidence: return "evidence";
  }
  return "idea";
}

std::optional<EntityKind> parse_entity_kind(const std::string& s) {
  if (s == "idea") return EntityKind::Idea;
  if (s == "claim") return EntityKind::Claim;
  if (s == "technical_detail") return EntityKind::TechnicalDetail;
  if (s == "evidence") return EntityKind::Evidence;
  return std::nullopt;
}

const Entity* PaperGraph::find(const std::string& entity_id) const {
  for (const auto& e : entities) {
    if (e.entity_id == entity_id) return &e;
  }
  return nullptr;
}

std::vector<std::string> PaperGraph::members(int community) const {
  std::vector<std::string> out;
  for (const auto& e : entities) {
    const auto it = partition.find(e.entity_id);
    if (it != partition.end() && it->second == community) out.push_back(e.entity_id);
  }
  return out;
}

namespace {

const llm::OutputSchema& elements_schema() {
  static const llm::OutputSchema schema{
      "elements",
      {llm::Field::object_list("entities", {llm::Field::string("name", true),
                                            llm::Field::enumeration("kind", {"idea", "claim", "technical_detail",
                                                                             "evidence"})}),
       llm::Field::object_list("relations",
                               {llm::Field::string("source", true), llm::Field::string("target", true),
                                llm::Field::string("kind", true), llm::Field::string("description"),
                                llm::Field::positive_number("weight").optional()})}};
  return schema;
}

const llm::OutputSchema& merges_schema() {
  static const llm::OutputSchema schema{
      "merges", {llm::Field::object_list("merges", {llm::Field::string_list("ids"), llm::Field::string("label").optional()})}};
  return schema;
}

const llm::OutputSchema& descriptor_schema() {
  static const llm::OutputSchema schema{"descriptor", {llm::Field::string("description", true)}};
  return schema;
}

std::string render_entities(const std::vector<Entity>& entities) {
  std::string out;
  for (const auto& e : entities) {
    if (!out.empty()) out += "\n";
    out += e.entity_id + " | " + to_string(e.kind) + " | " + e.label;
  }
  return out;
}

std::string render_relations(const std::vector<Relation>& relations, const std::map<std::string, std::string>& label) {
  if (relations.empty()) return "(none)";
  std::string out;
  for (const auto& r : relations) {
    if (!out.empty()) out += "\n";
    out += label.at(r.source) + " --" + r.kind + "--> " + label.at(r.target);
    if (!r.description.empty()) out += ": " + r.description;
  }
  return out;
}

}  // namespace

Elements extract_elements(const ingest::Chunk& chunk, const ingest::AcronymTable& acronyms, llm::Gateway& gateway,
                          Diagnostics* diag) {
  const auto prompt = gateway.render(
      llm::tmpl::kExtract,
      {{"acronyms", ingest::render_acronyms(acronyms)}, {"section", chunk.section_heading}, {"chunk", chunk.text}});
  const json value = gateway.complete_structured(prompt, elements_schema());

  Elements out;
  std::map<std::string, std::string> id_of;  // name -> entity id
  for (const auto& item : value.at("entities")) {
    const std::string name = text::trim(item.at("name").get<std::string>());
    if (id_of.count(name)) continue;
    Entity e;
    e.entity_id = chunk.chunk_id + "/e" + std::to_string(out.entities.size() + 1);
    e.kind = *parse_entity_kind(item.at("kind").get<std::string>());
    e.label = name;
    e.source_chunk_ids = {chunk.chunk_id};
    id_of.emplace(name, e.entity_id);
    out.entities.push_back(std::move(e));
  }
  for (const auto& item : value.at("relations")) {
    const std::string source = text::trim(item.at("source").get<std::string>());
    const std::string target = text::trim(item.at("target").get<std::string>());
    const auto s = id_of.find(source);
    const auto t = id_of.find(target);
    if (s == id_of.end() || t == id_of.end()) {
      warn(diag, chunk.chunk_id + ": dropped relation " + source + " -> " + target + " with an unknown endpoint");
      continue;
    }
    Relation r;
    r.source = s->second;
    r.target = t->second;
    r.kind = text::trim(item.at("kind").get<std::string>());
    r.description = item.at("description").get<std::string>();
    if (item.contains("weight") && !item["weight"].is_null()) r.weight = item["weight"].get<double>();
    out.relations.push_back(std::move(r));
  }
  return out;
}

std::vector<Relation> combine_relations(const std::vector<Relation>& relations,
                                        const std::map<std::string, std::string>& representative) {
  auto rep = [&](const std::string& id) {
    const auto it = representative.find(id);
    return it == representative.end() ? id : it->second;
  };
  std::vector<Relation> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& r : relations) {
    Relation moved = r;
    moved.source = rep(r.source);
    moved.target = rep(r.target);
    if (moved.source == moved.target) continue;
    const auto key = std::minmax(moved.source, moved.target);
    const auto [it, inserted] = index.emplace(std::make_pair(key.first, key.second), out.size());
    if (inserted) {
      out.push_back(std::move(moved));
      continue;
    }
    Relation& kept = out[it->second];
    kept.weight += moved.weight;
    if (!moved.description.empty() && kept.description.find(moved.description) == std::string::npos) {
      kept.description += kept.description.empty() ? moved.description : "; " + moved.description;
    }
  }
  return out;
}

MergeOutcome merge_concepts(const Elements& elements, const ingest::AcronymTable& acronyms, llm::Gateway& gateway,
                            Diagnostics* diag) {
  MergeOutcome outcome;
  if (elements.entities.size() < 2) {
    outcome.elements = {elements.entities, combine_relations(elements.relations)};
    return outcome;
  }
  const auto prompt = gateway.render(
      llm::tmpl::kMerge, {{"acronyms", ingest::render_acronyms(acronyms)}, {"entities", render_entities(elements.entities)}});
  const json value = gateway.complete_structured(prompt, merges_schema());

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < elements.entities.size(); ++i) position.emplace(elements.entities[i].entity_id, i);

  std::map<std::string, std::string> representative;
  std::map<std::string, std::string> new_label;
  for (const auto& group : value.at("merges")) {
    std::vector<std::string> ids;
    for (const auto& id : group.at("ids")) {
      const std::string s = text::trim(id.get<std::string>());
      if (std::find(ids.begin(), ids.end(), s) == ids.end()) ids.push_back(s);
    }
    if (ids.size() < 2) continue;
    std::string why;
    for (const auto& id : ids) {
      if (!position.count(id)) {
        why = "unknown id " + id;
      } else if (representative.count(id)) {
        why = id + " already merged";
      } else if (elements.entities[position[id]].kind != elements.entities[position[ids[0]]].kind) {
        why = "mixes kinds";
      }
      if (!why.empty()) break;
    }
    if (!why.empty()) {
      ++outcome.groups_rejected;
      warn(diag, "rejected merge of [" + text::join(ids, ", ") + "]: " + why);
      continue;
    }
    for (const auto& id : ids) representative[id] = ids[0];
    if (group.contains("label") && group["label"].is_string() && !text::trim(group["label"].get<std::string>()).empty()) {
      new_label[ids[0]] = text::trim(group["label"].get<std::string>());
    }
    ++outcome.groups_applied;
  }

  // Representatives keep their own position, which may follow other members.
  std::map<std::string, std::size_t> out_index;
  for (const auto& e : elements.entities) {
    const auto it = representative.find(e.entity_id);
    if (it != representative.end() && it->second != e.entity_id) continue;
    Entity kept = e;
    if (it != representative.end()) {
      kept.merged_from = {e.entity_id};
      if (new_label.count(e.entity_id)) kept.label = new_label[e.entity_id];
    }
    out_index[e.entity_id] = outcome.elements.entities.size();
    outcome.elements.entities.push_back(std::move(kept));
  }
  for (const auto& e : elements.entities) {
    const auto it = representative.find(e.entity_id);
    if (it == representative.end() || it->second == e.entity_id) continue;
    Entity& kept = outcome.elements.entities[out_index.at(it->second)];
    kept.merged_from.push_back(e.entity_id);
    for (const auto& c : e.source_chunk_ids) {
      if (std::find(kept.source_chunk_ids.begin(), kept.source_chunk_ids.end(), c) == kept.source_chunk_ids.end()) {
        kept.source_chunk_ids.push_back(c);
      }
    }
  }
  outcome.elements.relations = combine_relations(elements.relations, representative);
  return outcome;
}

Descriptor describe_community(int community_id, const std::vector<Entity>& members,
                              const std::vector<Relation>& relations, const ingest::AcronymTable& acronyms,
                              llm::Gateway& gateway) {
  require(!members.empty(), "community has at least one entity");
  std::map<std::string, std::string> label;
  for (const auto& e : members) label[e.entity_id] = e.label;
  std::vector<Relation> internal;
  for (const auto& r : relations) {
    if (label.count(r.source) && label.count(r.target)) internal.push_back(r);
  }
  std::string listing;
  for (const auto& e : members) {
    if (!listing.empty()) listing += "\n";
    listing += "- [" + to_string(e.kind) + "] " + e.label;
  }
  const auto prompt = gateway.render(llm::tmpl::kSummarize, {{"acronyms", ingest::render_acronyms(acronyms)},
                                                             {"entities", listing},
                                                             {"relations", render_relations(internal, label)}});
  const json value = gateway.complete_structured(prompt, descriptor_schema());
  Descriptor d;
  d.community_id = community_id;
  d.text = text::trim(value.at("description").get<std::string>());
  for (const auto& e : members) d.member_entity_ids.push_back(e.entity_id);
  return d;
}

WeightedGraph to_weighted_graph(const std::vector<Entity>& entities, const std::vector<Relation>& relations) {
  std::map<std::string, std::size_t> node;
  for (std::size_t i = 0; i < entities.size(); ++i) node.emplace(entities[i].entity_id, i);
  WeightedGraph g(entities.size());
  for (const auto& r : relations) g.add_edge(node.at(r.source), node.at(r.target), r.weight);
  return g;
}

PaperGraph build_graph(const ingest::Manuscript& m, llm::Gateway& gateway, const GraphOptions& options,
                       BuildReport* report) {
  BuildReport local;
  BuildReport& rep = report != nullptr ? *report : local;
  rep = BuildReport{};
  Diagnostics diag;

  PaperGraph g;
  g.paper_id = m.id;
  g.acronyms = ingest::extract_acronyms(m, gateway, &diag);

  // Per-chunk extraction; schema failures skip the chunk.
  std::vector<Elements> per_chunk(m.chunks.size());
  std::vector<std::string> skipped(m.chunks.size());
  std::vector<Diagnostics> chunk_diag(m.chunks.size());
  parallel_for(m.chunks.size(), options.workers, [&](std::size_t i) {
    try {
      per_chunk[i] = extract_elements(m.chunks[i], g.acronyms, gateway, &chunk_diag[i]);
    } catch (const Error& e) {
      if (e.code() != Errc::SchemaViolation) throw;
      skipped[i] = e.what();
    }
  });

  Elements all;
  for (std::size_t i = 0; i < m.chunks.size(); ++i) {
    for (auto& w : chunk_diag[i].warnings) diag.warn(std::move(w));
    if (!skipped[i].empty()) {
      rep.chunks_skipped.push_back({m.chunks[i].chunk_id, skipped[i]});
      continue;
    }
    ++rep.chunks_processed;
    std::map<std::string, std::string> renamed;
    for (auto& e : per_chunk[i].entities) {
      const std::string id = "e" + std::to_string(all.entities.size() + 1);
      renamed[e.entity_id] = id;
      e.entity_id = id;
      all.entities.push_back(std::move(e));
    }
    for (auto& r : per_chunk[i].relations) {
      r.source = renamed.at(r.source);
      r.target = renamed.at(r.target);
      all.relations.push_back(std::move(r));
    }
  }
  rep.entities_extracted = static_cast<int>(all.entities.size());

  MergeOutcome merged = merge_concepts(all, g.acronyms, gateway, &diag);
  g.entities = std::move(merged.elements.entities);
  g.relations = std::move(merged.elements.relations);
  rep.merges_applied = merged.groups_applied;
  rep.merges_rejected = merged.groups_rejected;
  rep.entities_after_merge = static_cast<int>(g.entities.size());
  rep.relations = static_cast<int>(g.relations.size());

  Partition partition(g.entities.size());
  if (g.relations.empty()) {
    for (std::size_t i = 0; i < partition.size(); ++i) partition[i] = static_cast<int>(i);
  } else {
    const WeightedGraph wg = to_weighted_graph(g.entities, g.relations);
    partition = detect_communities(wg, options.leiden);
    rep.modularity = modularity(wg, partition);
  }
  for (std::size_t i = 0; i < g.entities.size(); ++i) g.partition[g.entities[i].entity_id] = partition[i];

  const int k = partition.empty() ? 0 : *std::max_element(partition.begin(), partition.end()) + 1;
  rep.communities = k;
  std::vector<Descriptor> descriptors(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), options.workers, [&](std::size_t c) {
    std::vector<Entity> members;
    for (std::size_t i = 0; i < g.entities.size(); ++i) {
      if (partition[i] == static_cast<int>(c)) members.push_back(g.entities[i]);
    }
    descriptors[c] = describe_community(static_cast<int>(c), members, g.relations, g.acronyms, gateway);
  });
  for (auto& d : descriptors) g.descriptors.emplace(d.community_id, std::move(d));

  rep.warnings = std::move(diag.warnings);
  return g;
}

void to_json(json& j, const Entity& e) {
  j = json{{"entity_id", e.entity_id},
           {"kind", to_string(e.kind)},
           {"label", e.label},
           {"source_chunk_ids", e.source_chunk_ids},
           {"merged_from", e.merged_from}};
}

void from_json(const json& j, Entity& e) {
  j.at("entity_id").get_to(e.entity_id);
  const auto kind = parse_entity_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(Errc::PreconditionViolation, "unknown entity kind " + j.at("kind").get<std::string>());
  e.kind = *kind;
  j.at("label").get_to(e.label);
  j.at("source_chunk_ids").get_to(e.source_chunk_ids);
  j.at("merged_from").get_to(e.merged_from);
}

void to_json(json& j, const Relation& r) {
  j = json{{"source", r.source}, {"target", r.target}, {"kind", r.kind}, {"description", r.description},
           {"weight", r.weight}};
}

void from_json(const json& j, Relation& r) {
  j.at("source").get_to(r.source);
  j.at("target").get_to(r.target);
  j.at("kind").get_to(r.kind);
  j.at("description").get_to(r.description);
  j.at("weight").get_to(r.weight);
}

void to_json(json& j, const Descriptor& d) {
  j = json{{"community_id", d.community_id}, {"text", d.text}, {"member_entity_ids", d.member_entity_ids}};
  if (d.embedding) j["embedding"] = *d.embedding;
}

void from_json(const json& j, Descriptor& d) {
  j.at("community_id").get_to(d.community_id);
  j.at("text").get_to(d.text);
  j.at("member_entity_ids").get_to(d.member_entity_ids);
  if (j.contains("embedding") && !j["embedding"].is_null()) {
    d.embedding = j["embedding"].get<llm::EmbeddingVector>();
  } else {
    d.embedding.reset();
  }
}

void to_json(json& j, const PaperGraph& g) {
  json partition = json::object();
  for (const auto& [id, c] : g.partition) partition[id] = c;
  json descriptors = json::object();
  for (const auto& [c, d] : g.descriptors) descriptors[std::to_string(c)] = d;
  j = json{{"paper_id", g.paper_id},   {"acronyms", g.acronyms},     {"entities", g.entities},
           {"relations", g.relations}, {"partition", partition},     {"descriptors", descriptors}};
}

void from_json(const json& j, PaperGraph& g) {
  j.at("paper_id").get_to(g.paper_id);
  g.acronyms = j.value("acronyms", ingest::AcronymTable{});
  j.at("entities").get_to(g.entities);
  j.at("relations").get_to(g.relations);
  g.partition.clear();
  for (const auto& [id, c] : j.at("partition").items()) g.partition[id] = c.get<int>();
  g.descriptors.clear();
  for (const auto& [key, d] : j.at("descriptors").items()) g.descriptors[std::stoi(key)] = d.get<Descriptor>();
}

void to_json(json& j, const BuildReport& r) {
  json skipped = json::array();
  for (const auto& s : r.chunks_skipped) skipped.push_back({{"chunk_id", s.chunk_id}, {"reason", s.reason}});
  j = json{{"chunks_processed", r.chunks_processed},
           {"chunks_skipped", skipped},
           {"entities_extracted", r.entities_extracted},
           {"entities_after_merge", r.entities_after_merge},
           {"relations", r.relations},
           {"merges_applied", r.merges_applied},
           {"merges_rejected", r.merges_rejected},
           {"communities", r.communities},
           {"modularity", r.modularity},
           {"warnings", r.warnings}};
}

std::string graph_hash(const PaperGraph& g) { return sha256_hex(json(g).dump()); }

}  // namespace gar::graph
