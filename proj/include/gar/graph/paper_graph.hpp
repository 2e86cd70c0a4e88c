// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gar/core/error.hpp"
#include "gar/graph/community.hpp"
#include "gar/ingest/manuscript.hpp"
#include "gar/llm/embedding.hpp"
#include "json.hpp"

namespace gar::llm {
class Gateway;
}

namespace gar::graph {

enum class EntityKind { Idea, Claim, TechnicalDetail, Evidence };

std::string to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(const std::string& s);

struct Entity {
  std::string entity_id;
  EntityKind kind = EntityKind::Idea;
  std::string label;
  std::vector<std::string> source_chunk_ids;
  std::vector<std::string> merged_from;

  bool operator==(const Entity&) const = default;
};

struct Relation {
  std::string source;
  std::string target;
  std::string kind;
  std::string description;
  double weight = 1.0;

  bool operator==(const Relation&) const = default;
};

struct Descriptor {
  int community_id = 0;
  std::string text;
  std::vector<std::string> member_entity_ids;
  std::optional<llm::EmbeddingVector> embedding;

  bool operator==(const Descriptor&) const = default;
};

struct PaperGraph {
  std::string paper_id;
  ingest::AcronymTable acronyms;
  std::vector<Entity> entities;
  std::vector<Relation> relations;
  std::map<std::string, int> partition;  // entity_id -> community id
  std::map<int, Descriptor> descriptors;

  bool operator==(const PaperGraph&) const = default;

  const Entity* find(const std::string& entity_id) const;
  /// Entity ids of community c, in entity order.
  std::vector<std::string> members(int community) const;
};

struct Elements {
  std::vector<Entity> entities;
  std::vector<Relation> relations;
};

/// Entities and relations mentioned in one chunk. Entity ids are
/// "<chunk_id>/e<k>". Relations whose endpoints do not name an extracted
/// entity are dropped with a warning.
Elements extract_elements(const ingest::Chunk& chunk, const ingest::AcronymTable& acronyms, llm::Gateway& gateway,
                          Diagnostics* diag = nullptr);

struct MergeOutcome {
  Elements elements;
  int groups_applied = 0;
  int groups_rejected = 0;
};

/// Asks the model for groups of duplicate concepts and collapses each group
/// onto its first id. Groups that mix kinds, repeat ids or name unknown ids
/// are rejected. Relations are re-pointed; self-loops are dropped.
MergeOutcome merge_concepts(const Elements& elements, const ingest::AcronymTable& acronyms, llm::Gateway& gateway,
                            Diagnostics* diag = nullptr);

/// Re-points relations through `representative`, drops self-loops and sums
/// the weights of relations joining the same unordered pair. The first
/// relation of a pair keeps its direction and kind.
std::vector<Relation> combine_relations(const std::vector<Relation>& relations,
                                        const std::map<std::string, std::string>& representative = {});

/// Report-like summary of one community. Throws PreconditionViolation when
/// `members` is empty.
Descriptor describe_community(int community_id, const std::vector<Entity>& members,
                              const std::vector<Relation>& relations, const ingest::AcronymTable& acronyms,
                              llm::Gateway& gateway);

/// Undirected weighted view of the graph; node i is entities[i].
WeightedGraph to_weighted_graph(const std::vector<Entity>& entities, const std::vector<Relation>& relations);

struct SkippedChunk {
  std::string chunk_id;
  std::string reason;
};

struct BuildReport {
  int chunks_processed = 0;
  std::vector<SkippedChunk> chunks_skipped;
  int entities_extracted = 0;
  int entities_after_merge = 0;
  int relations = 0;
  int merges_applied = 0;
  int merges_rejected = 0;
  int communities = 0;
  double modularity = 0.0;  // 0 when the graph has no edges
  std::vector<std::string> warnings;
};

struct GraphOptions {
  LeidenOptions leiden;
  int workers = 4;
};

/// Acronyms, per-chunk extraction (concurrent), concept merging, community
/// detection and one descriptor per community. An edgeless graph gets one
/// singleton community per entity.
PaperGraph build_graph(const ingest::Manuscript& m, llm::Gateway& gateway, const GraphOptions& options = {},
                       BuildReport* report = nullptr);

/// SHA-256 over the canonical JSON encoding.
std::string graph_hash(const PaperGraph& g);

void to_json(nlohmann::json& j, const Entity& e);
void from_json(const nlohmann::json& j, Entity& e);
void to_json(nlohmann::json& j, const Relation& r);
void from_json(const nlohmann::json& j, Relation& r);
void to_json(nlohmann::json& j, const Descriptor& d);
void from_json(const nlohmann::json& j, Descriptor& d);
void to_json(nlohmann::json& j, const PaperGraph& g);
void from_json(const nlohmann::json& j, PaperGraph& g);
void to_json(nlohmann::json& j, const BuildReport& r);

}  // namespace gar::graph
