// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gar/graph/paper_graph.hpp"
#include "gar/ingest/corpus.hpp"
#include "gar/llm/embedding.hpp"

namespace gar::llm {
class Gateway;
}

namespace gar::memory {

inline constexpr const char* kSentinel = "No specific mention was found in the review.";

/// Cosine similarity. Throws ModelMismatch (different model ids or lengths)
/// or ZeroVector.
double cosine(const llm::EmbeddingVector& a, const llm::EmbeddingVector& b);

struct MemoryEntry {
  std::string paper_id;
  int community_id = 0;
  std::string descriptor_text;
  std::string review_snippet;  // verbatim review quote or kSentinel
  llm::EmbeddingVector embedding;

  bool operator==(const MemoryEntry&) const = default;
};

/// True when `snippet` is kSentinel or a non-empty substring of one of the texts.
bool snippet_is_grounded(const std::string& snippet, const std::vector<std::string>& texts);

/// Asks whether the reviews mention the descriptor; an answer that is not a
/// verbatim substring of a review becomes the sentinel.
std::string find_mention(const graph::Descriptor& descriptor, const std::vector<ingest::ReviewRecord>& reviews,
                         llm::Gateway& gateway);

/// Descriptor embedding, reusing the stored one when it came from the
/// gateway's embedding model.
llm::EmbeddingVector descriptor_embedding(const graph::Descriptor& d, llm::Gateway& gateway);

/// One entry per descriptor of the graph.
std::vector<MemoryEntry> index_paper(const graph::PaperGraph& g, const std::vector<ingest::ReviewRecord>& reviews,
                                     llm::Gateway& gateway);

class MemoryIndex {
 public:
  MemoryIndex() = default;
  /// Throws ModelMismatch when entries disagree on the embedding model.
  explicit MemoryIndex(std::vector<MemoryEntry> entries);

  const std::vector<MemoryEntry>& entries() const { return entries_; }
  const std::map<std::string, std::vector<int>>& by_paper() const { return by_paper_; }
  const std::string& model_id() const { return model_id_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<MemoryEntry> entries_;
  std::map<std::string, std::vector<int>> by_paper_;
  std::string model_id_;
};

struct PaperInput {
  const graph::PaperGraph* graph;
  const std::vector<ingest::ReviewRecord>* reviews;
};

/// Indexes every paper (in parallel); entries keep the input order.
MemoryIndex build_index(const std::vector<PaperInput>& papers, llm::Gateway& gateway, int workers = 4);

struct CommunityMatch {
  const MemoryEntry* entry;
  double similarity;
};

/// Top-M entries by cosine to the query, excluding `query_paper_id`. Ties
/// are broken by (paper_id, community_id). Throws EmptyIndex.
std::vector<CommunityMatch> retrieve_communities(const MemoryIndex& index, const llm::EmbeddingVector& query,
                                                 const std::string& query_paper_id, int m);

/// Fraction of query descriptors with a partner in `other` whose cosine is
/// strictly above tau, over max(|query|, |other|). Throws EmptySet.
double structural_similarity(const std::vector<llm::EmbeddingVector>& query,
                             const std::vector<llm::EmbeddingVector>& other, double tau);

struct PaperSignature {
  std::string paper_id;
  std::vector<llm::EmbeddingVector> descriptors;
};

struct PaperMatch {
  std::string paper_id;
  double score;
};

/// Papers ranked by structural similarity to the query (descending, then
/// paper_id). Throws EmptyStore when `store` is empty.
std::vector<PaperMatch> retrieve_papers(const std::vector<PaperSignature>& store,
                                        const std::vector<llm::EmbeddingVector>& query, int k, double tau,
                                        const std::optional<std::string>& exclude = std::nullopt);

/// Descriptor embeddings grouped by paper, in paper_id order.
std::vector<PaperSignature> signatures(const MemoryIndex& index);

std::vector<llm::EmbeddingVector> graph_signature(const graph::PaperGraph& g, llm::Gateway& gateway);

struct MetaMemoryEntry {
  std::string paper_id;
  std::vector<llm::EmbeddingVector> graph_signature;
  std::string meta_review_text;

  bool operator==(const MetaMemoryEntry&) const = default;
};

class MetaMemory {
 public:
  MetaMemory() = default;
  /// Throws PreconditionViolation on an empty meta-review and ModelMismatch on mixed models.
  explicit MetaMemory(std::vector<MetaMemoryEntry> entries);

  const std::vector<MetaMemoryEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  struct Match {
    const MetaMemoryEntry* entry;
    double score;
  };
  /// Top-K papers by structural similarity. Throws EmptyStore.
  std::vector<Match> retrieve(const std::vector<llm::EmbeddingVector>& query, int k, double tau,
                              const std::optional<std::string>& exclude = std::nullopt) const;

 private:
  std::vector<MetaMemoryEntry> entries_;
};

/// entries.jsonl plus embeddings.bin (little-endian float32 with a header
/// holding the model id and an offset table).
void save_index(const MemoryIndex& index, const std::string& dir);
/// Throws Io or CorruptIndex.
MemoryIndex load_index(const std::string& dir);

void save_meta_memory(const MetaMemory& memory, const std::string& dir);
MetaMemory load_meta_memory(const std::string& dir);

/// Raw sidecar format shared by both stores.
void write_embeddings(const std::string& path, const std::string& model_id,
                      const std::vector<std::vector<float>>& vectors);
std::pair<std::string, std::vector<std::vector<float>>> read_embeddings(const std::string& path);

}  // namespace gar::memory
