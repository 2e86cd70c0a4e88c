// SPDX-License-Identifier: Apache-2.0

#include "gar/memory/memory.hpp"

#include <algorithm>
#include <cmath>

#include "gar/core/parallel.hpp"
#include "gar/core/text.hpp"
#include "gar/llm/gateway.hpp"

namespace gar::memory {

double cosine(const llm::EmbeddingVector& a, const llm::EmbeddingVector& b) {
  if (a.model_id != b.model_id) {
    throw Error(Errc::ModelMismatch, "embeddings from different models: " + a.model_id + " vs " + b.model_id,
                {{"left", a.model_id}, {"right", b.model_id}});
  }
  if (a.values.size() != b.values.size()) {
    throw Error(Errc::ModelMismatch, "embedding lengths differ",
                {{"left", a.values.size()}, {"right", b.values.size()}});
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double x = a.values[i];
    const double y = b.values[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw Error(Errc::ZeroVector, "cosine of a zero vector");
  // sqrt(na * na) == na exactly, so identical inputs give exactly 1.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

bool snippet_is_grounded(const std::string& snippet, const std::vector<std::string>& texts) {
  if (snippet == kSentinel) return true;
  if (snippet.empty()) return false;
  return std::any_of(texts.begin(), texts.end(), [&](const std::string& t) { return t.find(snippet) != std::string::npos; });
}

std::string find_mention(const graph::Descriptor& descriptor, const std::vector<ingest::ReviewRecord>& reviews,
                         llm::Gateway& gateway) {
  if (reviews.empty()) return kSentinel;
  static const llm::OutputSchema schema{"mention", {llm::Field::string("quote")}};
  std::vector<std::string> texts;
  std::string joined;
  for (const auto& r : reviews) {
    texts.push_back(r.text);
    if (!joined.empty()) joined += "\n---\n";
    joined += r.text;
  }
  const auto prompt =
      gateway.render(llm::tmpl::kMention, {{"sentinel", kSentinel}, {"descriptor", descriptor.text}, {"reviews", joined}});
  const std::string quote = text::trim(gateway.complete_structured(prompt, schema).at("quote").get<std::string>());
  return snippet_is_grounded(quote, texts) ? quote : std::string(kSentinel);
}

llm::EmbeddingVector descriptor_embedding(const graph::Descriptor& d, llm::Gateway& gateway) {
  if (d.embedding && d.embedding->model_id == gateway.embedding_model_id()) return *d.embedding;
  return gateway.embed(d.text);
}

std::vector<MemoryEntry> index_paper(const graph::PaperGraph& g, const std::vector<ingest::ReviewRecord>& reviews,
                                     llm::Gateway& gateway) {
  std::vector<MemoryEntry> out;
  for (const auto& [c, d] : g.descriptors) {
    MemoryEntry e;
    e.paper_id = g.paper_id;
    e.community_id = c;
    e.descriptor_text = d.text;
    e.review_snippet = find_mention(d, reviews, gateway);
    e.embedding = descriptor_embedding(d, gateway);
    out.push_back(std::move(e));
  }
  return out;
}

MemoryIndex::MemoryIndex(std::vector<MemoryEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    llm::validate(e.embedding);
    if (i == 0) model_id_ = e.embedding.model_id;
    if (e.embedding.model_id != model_id_) {
      throw Error(Errc::ModelMismatch, "index mixes embedding models " + model_id_ + " and " + e.embedding.model_id);
    }
    by_paper_[e.paper_id].push_back(e.community_id);
  }
}

MemoryIndex build_index(const std::vector<PaperInput>& papers, llm::Gateway& gateway, int workers) {
  std::vector<std::vector<MemoryEntry>> parts(papers.size());
  parallel_for(papers.size(), workers,
               [&](std::size_t i) { parts[i] = index_paper(*papers[i].graph, *papers[i].reviews, gateway); });
  std::vector<MemoryEntry> all;
  for (auto& p : parts) {
    for (auto& e : p) all.push_back(std::move(e));
  }
  return MemoryIndex(std::move(all));
}

std::vector<CommunityMatch> retrieve_communities(const MemoryIndex& index, const llm::EmbeddingVector& query,
                                                 const std::string& query_paper_id, int m) {
  if (index.empty()) throw Error(Errc::EmptyIndex, "memory index is empty");
  require(m >= 1, "M >= 1");
  std::vector<CommunityMatch> scored;
  for (const auto& e : index.entries()) {
    if (e.paper_id == query_paper_id) continue;
    scored.push_back({&e, cosine(query, e.embedding)});
  }
  std::sort(scored.begin(), scored.end(), [](const CommunityMatch& a, const CommunityMatch& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.entry->paper_id != b.entry->paper_id) return a.entry->paper_id < b.entry->paper_id;
    return a.entry->community_id < b.entry->community_id;
  });
  if (scored.size() > static_cast<std::size_t>(m)) scored.resize(static_cast<std::size_t>(m));
  return scored;
}

double structural_similarity(const std::vector<llm::EmbeddingVector>& query,
                             const std::vector<llm::EmbeddingVector>& other, double tau) {
  if (query.empty() || other.empty()) throw Error(Errc::EmptySet, "structural similarity needs two non-empty descriptor sets");
  require(tau >= 0.0 && tau < 1.0, "tau in [0, 1)");
  std::size_t matched = 0;
  for (const auto& c : query) {
    for (const auto& o : other) {
      if (cosine(c, o) > tau) {
        ++matched;
        break;
      }
    }
  }
  return static_cast<double>(matched) / static_cast<double>(std::max(query.size(), other.size()));
}

std::vector<PaperMatch> retrieve_papers(const std::vector<PaperSignature>& store,
                                        const std::vector<llm::EmbeddingVector>& query, int k, double tau,
                                        const std::optional<std::string>& exclude) {
  if (store.empty()) throw Error(Errc::EmptyStore, "paper store is empty");
  require(k >= 1, "K >= 1");
  std::vector<PaperMatch> out;
  for (const auto& s : store) {
    if (exclude && s.paper_id == *exclude) continue;
    if (s.descriptors.empty()) continue;
    out.push_back({s.paper_id, structural_similarity(query, s.descriptors, tau)});
  }
  std::sort(out.begin(), out.end(), [](const PaperMatch& a, const PaperMatch& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.paper_id < b.paper_id;
  });
  if (out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  return out;
}

std::vector<PaperSignature> signatures(const MemoryIndex& index) {
  std::map<std::string, PaperSignature> grouped;
  for (const auto& e : index.entries()) {
    auto& s = grouped[e.paper_id];
    s.paper_id = e.paper_id;
    s.descriptors.push_back(e.embedding);
  }
  std::vector<PaperSignature> out;
  for (auto& [_, s] : grouped) out.push_back(std::move(s));
  return out;
}

std::vector<llm::EmbeddingVector> graph_signature(const graph::PaperGraph& g, llm::Gateway& gateway) {
  std::vector<llm::EmbeddingVector> out;
  for (const auto& [_, d] : g.descriptors) out.push_back(descriptor_embedding(d, gateway));
  return out;
}

MetaMemory::MetaMemory(std::vector<MetaMemoryEntry> entries) : entries_(std::move(entries)) {
  std::string model;
  for (const auto& e : entries_) {
    if (text::trim(e.meta_review_text).empty()) {
      throw Error(Errc::PreconditionViolation, "meta-memory entry " + e.paper_id + " has an empty meta-review");
    }
    for (const auto& v : e.graph_signature) {
      llm::validate(v);
      if (model.empty()) model = v.model_id;
      if (v.model_id != model) throw Error(Errc::ModelMismatch, "meta-memory mixes embedding models");
    }
  }
}

std::vector<MetaMemory::Match> MetaMemory::retrieve(const std::vector<llm::EmbeddingVector>& query, int k, double tau,
                                                    const std::optional<std::string>& exclude) const {
  if (entries_.empty()) throw Error(Errc::EmptyStore, "meta-memory is empty");
  std::vector<PaperSignature> store;
  std::map<std::string, const MetaMemoryEntry*> by_id;
  for (const auto& e : entries_) {
    store.push_back({e.paper_id, e.graph_signature});
    by_id[e.paper_id] = &e;
  }
  std::vector<Match> out;
  for (const auto& m : retrieve_papers(store, query, k, tau, exclude)) out.push_back({by_id.at(m.paper_id), m.score});
  return out;
}

}  // namespace gar::memory
