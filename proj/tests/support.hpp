// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit tests.

#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"
#include "gar/ingest/corpus.hpp"
#include "gar/llm/gateway.hpp"
#include "gar/llm/synthetic.hpp"

namespace testing {

inline std::string fixture_dir() { return GAR_FIXTURE_DIR; }

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("gar-test-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

struct Harness {
  std::shared_ptr<gar::llm::ScriptedBackend> chat;
  std::shared_ptr<gar::llm::ScriptedEmbedder> embedder;
  std::unique_ptr<gar::llm::Gateway> gateway;
};

/// Gateway over scripted backends. With `synthetic` the synthetic responder
/// and hashing embedder answer anything not scripted explicitly.
inline Harness make_harness(bool synthetic = true, gar::llm::GatewayConfig config = {}) {
  Harness h;
  h.chat = synthetic ? gar::llm::make_synthetic_chat() : std::make_shared<gar::llm::ScriptedBackend>();
  h.embedder = synthetic ? gar::llm::make_hashing_embedder() : std::make_shared<gar::llm::ScriptedEmbedder>();
  h.gateway = std::make_unique<gar::llm::Gateway>(h.chat, h.embedder, gar::llm::TemplateRegistry::defaults(), config);
  return h;
}

/// Code of the gar::Error thrown by f; anything else propagates.
template <class F>
gar::Errc thrown_code(F&& f) {
  try {
    f();
  } catch (const gar::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a gar::Error");
}

inline std::vector<gar::ingest::PaperRecord> e2e_corpus() {
  return gar::ingest::load_corpus(fixture_dir() + "/e2e/corpus.jsonl");
}

inline gar::ingest::ReviewRecord review(const std::string& paper, const std::string& reviewer, const std::string& text,
                                        int overall = 5, int confidence = 3) {
  gar::ingest::ReviewRecord r;
  r.paper_id = paper;
  r.reviewer_id = reviewer;
  r.text = text;
  r.soundness = 2;
  r.presentation = 2;
  r.contribution = 2;
  r.overall = overall;
  r.confidence = confidence;
  return r;
}

/// `papers` papers with `per_paper` reviews each, every review by a distinct
/// reviewer W<k> with distinct text. Reviewer "T" adds one review to Q0.
inline std::vector<gar::ingest::PaperRecord> wide_corpus(int papers, int per_paper) {
  std::vector<gar::ingest::PaperRecord> corpus(papers);
  int k = 0;
  for (int i = 0; i < papers; ++i) {
    auto& p = corpus[i];
    p.manuscript.id = "Q" + std::to_string(i);
    p.manuscript.year = 2000 + i % 20;
    for (int j = 0; j < per_paper; ++j, ++k) {
      p.reviews.push_back(review(p.manuscript.id, "W" + std::to_string(k), "review number " + std::to_string(k)));
    }
  }
  corpus[0].reviews.push_back(review("Q0", "T", "the target review"));
  return corpus;
}

/// Judge that flips a fair coin seeded by the prompt bindings, so every
/// distinct comparison gets an independent answer regardless of call order.
inline gar::llm::Responder fair_coin_judge(std::uint64_t seed) {
  return [seed](const gar::llm::ScriptCall& c) -> std::optional<std::string> {
    std::mt19937_64 rng(gar::derive_seed(seed, c.bindings_hash));
    return (rng() & 1U) ? R"({"preferred":"target"})" : R"({"preferred":"other"})";
  };
}

}  // namespace testing
