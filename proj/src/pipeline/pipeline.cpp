// SPDX-License-Identifier: Apache-2.0

#include "gar/pipeline/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <random>
#include <set>

#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"
#include "gar/core/parallel.hpp"
#include "gar/eval/eval.hpp"
#include "gar/graph/paper_graph.hpp"
#include "gar/ingest/corpus.hpp"
#include "gar/llm/synthetic.hpp"
#include "gar/memory/memory.hpp"
#include "gar/meta/meta.hpp"
#include "gar/novelty/novelty.hpp"
#include "gar/persona/persona.hpp"
#include "gar/review/review.hpp"

namespace gar::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::unique_ptr<llm::Gateway> make_gateway(const Config& c) {
  llm::GatewayConfig gc = c.gateway;
  if (gc.cache_dir.empty()) gc.cache_dir = (fs::path(c.output_dir) / "cache").string();
  if (c.backend == "http") {
    auto chat = llm::HttpChatBackend::from_env();
    auto emb = llm::HttpEmbeddingBackend::from_env();
    if (std::getenv("GAR_LLM_URL") == nullptr || std::getenv("GAR_EMB_URL") == nullptr) {
      throw Error(Errc::InvalidConfig, "the http backend needs GAR_LLM_URL and GAR_EMB_URL");
    }
    return std::make_unique<llm::Gateway>(chat, emb, llm::TemplateRegistry::defaults(), gc);
  }
  auto chat = llm::make_synthetic_chat();
  auto emb = llm::make_hashing_embedder();
  if (!c.fixtures.empty()) llm::load_fixture_file(c.fixtures, *chat, *emb);
  return std::make_unique<llm::Gateway>(chat, emb, llm::TemplateRegistry::defaults(), gc);
}

json to_json(const RunManifest& m) {
  return {{"config", m.config},
          {"seed", m.seed},
          {"backend", {{"chat", m.chat_backend}, {"chat_model", m.chat_model}, {"embedding_model", m.embedding_model}}},
          {"inputs", m.inputs},
          {"artifacts", m.artifacts},
          {"decisions", m.decisions},
          {"timings", m.timings},
          {"backend_requests", m.backend_requests},
          {"cache_hits", m.cache_hits},
          {"warnings", m.warnings}};
}

std::map<std::string, std::string> hash_artifacts(const std::string& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel == "manifest.json" || rel.rfind("cache/", 0) == 0) continue;
    out[rel] = sha256_hex(read_file(e.path().string()));
  }
  return out;
}

namespace {

std::string safe_name(const std::string& id) {
  std::string out = id;
  for (char& ch : out) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') ch = '_';
  }
  return out;
}

void write_json(const fs::path& p, const json& j) { write_file(p.string(), j.dump(2) + "\n"); }

json read_json(const fs::path& p) {
  const json j = json::parse(read_file(p.string()), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::CorruptIndex, "cannot parse checkpoint " + p.string(), {{"path", p.string()}});
  return j;
}

class PhaseTimer {
 public:
  PhaseTimer(RunManifest& m, std::string phase)
      : m_(m), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
  ~PhaseTimer() {
    m_.timings[phase_] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  RunManifest& m_;
  std::string phase_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> sample_committee(const std::vector<std::string>& pool, int size, std::uint64_t seed) {
  if (pool.size() < static_cast<std::size_t>(size)) {
    throw Error(Errc::InsufficientCorpus,
                "committee of " + std::to_string(size) + " needs more personas than the " +
                    std::to_string(pool.size()) + " available",
                {{"needed", size}, {"available", pool.size()}});
  }
  std::vector<std::string> ids = pool;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < static_cast<std::size_t>(size); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(static_cast<std::size_t>(size));
  return ids;
}

struct PaperState {
  const ingest::PaperRecord* record = nullptr;
  graph::PaperGraph graph;
  std::vector<std::string> warnings;
};

}  // namespace

RunManifest run_pipeline(const Config& c, llm::Gateway& gateway) {
  validate(c);
  if (c.corpus.empty()) throw Error(Errc::InvalidConfig, "run.corpus is required");
  RunManifest manifest;
  manifest.config = to_json(c);
  manifest.seed = c.seed;
  manifest.chat_backend = gateway.chat_backend_id();
  manifest.chat_model = gateway.chat_model_id();
  manifest.embedding_model = gateway.embedding_model_id();

  const fs::path out = c.output_dir;
  fs::create_directories(out);
  const ingest::ChunkingOptions chunking{c.max_chunk_tokens};

  std::vector<ingest::PaperRecord> corpus;
  std::vector<ingest::PaperRecord> targets;
  {
    PhaseTimer t(manifest, "ingest");
    corpus = ingest::load_corpus(c.corpus, chunking);
    manifest.inputs[c.corpus] = sha256_hex(read_file(c.corpus));
    if (c.targets.empty()) {
      targets = corpus;
    } else {
      targets = ingest::load_corpus(c.targets, chunking);
      manifest.inputs[c.targets] = sha256_hex(read_file(c.targets));
    }
    if (targets.empty()) throw Error(Errc::PreconditionViolation, "no target papers to review");
  }

  // Phase 1: graph construction for every corpus and target paper.
  std::vector<PaperState> papers;
  std::map<std::string, std::size_t> paper_pos;
  for (const auto* set : {&corpus, &targets}) {
    for (const auto& rec : *set) {
      if (paper_pos.emplace(rec.manuscript.id, papers.size()).second) papers.push_back({&rec, {}, {}});
    }
  }
  {
    PhaseTimer t(manifest, "graph");
    parallel_for(papers.size(), c.workers, [&](std::size_t i) {
      PaperState& st = papers[i];
      const std::string& id = st.record->manuscript.id;
      const fs::path path = out / "graphs" / (safe_name(id) + ".json");
      if (fs::exists(path)) {
        st.graph = read_json(path).get<graph::PaperGraph>();
        return;
      }
      graph::GraphOptions go;
      go.leiden.seed = derive_seed(c.seed, "graph/" + id);
      go.leiden.restarts = c.leiden_restarts;
      go.leiden.resolution = c.resolution;
      go.workers = 1;
      graph::BuildReport report;
      st.graph = graph::build_graph(st.record->manuscript, gateway, go, &report);
      for (const auto& w : report.warnings) st.warnings.push_back(id + ": " + w);
      json rj;
      graph::to_json(rj, report);
      write_json(out / "graphs" / (safe_name(id) + ".report.json"), rj);
      write_json(path, st.graph);
    });
  }

  // Memory of (descriptor, human comment) pairs and of meta-reviews.
  memory::MemoryIndex index;
  memory::MetaMemory meta_memory;
  std::map<std::string, std::vector<llm::EmbeddingVector>> signature_of;
  {
    PhaseTimer t(manifest, "memory");
    const fs::path mem_dir = out / "memory";
    if (fs::exists(mem_dir / "entries.jsonl")) {
      index = memory::load_index(mem_dir.string());
    } else {
      std::vector<memory::PaperInput> inputs;
      for (const auto& rec : corpus) {
        inputs.push_back({&papers[paper_pos.at(rec.manuscript.id)].graph, &rec.reviews});
      }
      index = memory::build_index(inputs, gateway, c.workers);
      memory::save_index(index, mem_dir.string());
    }
    for (auto& s : memory::signatures(index)) signature_of[s.paper_id] = std::move(s.descriptors);

    const fs::path meta_dir = out / "meta_memory";
    if (fs::exists(meta_dir / "meta_entries.jsonl")) {
      meta_memory = memory::load_meta_memory(meta_dir.string());
    } else {
      std::vector<memory::MetaMemoryEntry> entries;
      for (const auto& rec : corpus) {
        if (!rec.meta_review_text) continue;
        const auto it = signature_of.find(rec.manuscript.id);
        if (it == signature_of.end() || it->second.empty()) {
          manifest.warnings.push_back(rec.manuscript.id + ": no descriptors, meta-review not stored");
          continue;
        }
        entries.push_back({rec.manuscript.id, it->second, *rec.meta_review_text});
      }
      meta_memory = memory::MetaMemory(std::move(entries));
      memory::save_meta_memory(meta_memory, meta_dir.string());
    }
  }

  // Phase 2: reviewer selection.
  std::map<std::string, persona::ReviewerPersona> personas;
  std::map<std::string, std::vector<std::string>> committees;
  {
    PhaseTimer t(manifest, "personas");
    const fs::path path = out / "personas.json";
    if (fs::exists(path)) {
      for (const auto& p : read_json(path)) personas.emplace(p.at("reviewer_id").get<std::string>(), p.get<persona::ReviewerPersona>());
    } else if (c.persona_mode == "historical") {
      persona::PersonaOptions po;
      po.comparisons = c.comparisons;
      po.seed = derive_seed(c.seed, "persona");
      po.max_focus_areas = c.max_focus_areas;
      po.workers = c.workers;
      personas = persona::build_personas(corpus, gateway, po);
    }
    for (const auto& rec : targets) {
      const std::string& id = rec.manuscript.id;
      if (c.persona_mode == "random") {
        for (int i = 0; i < c.committee_size; ++i) {
          const std::string rid = id + "/R" + std::to_string(i + 1);
          if (!personas.count(rid)) personas.emplace(rid, persona::random_persona(rid, derive_seed(c.seed, "persona/random/" + rid)));
          committees[id].push_back(rid);
        }
      } else {
        std::vector<std::string> pool;
        for (const auto& [rid, _] : personas) pool.push_back(rid);
        committees[id] = sample_committee(pool, c.committee_size, derive_seed(c.seed, "committee/" + id));
      }
    }
    json pj = json::array();
    for (const auto& [_, p] : personas) pj.push_back(p);
    write_json(path, pj);
    write_json(out / "committees.json", committees);
  }

  // Phases 3 and 4: committee reviews and meta-review per target.
  auto local = novelty::LocalPriorIndex::build(corpus, gateway);
  auto external = c.external_search ? novelty::ExternalSearchClient::from_env(c.gateway.requests_per_minute) : nullptr;
  std::vector<meta::MetaReview> metas(targets.size());
  std::vector<std::vector<review::Review>> finals(targets.size());
  std::vector<std::vector<std::string>> target_warnings(targets.size());
  {
    PhaseTimer t(manifest, "review_and_meta");
    parallel_for(targets.size(), c.workers, [&](std::size_t i) {
      const ingest::PaperRecord& rec = targets[i];
      const std::string& id = rec.manuscript.id;
      const std::string name = safe_name(id);
      const graph::PaperGraph& g = papers[paper_pos.at(id)].graph;
      Diagnostics diag;

      const fs::path nov_path = out / "novelty" / (name + ".json");
      novelty::NoveltyAssessment nov;
      if (fs::exists(nov_path)) {
        nov = read_json(nov_path).at("assessment").get<novelty::NoveltyAssessment>();
      } else {
        const auto keywords = novelty::extract_novelty_keywords(rec.manuscript, gateway, c.max_keywords);
        const auto candidates = novelty::search_prior_work(keywords, rec.manuscript.year, local, gateway, external.get(),
                                                           static_cast<std::size_t>(c.max_candidates), &diag);
        nov = novelty::assess_novelty(rec.manuscript, candidates, g.acronyms, gateway, &diag);
        write_json(nov_path, {{"keywords", keywords}, {"candidates", candidates}, {"assessment", nov}});
      }

      std::vector<persona::ReviewerPersona> members;
      for (const auto& rid : committees.at(id)) members.push_back(personas.at(rid));
      review::ReviewerOptions ro;
      ro.rounds = c.rounds;
      ro.retrieved = c.retrieved;
      ro.max_items = c.max_items;
      ro.transcript_dir = (out / "reviews" / name).string();
      for (auto& run : review::run_committee(members, g, nov, index, ro, gateway, 1)) {
        finals[i].push_back(std::move(run.final_review));
      }
      write_json(out / "reviews" / name / "final.json", finals[i]);

      if (c.meta_mode == "threshold") {
        metas[i] = meta::threshold_meta(finals[i], c.threshold);
      } else {
        const auto sig = signature_of.count(id) ? signature_of.at(id) : memory::graph_signature(g, gateway);
        meta::AgenticOptions mo{c.exemplars, c.turns, c.meta_tau};
        metas[i] = meta::agentic_meta(finals[i], meta_memory, sig, id, mo, gateway, &diag);
      }
      write_json(out / "meta" / (name + ".json"), metas[i]);
      for (auto& w : diag.warnings) target_warnings[i].push_back(id + ": " + w);
    });
  }

  {
    PhaseTimer t(manifest, "eval");
    std::vector<bool> pred;
    std::vector<bool> pred_threshold;
    std::vector<bool> truth;
    std::string csv = "paper_id,decision,truth\n";
    bool complete = true;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& rec = targets[i];
      manifest.decisions[rec.manuscript.id] = ingest::to_string(metas[i].decision);
      if (!rec.decision || rec.reviews.size() < static_cast<std::size_t>(c.min_reviews)) {
        complete = false;
        continue;
      }
      pred.push_back(meta::to_binary(metas[i].decision) == meta::Binary::Accept);
      pred_threshold.push_back(meta::mean_score(finals[i]) >= c.threshold);
      truth.push_back(meta::to_binary(*rec.decision) == meta::Binary::Accept);
      csv += rec.manuscript.id + "," + ingest::to_string(metas[i].decision) + "," + ingest::to_string(*rec.decision) + "\n";
    }
    if (complete) {
      write_file((out / "eval" / "predictions.csv").string(), csv);
      write_json(out / "eval" / "classification.json",
                 {{"meta", eval::to_json(eval::classification_metrics(pred, truth))},
                  {"threshold", eval::to_json(eval::classification_metrics(pred_threshold, truth))},
                  {"papers", truth.size()}});
    } else {
      manifest.warnings.push_back("classification skipped: some targets lack a decision or enough human reviews");
    }
  }

  for (const auto& p : papers) manifest.warnings.insert(manifest.warnings.end(), p.warnings.begin(), p.warnings.end());
  for (const auto& w : target_warnings) manifest.warnings.insert(manifest.warnings.end(), w.begin(), w.end());
  manifest.artifacts = hash_artifacts(out.string());
  manifest.backend_requests = gateway.backend_requests();
  manifest.cache_hits = gateway.cache_hits();
  write_json(out / "manifest.json", to_json(manifest));
  return manifest;
}

}  // namespace gar::pipeline
