// SPDX-License-Identifier: Apache-2.0

// gar: command-line entry point. Every subcommand prints JSON on stdout and,
// on failure, a JSON error object on stderr with a nonzero exit status.
// `replay` exits with 3 when the artifacts differ from the manifest.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"
#include "gar/eval/eval.hpp"
#include "gar/graph/paper_graph.hpp"
#include "gar/ingest/corpus.hpp"
#include "gar/memory/memory.hpp"
#include "gar/meta/meta.hpp"
#include "gar/novelty/novelty.hpp"
#include "gar/persona/persona.hpp"
#include "gar/pipeline/pipeline.hpp"
#include "gar/review/review.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gar;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::optional<int> workers;
  std::string cache_dir;
};

pipeline::Config resolve_config(const Globals& g) {
  pipeline::Config c = g.config.empty() ? pipeline::Config{} : pipeline::load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (!g.backend.empty()) c.backend = g.backend;
  if (g.workers) c.workers = *g.workers;
  if (!g.cache_dir.empty()) c.gateway.cache_dir = g.cache_dir;
  pipeline::validate(c);
  return c;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_file(out, j.dump(2) + "\n");
    std::cout << json{{"written", out}}.dump() << "\n";
  }
}

json load_json(const std::string& path) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::MalformedLine, path + " is not valid JSON", {{"path", path}});
  return j;
}

const ingest::PaperRecord& find_paper(const std::vector<ingest::PaperRecord>& corpus, const std::string& id) {
  for (const auto& r : corpus) {
    if (r.manuscript.id == id) return r;
  }
  throw Error(Errc::PreconditionViolation, "paper " + id + " is not in the corpus", {{"paper_id", id}});
}

std::vector<ingest::PaperRecord> load_corpus_for(const pipeline::Config& c, const std::string& path) {
  return ingest::load_corpus(path.empty() ? c.corpus : path, ingest::ChunkingOptions{c.max_chunk_tokens});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based agentic peer review"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "INI config file");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--backend", g.backend, "scripted | http")->check(CLI::IsMember({"scripted", "http"}));
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", g.cache_dir, "Response cache directory");

  std::function<void()> action;
  int status = 0;

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a corpus and summarize it");
  std::string corpus_path;
  bool ground_truth = false;
  ingest_cmd->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  ingest_cmd->add_flag("--ground-truth", ground_truth, "Require decisions and at least eval.min_reviews reviews");
  ingest_cmd->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      const ingest::ChunkingOptions chunking{c.max_chunk_tokens};
      const auto corpus = ground_truth
                              ? ingest::load_ground_truth(corpus_path, static_cast<std::size_t>(c.min_reviews), chunking)
                              : ingest::load_corpus(corpus_path, chunking);
      json papers = json::array();
      std::size_t reviews = 0;
      for (const auto& r : corpus) {
        reviews += r.reviews.size();
        papers.push_back({{"id", r.manuscript.id},
                          {"year", r.manuscript.year},
                          {"sections", r.manuscript.sections.size()},
                          {"chunks", r.manuscript.chunks.size()},
                          {"reviews", r.reviews.size()},
                          {"decision", r.decision ? json(ingest::to_string(*r.decision)) : json(nullptr)}});
      }
      emit({{"papers", papers}, {"paper_count", corpus.size()}, {"review_count", reviews}}, "");
    };
  });

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Build the paper graph of one manuscript");
  std::string paper_id;
  std::string out_path;
  graph_cmd->add_option("--corpus", corpus_path, "Corpus JSONL (default: run.corpus)");
  graph_cmd->add_option("--paper", paper_id, "Paper id")->required();
  graph_cmd->add_option("--out", out_path, "Output graph JSON");
  graph_cmd->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      const auto corpus = load_corpus_for(c, corpus_path);
      auto gw = pipeline::make_gateway(c);
      graph::GraphOptions go;
      go.leiden.seed = derive_seed(c.seed, "graph/" + paper_id);
      go.leiden.restarts = c.leiden_restarts;
      go.leiden.resolution = c.resolution;
      go.workers = c.workers;
      graph::BuildReport report;
      const auto pg = graph::build_graph(find_paper(corpus, paper_id).manuscript, *gw, go, &report);
      json rj;
      graph::to_json(rj, report);
      if (out_path.empty()) {
        emit({{"graph", pg}, {"report", rj}}, "");
      } else {
        write_file(out_path, json(pg).dump(2) + "\n");
        emit({{"written", out_path}, {"report", rj}, {"hash", graph::graph_hash(pg)}}, "");
      }
    };
  });

  // personas
  auto* persona_cmd = app.add_subcommand("personas", "Build reviewer personas");
  std::string mode = "historical";
  std::vector<std::string> ids;
  std::optional<int> comparisons;
  persona_cmd->add_option("--corpus", corpus_path, "Corpus JSONL (default: run.corpus)");
  persona_cmd->add_option("--mode", mode, "historical | random")->check(CLI::IsMember({"historical", "random"}));
  persona_cmd->add_option("--ids", ids, "Reviewer ids (default: all; required for random)")->delimiter(',');
  persona_cmd->add_option("-N,--comparisons", comparisons, "Comparisons per trait");
  persona_cmd->add_option("--out", out_path, "Output JSON");
  persona_cmd->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      json pj = json::array();
      if (mode == "random") {
        if (ids.empty()) throw Error(Errc::PreconditionViolation, "random personas need --ids");
        for (const auto& id : ids) pj.push_back(persona::random_persona(id, derive_seed(c.seed, "persona/random/" + id)));
      } else {
        const auto corpus = load_corpus_for(c, corpus_path);
        auto gw = pipeline::make_gateway(c);
        persona::PersonaOptions po;
        po.comparisons = comparisons.value_or(c.comparisons);
        po.seed = derive_seed(c.seed, "persona");
        po.max_focus_areas = c.max_focus_areas;
        po.workers = c.workers;
        for (const auto& [_, p] : persona::build_personas(corpus, *gw, po, ids)) pj.push_back(p);
      }
      emit(pj, out_path);
    };
  });

  // memory build / query
  auto* memory_cmd = app.add_subcommand("memory", "Build or query the review memory");
  memory_cmd->require_subcommand(1);
  auto* mem_build = memory_cmd->add_subcommand("build", "Index descriptor/comment pairs of a corpus");
  std::string graphs_dir;
  std::string index_dir;
  mem_build->add_option("--corpus", corpus_path, "Corpus JSONL (default: run.corpus)");
  mem_build->add_option("--graphs", graphs_dir, "Directory of <paper_id>.json graphs; missing graphs are built")->required();
  mem_build->add_option("--out", index_dir, "Index directory")->required();
  mem_build->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      const auto corpus = load_corpus_for(c, corpus_path);
      auto gw = pipeline::make_gateway(c);
      std::vector<graph::PaperGraph> graphs(corpus.size());
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const fs::path p = fs::path(graphs_dir) / (corpus[i].manuscript.id + ".json");
        if (fs::exists(p)) {
          graphs[i] = load_json(p.string()).get<graph::PaperGraph>();
        } else {
          graph::GraphOptions go;
          go.leiden.seed = derive_seed(c.seed, "graph/" + corpus[i].manuscript.id);
          go.leiden.restarts = c.leiden_restarts;
          go.workers = c.workers;
          graphs[i] = graph::build_graph(corpus[i].manuscript, *gw, go);
          write_file(p.string(), json(graphs[i]).dump(2) + "\n");
        }
      }
      std::vector<memory::PaperInput> inputs;
      for (std::size_t i = 0; i < corpus.size(); ++i) inputs.push_back({&graphs[i], &corpus[i].reviews});
      const auto index = memory::build_index(inputs, *gw, c.workers);
      memory::save_index(index, index_dir);
      std::vector<memory::MetaMemoryEntry> meta_entries;
      for (const auto& s : memory::signatures(index)) {
        const auto& rec = find_paper(corpus, s.paper_id);
        if (rec.meta_review_text) meta_entries.push_back({s.paper_id, s.descriptors, *rec.meta_review_text});
      }
      memory::save_meta_memory(memory::MetaMemory(std::move(meta_entries)), index_dir);
      std::size_t mentions = 0;
      for (const auto& e : index.entries()) mentions += e.review_snippet != memory::kSentinel;
      emit({{"entries", index.entries().size()}, {"mentions", mentions}, {"model", index.model_id()}, {"dir", index_dir}},
           "");
    };
  });
  auto* mem_query = memory_cmd->add_subcommand("query", "Retrieve the most similar stored descriptors");
  std::string query_text;
  std::string exclude;
  int top_m = 3;
  mem_query->add_option("--index", index_dir, "Index directory")->required();
  mem_query->add_option("--text", query_text, "Query descriptor text")->required();
  mem_query->add_option("-M", top_m, "Number of results")->check(CLI::PositiveNumber);
  mem_query->add_option("--exclude", exclude, "Paper id to exclude");
  mem_query->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      auto gw = pipeline::make_gateway(c);
      const auto index = memory::load_index(index_dir);
      json out = json::array();
      for (const auto& m : memory::retrieve_communities(index, gw->embed(query_text), exclude, top_m)) {
        out.push_back({{"paper_id", m.entry->paper_id},
                       {"community_id", m.entry->community_id},
                       {"similarity", m.similarity},
                       {"descriptor", m.entry->descriptor_text},
                       {"review_snippet", m.entry->review_snippet}});
      }
      emit(out, "");
    };
  });

  // novelty
  auto* novelty_cmd = app.add_subcommand("novelty", "Assess the novelty of one manuscript");
  std::string graph_path;
  novelty_cmd->add_option("--corpus", corpus_path, "Corpus JSONL with the paper and prior work (default: run.corpus)");
  novelty_cmd->add_option("--paper", paper_id, "Paper id")->required();
  novelty_cmd->add_option("--out", out_path, "Output JSON");
  novelty_cmd->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      const auto corpus = load_corpus_for(c, corpus_path);
      auto gw = pipeline::make_gateway(c);
      const auto& rec = find_paper(corpus, paper_id);
      Diagnostics diag;
      const auto acronyms = ingest::extract_acronyms(rec.manuscript, *gw, &diag);
      const auto keywords = novelty::extract_novelty_keywords(rec.manuscript, *gw, c.max_keywords);
      const auto local = novelty::LocalPriorIndex::build(corpus, *gw);
      auto external = c.external_search ? novelty::ExternalSearchClient::from_env() : nullptr;
      const auto candidates = novelty::search_prior_work(keywords, rec.manuscript.year, local, *gw, external.get(),
                                                         static_cast<std::size_t>(c.max_candidates), &diag);
      const auto a = novelty::assess_novelty(rec.manuscript, candidates, acronyms, *gw, &diag);
      emit({{"keywords", keywords}, {"candidates", candidates}, {"assessment", a}, {"warnings", diag.warnings}}, out_path);
    };
  });

  // review
  auto* review_cmd = app.add_subcommand("review", "Run a reviewer committee on one paper");
  std::string personas_path;
  std::string novelty_path;
  std::optional<int> committee;
  std::optional<int> rounds;
  std::optional<int> retrieved;
  review_cmd->add_option("--paper", paper_id, "Paper id (for memory exclusion)")->required();
  review_cmd->add_option("--graph", graph_path, "Paper graph JSON")->required();
  review_cmd->add_option("--index", index_dir, "Memory index directory (omit for no retrieval)");
  review_cmd->add_option("--personas", personas_path, "Personas JSON")->required();
  review_cmd->add_option("--novelty", novelty_path, "Novelty JSON from `gar novelty`")->required();
  review_cmd->add_option("--committee", committee, "Committee size (first N personas)");
  review_cmd->add_option("--rounds,-K", rounds, "Refinement rounds");
  review_cmd->add_option("-M", retrieved, "Retrieved pairs per descriptor");
  review_cmd->add_option("--out", out_path, "Transcript directory")->required();
  review_cmd->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      auto gw = pipeline::make_gateway(c);
      auto pg = load_json(graph_path).get<graph::PaperGraph>();
      pg.paper_id = paper_id;
      std::vector<persona::ReviewerPersona> personas;
      for (const auto& p : load_json(personas_path)) personas.push_back(p.get<persona::ReviewerPersona>());
      const int n = committee.value_or(c.committee_size);
      if (n < review::kMinCommittee || n > review::kMaxCommittee || static_cast<std::size_t>(n) > personas.size()) {
        throw Error(Errc::CommitteeSizeOutOfRange, "committee size " + std::to_string(n) + " is not available",
                    {{"committee", n}, {"personas", personas.size()}});
      }
      personas.resize(static_cast<std::size_t>(n));
      const json nj = load_json(novelty_path);
      const auto nov = (nj.contains("assessment") ? nj.at("assessment") : nj).get<novelty::NoveltyAssessment>();
      const memory::MemoryIndex index = index_dir.empty() ? memory::MemoryIndex{} : memory::load_index(index_dir);
      review::ReviewerOptions ro;
      ro.rounds = rounds.value_or(c.rounds);
      ro.retrieved = retrieved.value_or(c.retrieved);
      ro.max_items = c.max_items;
      ro.transcript_dir = out_path;
      std::vector<review::Review> finals;
      for (auto& run : review::run_committee(personas, pg, nov, index, ro, *gw, c.workers)) {
        finals.push_back(std::move(run.final_review));
      }
      write_file((fs::path(out_path) / "final.json").string(), json(finals).dump(2) + "\n");
      emit(finals, "");
    };
  });

  // meta
  auto* meta_cmd = app.add_subcommand("meta", "Aggregate committee reviews into a decision");
  std::string reviews_path;
  std::string meta_mode;
  std::optional<double> threshold;
  meta_cmd->add_option("--reviews", reviews_path, "final.json from `gar review`")->required();
  meta_cmd->add_option("--mode", meta_mode, "agentic | threshold")->check(CLI::IsMember({"agentic", "threshold"}));
  meta_cmd->add_option("--threshold", threshold, "Threshold on the mean overall score");
  meta_cmd->add_option("--meta-memory", index_dir, "Directory holding meta_entries.jsonl");
  meta_cmd->add_option("--graph", graph_path, "Paper graph JSON (agentic mode)");
  meta_cmd->add_option("--paper", paper_id, "Paper id to exclude from meta retrieval");
  meta_cmd->add_option("--out", out_path, "Output JSON");
  meta_cmd->callback([&] {
    action = [&] {
      const auto c = resolve_config(g);
      std::vector<review::Review> reviews;
      for (const auto& r : load_json(reviews_path)) reviews.push_back(r.get<review::Review>());
      const std::string m = meta_mode.empty() ? c.meta_mode : meta_mode;
      if (m == "threshold") {
        emit(meta::threshold_meta(reviews, threshold.value_or(c.threshold)), out_path);
        return;
      }
      auto gw = pipeline::make_gateway(c);
      const memory::MetaMemory mm = index_dir.empty() ? memory::MetaMemory{} : memory::load_meta_memory(index_dir);
      std::vector<llm::EmbeddingVector> sig;
      if (!graph_path.empty()) sig = memory::graph_signature(load_json(graph_path).get<graph::PaperGraph>(), *gw);
      Diagnostics diag;
      const auto result = meta::agentic_meta(reviews, mm, sig, paper_id.empty() ? std::nullopt : std::optional(paper_id),
                                             {c.exemplars, c.turns, c.meta_tau}, *gw, &diag);
      for (const auto& w : diag.warnings) std::cerr << json{{"warning", w}}.dump() << "\n";
      emit(result, out_path);
    };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluation utilities");
  eval_cmd->require_subcommand(1);
  auto* bt_cmd = eval_cmd->add_subcommand("bt", "Fit Bradley-Terry scores to a match log CSV");
  std::string log_path;
  double tol = 1e-8;
  int max_iter = 10000;
  bt_cmd->add_option("--log", log_path, "CSV rows a,b,winner")->required();
  bt_cmd->add_option("--tol", tol, "Gradient-norm tolerance");
  bt_cmd->add_option("--max-iter", max_iter, "Iteration cap");
  bt_cmd->callback([&] {
    action = [&] {
      const auto log = eval::load_match_log(log_path);
      Diagnostics diag;
      const auto fit = eval::fit_bradley_terry(log, tol, max_iter, &diag);
      json j = eval::to_json(fit);
      j["win_matrix"] = eval::to_json(eval::win_matrix(log));
      j["warnings"] = diag.warnings;
      emit(j, "");
    };
  });
  auto* cls_cmd = eval_cmd->add_subcommand("classify", "Balanced accuracy and F1 of accept/reject predictions");
  std::string pred_path;
  std::string truth_path;
  cls_cmd->add_option("--pred", pred_path, "CSV rows id,label")->required();
  cls_cmd->add_option("--truth", truth_path, "CSV rows id,label")->required();
  cls_cmd->callback([&] {
    action = [&] {
      const auto pred = eval::load_labels(pred_path);
      const auto truth = eval::load_labels(truth_path);
      std::vector<bool> p;
      std::vector<bool> t;
      for (const auto& [id, label] : truth) {
        const auto it = pred.find(id);
        if (it == pred.end()) throw Error(Errc::KeyMismatch, "no prediction for " + id, {{"paper_id", id}});
        p.push_back(it->second);
        t.push_back(label);
      }
      if (pred.size() != truth.size()) throw Error(Errc::KeyMismatch, "predictions cover papers missing from the truth");
      emit(eval::to_json(eval::classification_metrics(p, t)), "");
    };
  });
  auto* asp_cmd = eval_cmd->add_subcommand("aspects", "Per-aspect log-ratio of agent vs human emphasis");
  std::string agent_path;
  std::string human_path;
  asp_cmd->add_option("--agent", agent_path, "JSON {aspect: count}")->required();
  asp_cmd->add_option("--human", human_path, "JSON {aspect: count}")->required();
  asp_cmd->callback([&] {
    action = [&] {
      emit(eval::aspect_log_ratio(eval::load_aspect_counts(agent_path), eval::load_aspect_counts(human_path)), "");
    };
  });

  // run / replay / config
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline from a config file");
  std::string output_dir;
  run_cmd->add_option("--output", output_dir, "Output directory (overrides run.output_dir)");
  run_cmd->callback([&] {
    action = [&] {
      auto c = resolve_config(g);
      if (!output_dir.empty()) c.output_dir = output_dir;
      auto gw = pipeline::make_gateway(c);
      emit(pipeline::to_json(pipeline::run_pipeline(c, *gw)), "");
    };
  });
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest's config snapshot into a new directory");
  std::string manifest_path;
  replay_cmd->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay_cmd->add_option("--output", output_dir, "Output directory")->required();
  replay_cmd->callback([&] {
    action = [&] {
      const json m = load_json(manifest_path);
      auto c = pipeline::config_from_json(m.at("config"));
      // Share the original run's cache so the replay needs no backend calls.
      if (c.gateway.cache_dir.empty()) c.gateway.cache_dir = (fs::path(c.output_dir) / "cache").string();
      if (!g.cache_dir.empty()) c.gateway.cache_dir = g.cache_dir;
      c.output_dir = output_dir;
      auto gw = pipeline::make_gateway(c);
      const auto result = pipeline::run_pipeline(c, *gw);
      json j = pipeline::to_json(result);
      const bool identical = json(result.artifacts) == m.at("artifacts");
      j["identical_artifacts"] = identical;
      emit(j, "");
      if (!identical) status = 3;
    };
  });
  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration as INI");
  config_cmd->callback([&] {
    action = [&] { std::cout << pipeline::to_ini(resolve_config(g)); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}, {"details", json::object()}}.dump() << "\n";
    return 2;
  }
  try {
    if (action) action();
  } catch (const Error& e) {
    std::cerr << e.to_json().dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}, {"details", json::object()}}.dump() << "\n";
    return 1;
  }
  return status;
}
