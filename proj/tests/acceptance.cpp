// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "gar/core/text.hpp"
#include "gar/eval/eval.hpp"
#include "gar/graph/community.hpp"
#include "gar/llm/prompt.hpp"
#include "gar/memory/memory.hpp"
#include "gar/meta/meta.hpp"
#include "gar/persona/persona.hpp"
#include "gar/pipeline/pipeline.hpp"
#include "gar/review/review.hpp"
#include "oracles/brute_force.hpp"
#include "support.hpp"

using namespace gar;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    ok_ = ok_ && ok;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  Outcome outcome() const {
    Outcome o{ok_, ""};
    for (const auto& n : ok_ ? notes_ : failures_) o.detail += (o.detail.empty() ? "" : "; ") + n;
    return o;
  }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome modularity_oracle() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> size(2, 8);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  int matched = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    graph::WeightedGraph g;
    do {
      const int n = size(rng);
      const double p = 0.2 + 0.6 * coin(rng);
      g = graph::WeightedGraph(n);
      for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
          if (coin(rng) < p) g.add_edge(u, v, t % 2 == 0 ? 1.0 : 1.0 + static_cast<double>(rng() % 4));
        }
      }
    } while (g.edge_count() == 0);
    oracle::Matrix a(g.size(), std::vector<double>(g.size(), 0.0));
    for (std::size_t u = 0; u < g.size(); ++u) {
      for (const auto& [v, w] : g.neighbors(u)) a[u][v] = w;
    }
    graph::LeidenOptions options;
    options.seed = static_cast<std::uint64_t>(t);
    const double best = oracle::max_modularity(a);
    const double got = graph::modularity(g, graph::detect_communities(g, options));
    worst = std::max(worst, best - got);
    if (got >= best - 1e-9) ++matched;
  }
  c.expect(matched == 200, "brute-force maximum reached on " + std::to_string(matched) + "/200 graphs");

  graph::WeightedGraph tri(6);
  for (auto [u, v] : {std::pair{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}) tri.add_edge(u, v);
  const double whole = graph::modularity(tri, graph::Partition(6, 0));
  const double split = graph::modularity(tri, {0, 0, 0, 1, 1, 1});
  c.expect(whole == 0.0, "whole-graph Q = " + fmt(whole, 17));
  c.expect(std::abs(split - 5.0 / 14.0) <= 1e-12, "two-triangle Q = " + fmt(split, 17));
  std::mt19937_64 rng2(3);
  for (int t = 0; t < 50; ++t) {
    graph::WeightedGraph g(2 + rng2() % 7);
    for (std::size_t u = 0; u + 1 < g.size(); ++u) g.add_edge(u, u + 1, 1.0 + static_cast<double>(rng2() % 3));
    c.expect(graph::modularity(g, graph::Partition(g.size(), 0)) == 0.0, "single community is not exactly 0");
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 60.0, "took " + fmt(elapsed) + "s");
  c.note(std::to_string(matched) + "/200 optimal, max gap " + fmt(worst) + ", Q(two triangles) = 5/14, " +
         fmt(elapsed, 3) + "s");
  return c.outcome();
}

Outcome structural_similarity() {
  Checker c;
  auto unit = [](std::size_t i, float s = 1.0F) {
    std::vector<float> v(4, 0.0F);
    v[i] = s;
    return llm::EmbeddingVector{v, "m"};
  };
  const double fixture = memory::structural_similarity({unit(0), unit(1)}, {unit(0), unit(2), unit(3), unit(1, -1)}, 0.5);
  c.expect(fixture == 0.25, "2-vs-4 fixture gave " + fmt(fixture, 17));

  std::mt19937_64 rng(77);
  std::normal_distribution<float> gauss(0, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int sets = 0;
  for (int t = 0; t < 500; ++t) {
    auto draw = [&] {
      std::vector<llm::EmbeddingVector> out(1 + rng() % 8);
      for (auto& e : out) {
        e.model_id = "m";
        e.values.resize(6);
        for (auto& x : e.values) x = gauss(rng);
      }
      return out;
    };
    const auto g = draw();
    const auto h = draw();
    for (double tau : {0.0, u(rng), 0.9, 0.999, std::nextafter(1.0, 0.0)}) {
      const double self = memory::structural_similarity(g, g, tau);
      c.expect(self == 1.0, "sim(G,G) = " + fmt(self, 17) + " at tau " + fmt(tau));
    }
    double prev = 2.0;
    for (int k = 0; k < 100; ++k) {
      const double tau = k / 100.0;
      const double s = memory::structural_similarity(g, h, tau);
      c.expect(s <= prev, "not monotone at tau " + fmt(tau));
      c.expect(s >= 0.0 && s <= 1.0, "out of [0,1]");
      prev = s;
    }
    ++sets;
  }
  c.note("fixture = 0.25; sim(G,G) = 1 and monotone in tau over " + std::to_string(sets) + " random pairs");
  return c.outcome();
}

Outcome contrastive_trait_score() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto corpus = testing::wide_corpus(2600, 4);
  const int n = 10000;
  const auto samples = persona::sample_comparisons("T", corpus, n, 20240601);
  auto h = testing::make_harness(false);
  h.chat->set_fallback(testing::fair_coin_judge(99));
  const double score = persona::judge_comparisons(samples, persona::Trait::Strictness, *h.gateway);
  c.expect(std::abs(score - 0.5) <= 0.02, "fair-coin score " + fmt(score));

  auto shuffled = samples;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(5));
  auto h2 = testing::make_harness(false);
  h2.chat->set_fallback(testing::fair_coin_judge(99));
  const double again = persona::judge_comparisons(shuffled, persona::Trait::Strictness, *h2.gateway);
  c.expect(again == score, "order changed the score: " + fmt(again) + " vs " + fmt(score));

  // Range over judges with arbitrary preference rates.
  std::mt19937_64 rng(4);
  const auto small = testing::wide_corpus(60, 3);
  for (int t = 0; t < 40; ++t) {
    auto hh = testing::make_harness(false);
    const double rate = static_cast<double>(t) / 39.0;
    hh.chat->set_fallback([rate](const llm::ScriptCall& call) -> std::optional<std::string> {
      std::mt19937_64 r(derive_seed(1, call.bindings_hash));
      return std::uniform_real_distribution<double>(0, 1)(r) < rate ? R"({"preferred":"target"})"
                                                                    : R"({"preferred":"other"})";
    });
    const int k = 1 + static_cast<int>(rng() % 150);
    const double s = persona::contrastive_trait_score("T", persona::kTraits[t % 6], small, *hh.gateway, k, rng());
    c.expect(s >= 0.0 && s <= 1.0, "score " + fmt(s) + " outside [0,1]");
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 10.0, "took " + fmt(elapsed) + "s");
  c.note("N=10000 fair coin gives " + fmt(score) + ", order invariant, range [0,1], " + fmt(elapsed, 3) + "s");
  return c.outcome();
}

Outcome bradley_terry() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  auto has_zero = [](const eval::BTFit& f) { return std::count(f.xi.begin(), f.xi.end(), 0.0) >= 1; };

  eval::MatchLog three_of_four{{"a", "b", "a"}, {"a", "b", "a"}, {"a", "b", "a"}, {"a", "b", "b"}};
  const auto f1 = eval::fit_bradley_terry(three_of_four);
  const double gap = f1.score("a") - f1.score("b");
  c.expect(std::abs(gap - std::log(3.0)) <= 1e-4, "3-of-4 gap " + fmt(gap, 10));
  c.expect(has_zero(f1), "3-of-4 fit has no zero coefficient");

  eval::MatchLog even;
  for (int i = 0; i < 5; ++i) even.push_back({"a", "b", "a"});
  for (int i = 0; i < 5; ++i) even.push_back({"a", "b", "b"});
  const auto f2 = eval::fit_bradley_terry(even);
  const double even_gap = f2.score("a") - f2.score("b");
  c.expect(std::abs(even_gap) <= 1e-6, "5-5 gap " + fmt(even_gap, 10));
  c.expect(has_zero(f2), "5-5 fit has no zero coefficient");

  const std::vector<std::string> names{"c0", "c1", "c2"};
  const double xi[] = {0.0, 0.5, 1.0};
  int recovered = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(derive_seed(2024, "bt/" + std::to_string(seed)));
    eval::MatchLog log;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        std::bernoulli_distribution first_wins(1.0 / (1.0 + std::exp(xi[j] - xi[i])));
        for (int m = 0; m < 500; ++m) log.push_back({names[i], names[j], first_wins(rng) ? names[i] : names[j]});
      }
    }
    const auto f = eval::fit_bradley_terry(log);
    c.expect(has_zero(f), "synthetic fit has no zero coefficient");
    if (f.score("c0") < f.score("c1") && f.score("c1") < f.score("c2")) ++recovered;
  }
  c.expect(recovered >= 99, "order recovered in " + std::to_string(recovered) + "/100 seeds");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "took " + fmt(elapsed) + "s");
  c.note("ln3 gap err " + fmt(std::abs(gap - std::log(3.0)), 3) + ", even gap " + fmt(even_gap, 3) + ", " +
         std::to_string(recovered) + "/100 orders recovered, " + fmt(elapsed, 3) + "s");
  return c.outcome();
}

Outcome classification_baselines() {
  Checker c;
  // true = accept
  std::vector<bool> truth;
  for (int i = 0; i < 100000; ++i) truth.push_back(i % 2 == 0);
  std::mt19937_64 shuffler(11);
  for (std::size_t i = truth.size() - 1; i > 0; --i) {
    const std::size_t j = shuffler() % (i + 1);
    const bool tmp = truth[i];
    truth[i] = truth[j];
    truth[j] = tmp;
  }

  const auto r1 = eval::classification_metrics(std::vector<bool>(truth.size(), false), truth);
  c.expect(r1.balanced_accuracy == 0.5, "always-reject BA " + fmt(r1.balanced_accuracy));
  c.expect(r1.f1 == 0.0, "always-reject F1 " + fmt(r1.f1));

  std::mt19937_64 rng(12);
  std::vector<bool> random;
  for (std::size_t i = 0; i < truth.size(); ++i) random.push_back((rng() & 1U) != 0);
  const auto r2 = eval::classification_metrics(random, truth);
  c.expect(std::abs(r2.balanced_accuracy - 0.5) <= 0.01, "random BA " + fmt(r2.balanced_accuracy));
  c.note("always-reject BA 0.5 F1 0; random BA " + fmt(r2.balanced_accuracy) + " at n=1e5");
  return c.outcome();
}

Outcome threshold_meta() {
  Checker c;
  auto committee = [](const std::vector<int>& scores) {
    std::vector<review::Review> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      review::Review r;
      r.reviewer_id = "R" + std::to_string(i);
      r.overall = scores[i];
      out.push_back(r);
    }
    return out;
  };
  const auto six = meta::threshold_meta(committee({6, 6, 6}));
  const auto five_nine = meta::threshold_meta(committee({6, 6, 6, 6, 6, 6, 6, 6, 6, 5}));
  c.expect(meta::mean_score(committee({6, 6, 6})) == 6.0, "mean 6.0 fixture");
  c.expect(std::abs(meta::mean_score(committee({6, 6, 6, 6, 6, 6, 6, 6, 6, 5})) - 5.9) < 1e-12, "mean 5.9 fixture");
  c.expect(meta::to_binary(six.decision) == meta::Binary::Accept, "mean 6.0 rejected");
  c.expect(meta::to_binary(five_nine.decision) == meta::Binary::Reject, "mean 5.9 accepted");

  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> score(1, 10);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<int> s(3 + rng() % 4);
    int sum = 0;
    for (auto& x : s) sum += (x = score(rng));
    const auto d = meta::to_binary(meta::threshold_meta(committee(s)).decision);
    const auto expected = sum >= 6 * static_cast<int>(s.size()) ? meta::Binary::Accept : meta::Binary::Reject;
    c.expect(d == expected, "decision disagrees with the integer oracle");
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto up = s;
      auto down = s;
      if (up[i] < 10) {
        ++up[i];
        c.expect(!(d == meta::Binary::Accept &&
                   meta::to_binary(meta::threshold_meta(committee(up)).decision) == meta::Binary::Reject),
                 "raising a score flipped accept to reject");
      }
      if (down[i] > 1) {
        --down[i];
        c.expect(!(d == meta::Binary::Reject &&
                   meta::to_binary(meta::threshold_meta(committee(down)).decision) == meta::Binary::Accept),
                 "lowering a score flipped reject to accept");
      }
    }
    ++checked;
  }
  c.note("6.0 accept, 5.9 reject, monotone over " + std::to_string(checked) + " fuzzed committees");
  return c.outcome();
}

Outcome e2e_determinism() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  testing::TempDir dir("acceptance-e2e");
  auto config = [&](const std::string& out) {
    pipeline::Config cfg = pipeline::load_config(testing::fixture_dir() + "/e2e/config.ini");
    cfg.output_dir = dir / out;
    return cfg;
  };
  const auto a = config("run1");
  const auto b = config("run2");
  auto ga = pipeline::make_gateway(a);
  auto gb = pipeline::make_gateway(b);
  const auto ma = pipeline::run_pipeline(a, *ga);
  const auto mb = pipeline::run_pipeline(b, *gb);
  c.expect(!ma.artifacts.empty(), "no artifacts written");
  c.expect(ma.decisions.size() == 3, "expected 3 decisions");
  c.expect(ma.artifacts == mb.artifacts, "independent runs differ");
  c.expect(pipeline::hash_artifacts(a.output_dir) == pipeline::hash_artifacts(b.output_dir), "files on disk differ");

  for (int replay = 0; replay < 2; ++replay) {
    auto r = config("replay" + std::to_string(replay));
    r.gateway.cache_dir = a.output_dir + "/cache";
    auto gr = pipeline::make_gateway(r);
    const auto mr = pipeline::run_pipeline(r, *gr);
    c.expect(mr.artifacts == ma.artifacts, "warm-cache replay differs");
    c.expect(mr.backend_requests == 0, "replay sent " + std::to_string(mr.backend_requests) + " backend requests");
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 120.0, "took " + fmt(elapsed) + "s");
  c.note(std::to_string(ma.artifacts.size()) + " artifacts identical across 2 runs and 2 warm replays, " +
         fmt(elapsed, 3) + "s");
  return c.outcome();
}

// Every attempt returns the same invalid payload, so the retry budget is exhausted.
bool rejected_after_budget(const std::string& template_id, const std::string& payload,
                           const std::function<void(llm::Gateway&)>& call, int retries) {
  llm::GatewayConfig config;
  config.repair_retries = retries;
  auto h = testing::make_harness(false, config);
  h.chat->add_response(template_id, "*", payload);
  try {
    call(*h.gateway);
  } catch (const Error& e) {
    return e.code() == Errc::SchemaViolation && e.details().value("attempts", -1) == retries + 1 &&
           h.chat->calls() == static_cast<std::size_t>(retries + 1);
  }
  return false;
}

Outcome schema_enforcement() {
  Checker c;
  std::mt19937_64 rng(8);
  auto pick = [&](const std::vector<long long>& xs) { return xs[rng() % xs.size()]; };
  auto junk = [&] {
    static const std::vector<std::string> words{"accept", "reject", "ACCEPT", "Reject", "maybe", "", "accept ",
                                                "weak accept", "ACCEPT (ORAL) ", "borderline", "accept_poster"};
    return words[rng() % words.size()];
  };

  graph::PaperGraph g;
  g.paper_id = "F";
  g.entities = {graph::Entity{"F/c1/e1", graph::EntityKind::Idea, "idea", {"F/c1"}, {}}};
  g.partition = {{"F/c1/e1", 0}};
  g.descriptors[0] = graph::Descriptor{0, "A single idea.", {"F/c1/e1"}, std::nullopt};
  const auto persona = persona::random_persona("R", 1);
  const novelty::NoveltyAssessment nov{2, "incremental", {}};
  ingest::Manuscript m;
  m.id = "F";
  m.title = "t";
  m.sections = {{"Introduction", "text"}};

  int total = 0;
  int rejected = 0;
  std::map<std::string, int> per_field;
  const int retries = 2;
  for (int t = 0; t < 400; ++t) {
    json review{{"summary", "s"},  {"strengths", json::array()}, {"weaknesses", json::array()},
                {"suggestions", json::array()}, {"soundness", 2}, {"presentation", 3}, {"contribution", 2},
                {"overall", 6},    {"confidence", 3},            {"decision", "accept"}, {"rationale", "r"}};
    std::string field;
    switch (t % 4) {
      case 0: field = "soundness"; review[field] = pick({0, 5, -1, 7, 100}); break;
      case 1: field = "overall"; review[field] = pick({0, 11, -3, 12, 1000}); break;
      case 2: field = "confidence"; review[field] = pick({0, 6}); break;
      default: {
        field = "decision";
        std::string d;
        do d = junk(); while (d == "accept" || d == "reject");
        review[field] = d;
      }
    }
    ++total;
    ++per_field[field];
    if (rejected_after_budget(llm::tmpl::kInitialReview, review.dump(),
                              [&](llm::Gateway& gw) { review::initial_review(persona, g, nov, gw); }, retries)) {
      ++rejected;
    } else {
      c.expect(false, "accepted review with " + field + " = " + review[field].dump());
    }
  }
  for (int t = 0; t < 100; ++t) {
    const json nv{{"score", pick({0, 5, -2, 9})}, {"explanation", "e"}, {"cited_ids", json::array()}};
    ++total;
    ++per_field["novelty"];
    if (rejected_after_budget(llm::tmpl::kNovelty, nv.dump(),
                              [&](llm::Gateway& gw) { novelty::assess_novelty(m, {}, {}, gw); }, retries)) {
      ++rejected;
    } else {
      c.expect(false, "accepted novelty score " + nv["score"].dump());
    }
  }
  std::vector<review::Review> reviews(3);
  for (int t = 0; t < 100; ++t) {
    std::string d;
    do d = junk(); while (d == "ACCEPT (ORAL)" || d == "ACCEPT (POSTER)" || d == "REJECT");
    const json mv{{"summary", "s"}, {"decision", d}};
    ++total;
    ++per_field["meta decision"];
    meta::AgenticOptions options;
    options.turns = 0;
    if (rejected_after_budget(llm::tmpl::kMeta, mv.dump(),
                              [&](llm::Gateway& gw) {
                                meta::agentic_meta(reviews, memory::MetaMemory{}, {}, std::nullopt, options, gw);
                              },
                              retries)) {
      ++rejected;
    } else {
      c.expect(false, "accepted meta decision '" + d + "'");
    }
  }
  c.expect(rejected == total, std::to_string(rejected) + "/" + std::to_string(total) + " rejected");
  std::string fields;
  for (const auto& [f, n] : per_field) fields += (fields.empty() ? "" : ", ") + f + " " + std::to_string(n);
  c.note(std::to_string(rejected) + "/" + std::to_string(total) + " rejected after " + std::to_string(retries + 1) +
         " attempts (" + fields + ")");
  return c.outcome();
}

// Mention answers that are mostly not verbatim: paraphrases, case changes,
// quotes spanning two reviews, padding, plus some genuine substrings.
std::optional<std::string> adversarial_mention(const llm::ScriptCall& call) {
  const std::string& joined = call.bindings.at("reviews");
  std::mt19937_64 rng(derive_seed(31, call.bindings_hash));
  const std::size_t a = rng() % joined.size();
  const std::size_t len = 1 + rng() % 60;
  std::string quote = joined.substr(a, len);
  switch (rng() % 7) {
    case 0: break;                                        // verbatim, possibly spanning the separator
    case 1: quote = text::to_lower(quote) + "!"; break;   // altered
    case 2: quote = "The reviewer said: " + quote; break;
    case 3: quote = joined; break;                        // all reviews at once
    case 4: quote = "The method is novel and well evaluated."; break;
    case 5: quote = ""; break;
    default: quote = call.bindings.at("sentinel"); break;
  }
  return json{{"quote", quote}}.dump();
}

Outcome memory_guard() {
  Checker c;
  const auto corpus = testing::e2e_corpus();
  std::map<std::string, std::vector<std::string>> texts;
  for (const auto& p : corpus) {
    for (const auto& r : p.reviews) texts[p.manuscript.id].push_back(r.text);
  }
  auto grounded = [&](const memory::MemoryEntry& e) {
    if (e.review_snippet == memory::kSentinel) return true;
    if (e.review_snippet.empty()) return false;
    const auto& src = texts[e.paper_id];
    return std::any_of(src.begin(), src.end(), [&](const std::string& t) { return t.find(e.review_snippet) != std::string::npos; });
  };

  std::size_t stored = 0;
  std::size_t verbatim = 0;
  // Pipeline memory with the synthetic backend.
  testing::TempDir dir("acceptance-memory");
  auto cfg = pipeline::load_config(testing::fixture_dir() + "/e2e/config.ini");
  cfg.output_dir = dir / "run";
  auto gw = pipeline::make_gateway(cfg);
  pipeline::run_pipeline(cfg, *gw);
  const auto index = memory::load_index(cfg.output_dir + "/memory");
  for (const auto& e : index.entries()) {
    ++stored;
    c.expect(grounded(e), "ungrounded snippet in " + e.paper_id);
    verbatim += e.review_snippet == memory::kSentinel ? 0 : 1;
  }

  // Adversarial answers over many descriptors.
  auto h = testing::make_harness();
  const auto base = llm::synthetic_responder();
  h.chat->set_fallback([base](const llm::ScriptCall& call) {
    return call.template_id == llm::tmpl::kMention ? adversarial_mention(call) : base(call);
  });
  for (const auto& p : corpus) {
    for (int k = 0; k < 300; ++k) {
      graph::PaperGraph g;
      g.paper_id = p.manuscript.id;
      g.descriptors[0] = graph::Descriptor{0, "probe " + std::to_string(k), {}, std::nullopt};
      for (const auto& e : memory::index_paper(g, p.reviews, *h.gateway)) {
        ++stored;
        c.expect(grounded(e), "ungrounded adversarial snippet: " + e.review_snippet.substr(0, 40));
        verbatim += e.review_snippet == memory::kSentinel ? 0 : 1;
      }
    }
  }
  c.note(std::to_string(stored) + " snippets checked, " + std::to_string(verbatim) + " verbatim quotes, rest sentinel");
  return c.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"modularity oracle", modularity_oracle},
      {"structural similarity", structural_similarity},
      {"contrastive trait score", contrastive_trait_score},
      {"bradley-terry", bradley_terry},
      {"classification baselines", classification_baselines},
      {"threshold meta-review", threshold_meta},
      {"end-to-end determinism", e2e_determinism},
      {"schema enforcement", schema_enforcement},
      {"memory guard", memory_guard},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
