// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gar/core/hash.hpp"
#include "gar/pipeline/pipeline.hpp"
#include "support.hpp"

using namespace gar;
using namespace gar::pipeline;
using nlohmann::json;
using testing::thrown_code;

namespace {

std::string write_ini(const testing::TempDir& dir, const std::string& body) {
  const auto path = dir / "config.ini";
  std::ofstream(path) << body;
  return path;
}

Config e2e_config(const std::string& output_dir) {
  Config c = load_config(testing::fixture_dir() + "/e2e/config.ini");
  c.output_dir = output_dir;
  return c;
}

}  // namespace

TEST_CASE("the fixture config loads with resolved paths") {
  const Config c = load_config(testing::fixture_dir() + "/e2e/config.ini");
  CHECK(c.corpus == testing::fixture_dir() + "/e2e/corpus.jsonl");
  CHECK(std::filesystem::path(c.output_dir).is_absolute());
  CHECK(c.seed == 42);
  CHECK(c.workers == 2);
  CHECK(c.comparisons == 4);
  CHECK(c.committee_size == 3);
  CHECK(c.rounds == 3);
  CHECK(c.retrieved == 3);
  CHECK(c.meta_mode == "agentic");
  CHECK(c.turns == 2);
  CHECK(c.leiden_restarts == Config{}.leiden_restarts);
}

TEST_CASE("config errors") {
  testing::TempDir dir("config");
  CHECK(thrown_code([&] { load_config(write_ini(dir, "[run]\nbogus = 1\n")); }) == Errc::InvalidConfig);
  CHECK(thrown_code([&] { load_config(write_ini(dir, "[nowhere]\nseed = 1\n")); }) == Errc::InvalidConfig);
  CHECK(thrown_code([&] { load_config(write_ini(dir, "[run]\nseed = many\n")); }) == Errc::InvalidConfig);
  CHECK(thrown_code([&] { load_config(write_ini(dir, "[persona]\ncommittee_size = 2\n")); }) ==
        Errc::CommitteeSizeOutOfRange);
  CHECK(thrown_code([&] { load_config(write_ini(dir, "[persona]\ncommittee_size = 7\n")); }) ==
        Errc::CommitteeSizeOutOfRange);
  CHECK(thrown_code([&] { load_config(write_ini(dir, "[review]\nrounds = 0\n")); }) == Errc::KZero);
  CHECK(thrown_code([&] { load_config(write_ini(dir, "[meta]\nmode = vote\n")); }) == Errc::InvalidConfig);
  CHECK(thrown_code([&] { load_config(dir / "missing.ini"); }) != Errc::PreconditionViolation);
}

TEST_CASE("config serializations round trip") {
  Config c = load_config(testing::fixture_dir() + "/e2e/config.ini");
  c.tau = 0.625;
  c.external_search = true;
  CHECK(to_json(config_from_json(to_json(c))) == to_json(c));

  testing::TempDir dir("ini");
  const auto path = write_ini(dir, to_ini(c));
  CHECK(to_json(load_config(path)) == to_json(c));
}

TEST_CASE("an invalid committee size fails before any work") {
  testing::TempDir dir("bad-run");
  Config c = e2e_config(dir / "out");
  c.committee_size = 2;
  auto gateway = make_gateway(c);
  CHECK(thrown_code([&] { run_pipeline(c, *gateway); }) == Errc::CommitteeSizeOutOfRange);
  CHECK_FALSE(std::filesystem::exists(dir / "out/graphs"));
  CHECK(gateway->backend_requests() == 0);
}

TEST_CASE("end-to-end runs are reproducible") {
  testing::TempDir dir("e2e");
  Config a = e2e_config(dir / "a");
  Config b = e2e_config(dir / "b");
  b.workers = 1;
  auto ga = make_gateway(a);
  auto gb = make_gateway(b);
  const RunManifest ma = run_pipeline(a, *ga);
  const RunManifest mb = run_pipeline(b, *gb);

  CHECK(ma.decisions.size() == 3);
  CHECK_FALSE(ma.artifacts.empty());
  CHECK(ma.artifacts == mb.artifacts);
  CHECK(ma.decisions == mb.decisions);
  CHECK(ma.artifacts == hash_artifacts(a.output_dir));
  for (const auto& id : {"P1", "P2", "P3"}) {
    CHECK(ma.artifacts.count(std::string("graphs/") + id + ".json"));
    CHECK(ma.artifacts.count(std::string("meta/") + id + ".json"));
  }
  CHECK(ma.artifacts.count("eval/classification.json"));
  CHECK(std::filesystem::exists(a.output_dir + "/manifest.json"));

  SUBCASE("warm cache replay makes no backend calls") {
    Config r = e2e_config(dir / "replay");
    r.gateway.cache_dir = a.output_dir + "/cache";
    auto gr = make_gateway(r);
    const RunManifest mr = run_pipeline(r, *gr);
    CHECK(mr.backend_requests == 0);
    CHECK(mr.artifacts == ma.artifacts);
  }
  SUBCASE("rerunning in place resumes from artifacts") {
    auto again = make_gateway(a);
    const RunManifest m2 = run_pipeline(a, *again);
    CHECK(m2.artifacts == ma.artifacts);
  }
}
