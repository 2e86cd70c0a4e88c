// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <set>

#include "doctest.h"
#include "gar/core/error.hpp"
#include "gar/graph/community.hpp"
#include "oracles/brute_force.hpp"

using namespace gar::graph;

namespace {

WeightedGraph two_triangles() {
  WeightedGraph g(6);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 2);
  g.add_edge(3, 4);
  g.add_edge(4, 5);
  g.add_edge(3, 5);
  g.add_edge(2, 3);
  return g;
}

oracle::Matrix dense(const WeightedGraph& g) {
  oracle::Matrix a(g.size(), std::vector<double>(g.size(), 0.0));
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (const auto& [v, w] : g.neighbors(u)) a[u][v] = w;
  }
  return a;
}

WeightedGraph random_graph(std::mt19937_64& rng, bool weighted) {
  std::uniform_int_distribution<int> size(2, 8);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> weight(1, 5);
  while (true) {
    const int n = size(rng);
    const double p = 0.2 + 0.6 * coin(rng);
    WeightedGraph g(n);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (coin(rng) < p) g.add_edge(u, v, weighted ? weight(rng) : 1.0);
      }
    }
    if (g.edge_count() > 0) return g;
  }
}

bool connected_within(const WeightedGraph& g, const Partition& p, int c) {
  std::vector<std::size_t> members;
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p[v] == c) members.push_back(v);
  }
  std::set<std::size_t> seen{members.front()};
  std::vector<std::size_t> stack{members.front()};
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (const auto& [v, _] : g.neighbors(u)) {
      if (p[v] == c && seen.insert(v).second) stack.push_back(v);
    }
  }
  return seen.size() == members.size();
}

}  // namespace

TEST_CASE("enumeration visits Bell(n) partitions") {
  CHECK(oracle::partition_count(1) == 1);
  CHECK(oracle::partition_count(4) == 15);
  CHECK(oracle::partition_count(8) == 4140);
}

TEST_CASE("two triangles joined by a bridge") {
  const WeightedGraph g = two_triangles();
  CHECK(g.total_weight() == 7.0);
  CHECK(std::abs(modularity(g, {0, 0, 0, 1, 1, 1}) - 5.0 / 14.0) < 1e-12);
  CHECK(modularity(g, {0, 0, 0, 0, 0, 0}) == 0.0);
  const Partition p = detect_communities(g);
  CHECK(p == Partition{0, 0, 0, 1, 1, 1});
}

TEST_CASE("modularity matches the double-sum definition") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const WeightedGraph g = random_graph(rng, t % 2 == 1);
    Partition p(g.size());
    std::uniform_int_distribution<int> lab(0, 3);
    for (auto& c : p) c = lab(rng);
    CHECK(modularity(g, p) == doctest::Approx(oracle::modularity_double_sum(dense(g), p)).epsilon(1e-12));
    CHECK(modularity(g, Partition(g.size(), 5)) == 0.0);
  }
}

TEST_CASE("detect_communities reaches the exhaustive optimum") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const WeightedGraph g = random_graph(rng, t % 3 == 0);
    const Partition p = detect_communities(g);
    CHECK(modularity(g, p) == doctest::Approx(oracle::max_modularity(dense(g))).epsilon(1e-9));
  }
}

TEST_CASE("communities are connected and canonically numbered") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const WeightedGraph g = random_graph(rng, false);
    const Partition p = detect_communities(g);
    CHECK(p == canonicalize(p));
    const int k = *std::max_element(p.begin(), p.end()) + 1;
    for (int c = 0; c < k; ++c) CHECK(connected_within(g, p, c));
  }
}

TEST_CASE("same seed gives the same partition") {
  std::mt19937_64 rng(3);
  const WeightedGraph g = random_graph(rng, true);
  LeidenOptions o;
  o.seed = 99;
  CHECK(detect_communities(g, o) == detect_communities(g, o));
}

TEST_CASE("edgeless graphs are rejected") {
  WeightedGraph g(3);
  CHECK_THROWS_AS(detect_communities(g), gar::Error);
  CHECK_THROWS_AS(modularity(g, {0, 1, 2}), gar::Error);
}

TEST_CASE("parallel edges sum and self-loops are dropped") {
  WeightedGraph g(2);
  g.add_edge(0, 1, 2.0);
  g.add_edge(1, 0, 1.5);
  g.add_edge(1, 1, 4.0);
  CHECK(g.weight(0, 1) == 3.5);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("split_disconnected separates components") {
  WeightedGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  CHECK(split_disconnected(g, {0, 0, 0, 0}) == Partition{0, 0, 1, 1});
}
