// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace gar::graph {

/// Undirected weighted graph without self-loops. Parallel edges are combined
/// by summing their weights.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t n) : adj_(n) {}

  std::size_t size() const { return adj_.size(); }
  /// Adds w to edge {u, v}. Self-loops are ignored; w must be positive.
  void add_edge(std::size_t u, std::size_t v, double w = 1.0);
  const std::map<std::size_t, double>& neighbors(std::size_t u) const { return adj_.at(u); }
  double weight(std::size_t u, std::size_t v) const;
  double degree(std::size_t u) const;
  /// m: total edge weight, each undirected edge counted once.
  double total_weight() const;
  std::size_t edge_count() const;

 private:
  std::vector<std::map<std::size_t, double>> adj_;
};

using Partition = std::vector<int>;  // node -> community id

/// Newman modularity with resolution 1, evaluated over the weighted undirected
/// adjacency. Throws EmptyGraph when the graph has no edges.
double modularity(const WeightedGraph& g, const Partition& partition);

struct LeidenOptions {
  double resolution = 1.0;
  std::uint64_t seed = 42;
  /// Independent seeded runs; the highest-modularity partition wins.
  int restarts = 10;
  /// Leiden passes per run, each starting from the previous result; stops early once stable.
  int max_passes = 32;
  double randomness = 0.01;  // refinement temperature (theta)
  /// Vertex-mover polish after each run, applied to graphs up to this size (0 disables).
  std::size_t polish_max_nodes = 64;
  /// Seeded perturb-and-improve rounds after the restarts (same size limit).
  int perturbations = 20;
};

/// Leiden community detection maximizing modularity. Returns community ids
/// numbered 0.. in order of each community's smallest node. Every community
/// is internally connected. Throws EmptyGraph when the graph has no edges.
Partition detect_communities(const WeightedGraph& g, const LeidenOptions& options = {});

/// Relabels communities 0.. by first appearance in node order.
Partition canonicalize(const Partition& p);

/// Splits communities whose induced subgraph is disconnected into their
/// connected components (never lowers modularity).
Partition split_disconnected(const WeightedGraph& g, const Partition& p);

}  // namespace gar::graph
