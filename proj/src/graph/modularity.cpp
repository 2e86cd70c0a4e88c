// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "gar/core/error.hpp"
#include "gar/graph/community.hpp"

namespace gar::graph {

void WeightedGraph::add_edge(std::size_t u, std::size_t v, double w) {
  if (u >= adj_.size() || v >= adj_.size()) throw Error(Errc::PreconditionViolation, "edge endpoint out of range");
  require(w > 0.0, "edge weight > 0");
  if (u == v) return;
  adj_[u][v] += w;
  adj_[v][u] += w;
}

double WeightedGraph::weight(std::size_t u, std::size_t v) const {
  const auto it = adj_.at(u).find(v);
  return it == adj_[u].end() ? 0.0 : it->second;
}

double WeightedGraph::degree(std::size_t u) const {
  double d = 0.0;
  for (const auto& [_, w] : adj_.at(u)) d += w;
  return d;
}

double WeightedGraph::total_weight() const {
  double two_m = 0.0;
  for (std::size_t u = 0; u < adj_.size(); ++u) two_m += degree(u);
  return two_m / 2.0;
}

std::size_t WeightedGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& nb : adj_) n += nb.size();
  return n / 2;
}

double modularity(const WeightedGraph& g, const Partition& partition) {
  require(partition.size() == g.size(), "partition covers every node");
  // Sums are accumulated per node in node order so that the single-community
  // partition evaluates to exactly 0.
  std::vector<double> deg(g.size());
  double two_m = 0.0;
  for (std::size_t u = 0; u < g.size(); ++u) {
    deg[u] = g.degree(u);
    two_m += deg[u];
  }
  if (two_m <= 0.0) throw Error(Errc::EmptyGraph, "modularity is undefined for a graph without edges");

  std::unordered_map<int, double> intra;  // twice the internal weight
  std::unordered_map<int, double> total;
  std::vector<int> order;
  for (std::size_t u = 0; u < g.size(); ++u) {
    const int c = partition[u];
    if (!total.count(c)) order.push_back(c);
    double s = 0.0;
    for (const auto& [v, w] : g.neighbors(u)) {
      if (partition[v] == c) s += w;
    }
    intra[c] += s;
    total[c] += deg[u];
  }
  double q = 0.0;
  for (int c : order) {
    const double frac = total[c] / two_m;
    q += intra[c] / two_m - frac * frac;
  }
  return q;
}

Partition canonicalize(const Partition& p) {
  std::unordered_map<int, int> relabel;
  Partition out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto [it, inserted] = relabel.emplace(p[i], static_cast<int>(relabel.size()));
    out[i] = it->second;
  }
  return out;
}

Partition split_disconnected(const WeightedGraph& g, const Partition& p) {
  Partition out(p.size(), -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (out[s] != -1) continue;
    out[s] = next;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& [v, _] : g.neighbors(u)) {
        if (out[v] == -1 && p[v] == p[s]) {
          out[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return out;
}

}  // namespace gar::graph
