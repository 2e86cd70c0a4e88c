// SPDX-License-Identifier: Apache-2.0

// Leiden algorithm (fast local moving, refinement, aggregation) for
// modularity. Quality is tracked in edge-weight units:
//   H(P) = sum_c [ e_c - gamma * K_c^2 / (4m) ]
// where e_c is the internal weight and K_c the summed node weight of c.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"
#include "gar/graph/community.hpp"

namespace gar::graph {

namespace {

struct Net {
  std::vector<std::vector<std::pair<int, double>>> adj;  // no self-loops
  std::vector<double> node_weight;                       // degree incl. collapsed internal edges

  int size() const { return static_cast<int>(adj.size()); }
};

Net from_graph(const WeightedGraph& g) {
  Net net;
  const std::size_t n = g.size();
  net.adj.resize(n);
  net.node_weight.resize(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& [v, w] : g.neighbors(u)) net.adj[u].emplace_back(static_cast<int>(v), w);
    net.node_weight[u] = g.degree(u);
  }
  return net;
}

struct Ctx {
  double gamma;
  double two_m;
  double theta;
  std::mt19937_64 rng;
};

// Community bookkeeping over net nodes.
struct Communities {
  std::vector<int> of;           // node -> community
  std::vector<double> total;     // summed node weight per community
  std::vector<int> count;        // members per community
  std::vector<int> empty_ids;

  explicit Communities(const Net& net, const std::vector<int>& initial) {
    const int n = net.size();
    of = initial;
    total.assign(n, 0.0);
    count.assign(n, 0);
    for (int v = 0; v < n; ++v) {
      total[of[v]] += net.node_weight[v];
      ++count[of[v]];
    }
    for (int c = n - 1; c >= 0; --c) {
      if (count[c] == 0) empty_ids.push_back(c);
    }
  }

  void remove(int v, double w) {
    const int c = of[v];
    total[c] -= w;
    if (--count[c] == 0) {
      total[c] = 0.0;
      empty_ids.push_back(c);
    }
  }

  void insert(int v, int c, double w) {
    if (count[c] == 0) {
      if (!empty_ids.empty() && empty_ids.back() == c) {
        empty_ids.pop_back();
      } else {
        const auto it = std::find(empty_ids.begin(), empty_ids.end(), c);
        if (it != empty_ids.end()) empty_ids.erase(it);
      }
    }
    of[v] = c;
    total[c] += w;
    ++count[c];
  }

  int take_empty() const { return empty_ids.back(); }

  int nonempty() const {
    return static_cast<int>(std::count_if(count.begin(), count.end(), [](int k) { return k > 0; }));
  }
};

std::vector<int> shuffled_nodes(int n, std::mt19937_64& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

void move_nodes_fast(const Net& net, Communities& comm, Ctx& ctx) {
  const int n = net.size();
  std::deque<int> queue;
  std::vector<char> queued(n, 1);
  for (int v : shuffled_nodes(n, ctx.rng)) queue.push_back(v);

  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    queued[v] = 0;

    const double kv = net.node_weight[v];
    const int current = comm.of[v];
    touched.clear();
    for (const auto& [u, w] : net.adj[v]) {
      const int c = comm.of[u];
      if (link[c] == 0.0) touched.push_back(c);
      link[c] += w;
    }
    comm.remove(v, kv);

    int best = current;
    double best_gain = link[current] - ctx.gamma * kv * comm.total[current] / ctx.two_m;
    for (int c : touched) {
      if (c == current) continue;
      const double gain = link[c] - ctx.gamma * kv * comm.total[c] / ctx.two_m;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    // A fresh community has gain 0.
    if (best_gain < 0.0 && comm.count[current] > 0) {
      best = comm.take_empty();
      best_gain = 0.0;
    }
    comm.insert(v, best, kv);
    for (int c : touched) link[c] = 0.0;

    if (best != current) {
      for (const auto& [u, _] : net.adj[v]) {
        if (!queued[u] && comm.of[u] != best) {
          queued[u] = 1;
          queue.push_back(u);
        }
      }
    }
  }
}

// Refines each community of `comm` independently, starting from singletons
// and merging only well-connected nodes into well-connected subsets.
std::vector<int> refine(const Net& net, const Communities& comm, Ctx& ctx) {
  const int n = net.size();
  std::vector<int> refined(n);
  std::iota(refined.begin(), refined.end(), 0);
  std::vector<double> r_total(net.node_weight);
  std::vector<int> r_count(n, 1);
  std::vector<double> r_external(n, 0.0);  // weight from refined community to the rest of its parent

  for (int v = 0; v < n; ++v) {
    for (const auto& [u, w] : net.adj[v]) {
      if (comm.of[u] == comm.of[v]) r_external[v] += w;
    }
  }

  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  for (int v : shuffled_nodes(n, ctx.rng)) {
    if (r_count[refined[v]] != 1) continue;  // already merged into
    const int parent = comm.of[v];
    const double kv = net.node_weight[v];
    const double k_parent = comm.total[parent];
    if (r_external[v] < ctx.gamma * kv * (k_parent - kv) / ctx.two_m) continue;

    touched.clear();
    for (const auto& [u, w] : net.adj[v]) {
      if (comm.of[u] != parent) continue;
      const int c = refined[u];
      if (link[c] == 0.0) touched.push_back(c);
      link[c] += w;
    }

    // Candidates: staying alone (gain 0) and every well-connected adjacent
    // refined community with non-negative gain.
    std::vector<std::pair<int, double>> candidates{{refined[v], 0.0}};
    for (int c : touched) {
      if (c == refined[v]) continue;
      if (r_external[c] < ctx.gamma * r_total[c] * (k_parent - r_total[c]) / ctx.two_m) continue;
      const double gain = (link[c] - ctx.gamma * kv * r_total[c] / ctx.two_m) / (ctx.two_m / 2.0);
      if (gain >= 0.0) candidates.emplace_back(c, gain);
    }
    double max_gain = 0.0;
    for (const auto& [_, g] : candidates) max_gain = std::max(max_gain, g);
    std::vector<double> weights;
    for (const auto& [_, g] : candidates) weights.push_back(std::exp((g - max_gain) / ctx.theta));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const int chosen = candidates[pick(ctx.rng)].first;

    if (chosen != refined[v]) {
      const int own = refined[v];
      r_total[own] = 0.0;
      r_count[own] = 0;
      r_external[chosen] = r_external[chosen] + r_external[v] - 2.0 * link[chosen];
      r_total[chosen] += kv;
      ++r_count[chosen];
      refined[v] = chosen;
    }
    for (int c : touched) link[c] = 0.0;
  }
  return refined;
}

// Collapses each group of `grouping` into one node.
Net aggregate(const Net& net, const std::vector<int>& grouping, std::vector<int>& relabel_out) {
  const int n = net.size();
  relabel_out.assign(n, -1);
  int next = 0;
  std::vector<int> label(n, -1);
  for (int v = 0; v < n; ++v) {
    if (label[grouping[v]] == -1) label[grouping[v]] = next++;
    relabel_out[v] = label[grouping[v]];
  }
  Net out;
  out.adj.resize(next);
  out.node_weight.assign(next, 0.0);
  std::vector<std::map<int, double>> acc(next);
  for (int v = 0; v < n; ++v) {
    const int a = relabel_out[v];
    out.node_weight[a] += net.node_weight[v];
    for (const auto& [u, w] : net.adj[v]) {
      const int b = relabel_out[u];
      if (a != b) acc[a][b] += w;
    }
  }
  for (int a = 0; a < next; ++a) {
    for (const auto& [b, w] : acc[a]) out.adj[a].emplace_back(b, w);
  }
  return out;
}

int distinct(const std::vector<int>& labels) {
  std::vector<int> sorted(labels);
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// One Leiden run starting from `initial` (a partition of the original nodes).
Partition leiden_pass(const WeightedGraph& g, const Partition& initial, Ctx& ctx) {
  Net net = from_graph(g);
  const int n0 = net.size();
  std::vector<int> node_of(n0);  // original node -> current net node
  std::iota(node_of.begin(), node_of.end(), 0);
  std::vector<int> start = canonicalize(initial);

  while (true) {
    Communities comm(net, start);
    move_nodes_fast(net, comm, ctx);
    const int k = comm.nonempty();
    if (k == net.size()) {
      Partition out(n0);
      for (int v = 0; v < n0; ++v) out[v] = comm.of[node_of[v]];
      return out;
    }
    std::vector<int> refined = refine(net, comm, ctx);
    // No refinement progress: aggregate by the moved partition instead.
    if (distinct(refined) == net.size()) {
      refined = comm.of;
    }
    std::vector<int> refined_labels;
    Net next = aggregate(net, refined, refined_labels);
    std::vector<int> next_start(next.size(), 0);
    for (int v = 0; v < net.size(); ++v) next_start[refined_labels[v]] = comm.of[v];
    for (int v = 0; v < n0; ++v) node_of[v] = refined_labels[node_of[v]];
    net = std::move(next);
    start = canonicalize(next_start);
  }
}

// Vertex-mover refinement: each sweep moves every node once to its best
// community (even when the move lowers Q) and keeps the best prefix of the
// sweep. Escapes local optima that need several nodes to move together.
Partition polish(const WeightedGraph& g, Partition p) {
  const int n = static_cast<int>(g.size());
  const double m = g.total_weight();
  std::vector<double> k(n);
  for (int v = 0; v < n; ++v) k[v] = g.degree(v);

  double q = modularity(g, p);
  while (true) {
    Partition cur = canonicalize(p);
    std::vector<double> tot(n + 1, 0.0);
    std::vector<int> size(n + 1, 0);
    for (int v = 0; v < n; ++v) {
      tot[cur[v]] += k[v];
      ++size[cur[v]];
    }
    std::vector<char> moved(n, 0);
    double run = q;
    double best_q = q;
    Partition best = cur;
    std::vector<double> link(n + 1, 0.0);
    for (int step = 0; step < n; ++step) {
      int best_v = -1;
      int best_c = -1;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (int v = 0; v < n; ++v) {
        if (moved[v]) continue;
        std::fill(link.begin(), link.end(), 0.0);
        for (const auto& [u, w] : g.neighbors(v)) link[cur[u]] += w;
        const int a = cur[v];
        bool tried_empty = false;
        for (int c = 0; c <= n; ++c) {
          if (c == a) continue;
          if (size[c] == 0) {
            if (tried_empty || size[a] == 1) continue;  // singleton to empty is a no-op
            tried_empty = true;
          }
          const double gain = (link[c] - link[a]) / m - k[v] * (tot[c] - tot[a] + k[v]) / (2.0 * m * m);
          if (gain > best_gain) {
            best_gain = gain;
            best_v = v;
            best_c = c;
          }
        }
      }
      if (best_v < 0) break;
      const int a = cur[best_v];
      tot[a] -= k[best_v];
      --size[a];
      tot[best_c] += k[best_v];
      ++size[best_c];
      cur[best_v] = best_c;
      moved[best_v] = 1;
      run += best_gain;
      if (run > best_q + 1e-12) {
        best_q = run;
        best = cur;
      }
    }
    const double exact = modularity(g, best);
    if (exact <= q + 1e-12) return p;
    p = split_disconnected(g, best);
    q = modularity(g, p);
  }
}

// Best positive-gain merge of two adjacent communities, if any.
bool merge_best_pair(const WeightedGraph& g, Partition& p) {
  p = canonicalize(p);
  const int k = *std::max_element(p.begin(), p.end()) + 1;
  const double m = g.total_weight();
  std::vector<double> tot(k, 0.0);
  std::map<std::pair<int, int>, double> between;
  for (std::size_t u = 0; u < g.size(); ++u) {
    tot[p[u]] += g.degree(u);
    for (const auto& [v, w] : g.neighbors(u)) {
      if (p[u] < p[v]) between[{p[u], p[v]}] += w;
    }
  }
  double best_gain = 1e-12;
  std::pair<int, int> best{-1, -1};
  for (const auto& [ab, w] : between) {
    const double gain = w / m - tot[ab.first] * tot[ab.second] / (2.0 * m * m);
    if (gain > best_gain) {
      best_gain = gain;
      best = ab;
    }
  }
  if (best.first < 0) return false;
  for (auto& c : p) {
    if (c == best.second) c = best.first;
  }
  return true;
}

// Local search around a finished run: vertex-mover sweeps, community merges,
// and dissolving one community or an adjacent pair back into singletons.
Partition improve(const WeightedGraph& g, Partition p) {
  p = polish(g, std::move(p));
  double q = modularity(g, p);
  bool changed = true;
  while (changed) {
    changed = false;
    Partition merged = p;
    if (merge_best_pair(g, merged)) {
      merged = polish(g, std::move(merged));
      const double mq = modularity(g, merged);
      if (mq > q + 1e-12) {
        p = std::move(merged);
        q = mq;
        changed = true;
        continue;
      }
    }
    p = canonicalize(p);
    const int k = *std::max_element(p.begin(), p.end()) + 1;
    std::set<std::pair<int, int>> groups;  // {c, c} dissolves one community, {a, b} two adjacent ones
    for (int c = 0; c < k; ++c) groups.insert({c, c});
    for (std::size_t u = 0; u < g.size(); ++u) {
      for (const auto& [v, _] : g.neighbors(u)) {
        if (p[u] < p[v]) groups.insert({p[u], p[v]});
      }
    }
    for (const auto& [a, b] : groups) {
      Partition dissolved = p;
      int fresh = k;
      for (auto& label : dissolved) {
        if (label == a || label == b) label = fresh++;
      }
      if (fresh - k < 2) continue;
      dissolved = polish(g, std::move(dissolved));
      const double dq = modularity(g, dissolved);
      if (dq > q + 1e-12) {
        p = std::move(dissolved);
        q = dq;
        changed = true;
        break;
      }
    }
  }
  return p;
}

}  // namespace

Partition detect_communities(const WeightedGraph& g, const LeidenOptions& options) {
  const double m = g.total_weight();
  if (g.edge_count() == 0 || m <= 0.0) throw Error(Errc::EmptyGraph, "community detection needs at least one edge");
  require(options.restarts >= 1, "restarts >= 1");
  require(options.randomness > 0.0, "randomness > 0");

  Partition best;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Ctx ctx{options.resolution, 2.0 * m, options.randomness,
            std::mt19937_64(derive_seed(options.seed, "leiden/" + std::to_string(r)))};
    Partition p(g.size());
    std::iota(p.begin(), p.end(), 0);
    double q = modularity(g, p);
    for (int pass = 0; pass < options.max_passes; ++pass) {
      Partition next = split_disconnected(g, leiden_pass(g, p, ctx));
      const double nq = modularity(g, next);
      const bool improved = nq > q + 1e-12;
      if (nq >= q) {
        p = std::move(next);
        q = nq;
      }
      if (!improved) break;
    }
    if (options.polish_max_nodes > 0 && g.size() <= options.polish_max_nodes) {
      p = split_disconnected(g, improve(g, std::move(p)));
      q = modularity(g, p);
    }
    if (q > best_q + 1e-12) {
      best_q = q;
      best = std::move(p);
    }
  }

  // Iterated local search: kick a few nodes into neighbouring communities and
  // re-improve; keep strict improvements only.
  if (options.polish_max_nodes > 0 && g.size() <= options.polish_max_nodes && options.perturbations > 0) {
    std::mt19937_64 rng(derive_seed(options.seed, "leiden/perturb"));
    const std::size_t n = g.size();
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    const std::size_t kicks = std::max<std::size_t>(2, n / 5);
    for (int it = 0; it < options.perturbations; ++it) {
      Partition trial = canonicalize(best);
      int fresh = *std::max_element(trial.begin(), trial.end()) + 1;
      for (std::size_t j = 0; j < kicks; ++j) {
        const std::size_t v = node(rng);
        const auto& nb = g.neighbors(v);
        if (nb.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, nb.size());
        const std::size_t r = pick(rng);
        if (r == nb.size()) {
          trial[v] = fresh++;
        } else {
          trial[v] = trial[std::next(nb.begin(), static_cast<long>(r))->first];
        }
      }
      trial = split_disconnected(g, improve(g, split_disconnected(g, trial)));
      const double tq = modularity(g, trial);
      if (tq > best_q + 1e-12) {
        best_q = tq;
        best = std::move(trial);
      }
    }
  }
  return canonicalize(split_disconnected(g, best));
}

}  // namespace gar::graph
