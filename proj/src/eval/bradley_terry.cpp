// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gar/eval/eval.hpp"

namespace gar::eval {

void validate(const MatchLog& log) {
  if (log.empty()) throw Error(Errc::EmptyLog, "match log is empty");
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Match& m = log[i];
    if (m.a == m.b) throw Error(Errc::SelfMatch, "competitor " + m.a + " matched against itself", {{"match", i}});
    if (m.winner != m.a && m.winner != m.b) {
      throw Error(Errc::PreconditionViolation, "winner " + m.winner + " is not in match " + std::to_string(i),
                  {{"match", i}});
    }
  }
}

std::vector<std::string> competitors(const MatchLog& log) {
  std::vector<std::string> out;
  std::map<std::string, bool> seen;
  for (const auto& m : log) {
    for (const auto* name : {&m.a, &m.b}) {
      if (!seen[*name]) {
        seen[*name] = true;
        out.push_back(*name);
      }
    }
  }
  return out;
}

std::optional<double> WinMatrix::w(std::size_t i, std::size_t j) const {
  if (i == j || counts.at(i).at(j) == 0) return std::nullopt;
  return static_cast<double>(wins[i][j]) / static_cast<double>(counts[i][j]);
}

WinMatrix win_matrix(const MatchLog& log) {
  validate(log);
  WinMatrix m;
  m.competitors = competitors(log);
  const std::size_t n = m.competitors.size();
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[m.competitors[i]] = i;
  m.wins.assign(n, std::vector<int>(n, 0));
  m.counts.assign(n, std::vector<int>(n, 0));
  for (const auto& x : log) {
    const std::size_t a = idx[x.a];
    const std::size_t b = idx[x.b];
    ++m.counts[a][b];
    ++m.counts[b][a];
    if (x.winner == x.a) {
      ++m.wins[a][b];
    } else {
      ++m.wins[b][a];
    }
  }
  return m;
}

double win_probability(double xi_a, double xi_b) { return 1.0 / (1.0 + std::exp(xi_b - xi_a)); }

double BTFit::score(const std::string& name) const {
  for (std::size_t i = 0; i < competitors.size(); ++i) {
    if (competitors[i] == name) return xi[i];
  }
  throw Error(Errc::PreconditionViolation, "unknown competitor " + name);
}

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct Problem {
  std::vector<std::pair<std::size_t, std::size_t>> games;  // (winner, loser), one per distinct outcome
  std::vector<double> count;                                // repetitions of games[k]
  double total = 0.0;                                       // number of matches
  std::vector<char> free;                                   // 0 for anchors

  double loss(const std::vector<double>& xi) const {
    double s = 0.0;
    for (std::size_t k = 0; k < games.size(); ++k) s += count[k] * softplus(xi[games[k].second] - xi[games[k].first]);
    return s / total;
  }

  std::vector<double> gradient(const std::vector<double>& xi) const {
    std::vector<double> g(xi.size(), 0.0);
    for (std::size_t k = 0; k < games.size(); ++k) {
      const auto [w, l] = games[k];
      const double p_loss = count[k] / (1.0 + std::exp(xi[w] - xi[l]));  // n * sigma(xi_l - xi_w)
      g[w] -= p_loss;
      g[l] += p_loss;
    }
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = free[i] ? g[i] / total : 0.0;
    return g;
  }
};

// The likelihood has a finite maximizer iff, within every connected component,
// each competitor can reach every other along "beat" edges (Zermelo's
// condition), i.e. the component is one strongly connected component.
bool separated(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& games,
               const std::vector<std::size_t>& component) {
  std::vector<std::vector<std::size_t>> fwd(n);
  std::vector<std::vector<std::size_t>> back(n);
  for (const auto& [w, l] : games) {
    fwd[w].push_back(l);
    back[l].push_back(w);
  }
  auto reach = [&](std::size_t s, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (auto v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  std::map<std::size_t, bool> checked;
  for (std::size_t s = 0; s < n; ++s) {
    if (checked[component[s]]) continue;
    checked[component[s]] = true;
    const auto f = reach(s, fwd);
    const auto b = reach(s, back);
    for (std::size_t v = 0; v < n; ++v) {
      if (component[v] == component[s] && (!f[v] || !b[v])) return true;
    }
  }
  return false;
}

double norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

BTFit fit_bradley_terry(const MatchLog& log, double tol, int max_iter, Diagnostics* diag) {
  validate(log);
  require(tol > 0.0 && max_iter >= 1, "tol > 0 and max_iter >= 1");
  BTFit fit;
  fit.competitors = competitors(log);
  const std::size_t n = fit.competitors.size();
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[fit.competitors[i]] = i;

  Problem prob;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
  for (const auto& m : log) {
    const std::size_t a = idx[m.a];
    const std::size_t b = idx[m.b];
    const std::pair<std::size_t, std::size_t> game{m.winner == m.a ? a : b, m.winner == m.a ? b : a};
    const auto [it, inserted] = slot.emplace(game, prob.games.size());
    if (inserted) {
      prob.games.push_back(game);
      prob.count.push_back(0.0);
    }
    prob.count[it->second] += 1.0;
    parent[find(a)] = find(b);
  }
  prob.total = static_cast<double>(log.size());
  // Anchor = first-appearing competitor of each connected component.
  prob.free.assign(n, 1);
  std::map<std::size_t, bool> anchored;
  for (std::size_t i = 0; i < n; ++i) {
    if (!anchored[find(i)]) {
      anchored[find(i)] = true;
      prob.free[i] = 0;
    }
  }
  fit.components = static_cast<int>(anchored.size());
  if (fit.components > 1) {
    warn(diag, "comparison graph has " + std::to_string(fit.components) +
                   " connected components; each is anchored separately and scores are not comparable across them");
  }

  std::vector<std::size_t> component(n);
  for (std::size_t i = 0; i < n; ++i) component[i] = find(i);
  const bool diverges = separated(n, prob.games, component);

  std::vector<double> xi(n, 0.0);
  double f = prob.loss(xi);
  double step = 1.0;
  bool clamped = false;
  int it = 0;
  std::vector<double> g = prob.gradient(xi);
  double gn = norm(g);
  for (; it < max_iter && (diverges || gn >= tol); ++it) {
    // Backtracking (Armijo) line search along -g.
    step = std::min(step * 2.0, 1e6);
    std::vector<double> next(n);
    double fn = 0.0;
    while (true) {
      for (std::size_t i = 0; i < n; ++i) next[i] = xi[i] - step * g[i];
      fn = prob.loss(next);
      if (fn <= f - 0.5 * step * gn * gn || step < 1e-16) break;
      step *= 0.5;
    }
    xi = std::move(next);
    f = fn;
    if (std::any_of(xi.begin(), xi.end(), [](double x) { return std::abs(x) > kXiClamp; })) {
      clamped = true;
      ++it;
      break;
    }
    g = prob.gradient(xi);
    gn = norm(g);
  }
  if (diverges) clamped = true;
  if (clamped) {
    for (auto& x : xi) x = std::clamp(x, -kXiClamp, kXiClamp);
    warn(diag, "perfect separation: coefficients clamped at +/-20");
    g = prob.gradient(xi);
    gn = norm(g);
  }
  fit.xi = xi;
  fit.iterations = it;
  fit.gradient_norm = gn;
  fit.converged = !clamped && gn < tol;
  return fit;
}

std::vector<std::string> rank(const BTFit& fit) {
  std::vector<std::size_t> order(fit.competitors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fit.xi[a] != fit.xi[b]) return fit.xi[a] > fit.xi[b];
    return fit.competitors[a] < fit.competitors[b];
  });
  std::vector<std::string> out;
  for (auto i : order) out.push_back(fit.competitors[i]);
  return out;
}

nlohmann::json to_json(const BTFit& fit) {
  nlohmann::json scores = nlohmann::json::array();
  for (std::size_t i = 0; i < fit.competitors.size(); ++i) {
    scores.push_back({{"competitor", fit.competitors[i]}, {"xi", fit.xi[i]}});
  }
  return {{"scores", scores},
          {"ranking", rank(fit)},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"gradient_norm", fit.gradient_norm},
          {"components", fit.components}};
}

nlohmann::json to_json(const WinMatrix& m) {
  nlohmann::json w = nlohmann::json::array();
  for (std::size_t i = 0; i < m.competitors.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.competitors.size(); ++j) {
      const auto v = m.w(i, j);
      row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    }
    w.push_back(row);
  }
  return {{"competitors", m.competitors}, {"w", w}, {"counts", m.counts}};
}

}  // namespace gar::eval
