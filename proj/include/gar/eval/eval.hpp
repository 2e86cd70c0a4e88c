// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gar/core/error.hpp"
#include "json.hpp"

namespace gar::eval {

struct Match {
  std::string a;
  std::string b;
  std::string winner;  // equals a or b
};

using MatchLog = std::vector<Match>;

/// Throws EmptyLog, SelfMatch, or PreconditionViolation when the winner is
/// neither competitor.
void validate(const MatchLog& log);

/// Competitors in order of first appearance.
std::vector<std::string> competitors(const MatchLog& log);

struct WinMatrix {
  std::vector<std::string> competitors;
  std::vector<std::vector<int>> wins;    // wins[i][j]: i beat j
  std::vector<std::vector<int>> counts;  // matches between i and j
  /// w_ij, undefined on the diagonal and for pairs that never met.
  std::optional<double> w(std::size_t i, std::size_t j) const;
};

WinMatrix win_matrix(const MatchLog& log);

struct BTFit {
  std::vector<std::string> competitors;
  std::vector<double> xi;  // xi of each component's first competitor is exactly 0
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  int components = 1;

  double score(const std::string& name) const;
};

inline constexpr double kXiClamp = 20.0;

/// Bradley-Terry strengths by gradient descent with backtracking on the mean
/// binary cross-entropy, holding the anchor of each connected component at 0.
/// Perfect separation clamps coefficients at +/-20 with converged = false.
BTFit fit_bradley_terry(const MatchLog& log, double tol = 1e-8, int max_iter = 10000, Diagnostics* diag = nullptr);

/// P(a beats b) = 1 / (1 + exp(xi_b - xi_a)).
double win_probability(double xi_a, double xi_b);

/// Descending xi, ties in lexicographic order.
std::vector<std::string> rank(const BTFit& fit);

struct ClassificationReport {
  int tp = 0;
  int fp = 0;
  int tn = 0;
  int fn = 0;
  double balanced_accuracy = 0.0;
  double f1 = 0.0;
};

/// Positive class = accept. Balanced accuracy averages recall over the
/// classes present in the truth; F1 is 0 when 2TP + FP + FN = 0.
/// Throws Empty or LengthMismatch.
ClassificationReport classification_metrics(const std::vector<bool>& predictions, const std::vector<bool>& truths);

/// Sample correlation. Throws LengthMismatch (or fewer than 2 points) and ZeroVariance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

/// ln((agent_freq + eps) / (human_freq + eps)) per aspect over relative
/// frequencies. Throws KeyMismatch when the key sets differ.
std::map<std::string, double> aspect_log_ratio(const std::map<std::string, double>& agent,
                                               const std::map<std::string, double>& human, double eps = 1e-9);

/// CSV with rows a,b,winner; an optional header row "a,b,winner" is skipped.
/// The winner column may name a competitor or be the literal a / b.
MatchLog load_match_log(const std::string& path);

/// CSV rows id,label where label is accept/accept_oral/accept_poster/1 or
/// reject/0; an optional header is skipped.
std::map<std::string, bool> load_labels(const std::string& path);

/// {aspect: count} JSON object.
std::map<std::string, double> load_aspect_counts(const std::string& path);

nlohmann::json to_json(const BTFit& fit);
nlohmann::json to_json(const WinMatrix& m);
nlohmann::json to_json(const ClassificationReport& r);

}  // namespace gar::eval
