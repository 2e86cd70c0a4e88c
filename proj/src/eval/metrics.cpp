// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>

#include "gar/core/hash.hpp"
#include "gar/core/text.hpp"
#include "gar/eval/eval.hpp"

namespace gar::eval {

ClassificationReport classification_metrics(const std::vector<bool>& predictions, const std::vector<bool>& truths) {
  if (predictions.empty() && truths.empty()) throw Error(Errc::Empty, "no predictions");
  if (predictions.size() != truths.size()) {
    throw Error(Errc::LengthMismatch, "predictions and truths differ in length",
                {{"predictions", predictions.size()}, {"truths", truths.size()}});
  }
  ClassificationReport r;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i]) {
      predictions[i] ? ++r.tp : ++r.fn;
    } else {
      predictions[i] ? ++r.fp : ++r.tn;
    }
  }
  double recall_sum = 0.0;
  int classes = 0;
  if (r.tp + r.fn > 0) {
    recall_sum += static_cast<double>(r.tp) / (r.tp + r.fn);
    ++classes;
  }
  if (r.tn + r.fp > 0) {
    recall_sum += static_cast<double>(r.tn) / (r.tn + r.fp);
    ++classes;
  }
  r.balanced_accuracy = recall_sum / classes;
  const int denom = 2 * r.tp + r.fp + r.fn;
  r.f1 = denom == 0 ? 0.0 : 2.0 * r.tp / denom;
  return r;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw Error(Errc::LengthMismatch, "series differ in length", {{"xs", xs.size()}, {"ys", ys.size()}});
  }
  if (xs.size() < 2) throw Error(Errc::LengthMismatch, "correlation needs at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::ZeroVariance, "correlation of a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::map<std::string, double> aspect_log_ratio(const std::map<std::string, double>& agent,
                                               const std::map<std::string, double>& human, double eps) {
  bool same = agent.size() == human.size();
  for (auto a = agent.begin(), h = human.begin(); same && a != agent.end(); ++a, ++h) same = a->first == h->first;
  if (!same) throw Error(Errc::KeyMismatch, "agent and human aspect sets differ");
  require(eps > 0.0, "eps > 0");
  double ta = 0.0;
  double th = 0.0;
  for (const auto& [k, v] : agent) {
    require(v >= 0.0, "aspect counts are non-negative");
    ta += v;
  }
  for (const auto& [k, v] : human) {
    require(v >= 0.0, "aspect counts are non-negative");
    th += v;
  }
  std::map<std::string, double> out;
  for (const auto& [k, v] : agent) {
    const double fa = ta > 0.0 ? v / ta : 0.0;
    const double fh = th > 0.0 ? human.at(k) / th : 0.0;
    out[k] = std::log((fa + eps) / (fh + eps));
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path, {{"path", path}});
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    std::vector<std::string> cells;
    for (const auto& c : text::split(line, ',')) cells.push_back(text::trim(c));
    rows.push_back(std::move(cells));
  }
  return rows;
}

[[noreturn]] void bad_row(const std::string& path, std::size_t n, const std::string& why) {
  throw Error(Errc::MalformedLine, path + ": row " + std::to_string(n) + ": " + why, {{"path", path}, {"line", n}});
}

}  // namespace

MatchLog load_match_log(const std::string& path) {
  const auto rows = read_csv(path);
  MatchLog log;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) bad_row(path, i + 1, "expected a,b,winner");
    if (i == 0 && text::to_lower(r[0]) == "a" && text::to_lower(r[1]) == "b" && text::to_lower(r[2]) == "winner") continue;
    std::string winner = r[2];
    if (winner != r[0] && winner != r[1]) {
      if (winner == "a") {
        winner = r[0];
      } else if (winner == "b") {
        winner = r[1];
      } else {
        bad_row(path, i + 1, "winner " + winner + " is neither competitor");
      }
    }
    log.push_back({r[0], r[1], winner});
  }
  return log;
}

std::map<std::string, bool> load_labels(const std::string& path) {
  const auto rows = read_csv(path);
  std::map<std::string, bool> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 2) bad_row(path, i + 1, "expected id,label");
    const std::string label = text::to_lower(r[1]);
    if (label == "accept" || label == "accept_oral" || label == "accept_poster" || label == "1") {
      out[r[0]] = true;
    } else if (label == "reject" || label == "0") {
      out[r[0]] = false;
    } else if (i == 0) {
      continue;  // header
    } else {
      bad_row(path, i + 1, "unknown label " + r[1]);
    }
  }
  return out;
}

std::map<std::string, double> load_aspect_counts(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::MalformedLine, path + " is not a JSON object");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw Error(Errc::MalformedLine, path + ": count for " + k + " is not a number");
    out[k] = v.get<double>();
  }
  return out;
}

nlohmann::json to_json(const ClassificationReport& r) {
  return {{"balanced_accuracy", r.balanced_accuracy}, {"f1", r.f1}, {"tp", r.tp},
          {"fp", r.fp},                               {"tn", r.tn}, {"fn", r.fn}};
}

}  // namespace gar::eval
