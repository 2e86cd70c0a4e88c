// SPDX-License-Identifier: Apache-2.0

#include "oracles/brute_force.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace oracle {

double modularity_double_sum(const Matrix& a, const std::vector<int>& labels) {
  const std::size_t n = a.size();
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) q += a[i][j] - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

namespace {

void enumerate(int n, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> rgs(n, 0);
  std::function<void(int, int)> rec = [&](int i, int max_label) {
    if (i == n) {
      visit(rgs);
      return;
    }
    for (int c = 0; c <= max_label + 1; ++c) {
      rgs[i] = c;
      rec(i + 1, std::max(max_label, c));
    }
  };
  if (n == 0) return;
  rec(1, 0);
}

}  // namespace

double max_modularity(const Matrix& a) {
  double best = -std::numeric_limits<double>::infinity();
  enumerate(static_cast<int>(a.size()),
            [&](const std::vector<int>& p) { best = std::max(best, modularity_double_sum(a, p)); });
  return best;
}

long long partition_count(int n) {
  long long count = 0;
  enumerate(n, [&](const std::vector<int>&) { ++count; });
  return count;
}

}  // namespace oracle
