// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace oracle {

/// Dense symmetric adjacency; a[i][i] must be 0.
using Matrix = std::vector<std::vector<double>>;

/// Q = 1/(2m) * sum_ij [A_ij - k_i k_j / (2m)] delta(c_i, c_j), straight from the definition.
double modularity_double_sum(const Matrix& a, const std::vector<int>& labels);

/// Maximum modularity over every set partition (restricted growth strings).
double max_modularity(const Matrix& a);

/// Bell number check helper: count of partitions enumerated for n nodes.
long long partition_count(int n);

}  // namespace oracle
