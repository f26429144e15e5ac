// Copyright 2026 The dialkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <limits>
#include <vector>

#include "dialkit/errors.hpp"

namespace dialkit::assignment {

struct AssignmentResult {
  // row_to_col[i] = assigned column for row i, or -1 when unassigned
  // (only possible when the matrix is not square).
  std::vector<int> row_to_col;
  double total_cost = 0.0;
};

namespace detail {

// O(n^2 m) shortest augmenting path formulation with potentials, for
// n <= m. Returns col -> row matching (1-based internally).
inline std::vector<int> solve_rows_le_cols(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = static_cast<int>(cost.front().size());
  const double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(m) + 1, 0);  // col -> row
  std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(static_cast<std::size_t>(m) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  return match;
}

}  // namespace detail

/// Minimum-cost linear assignment over a dense rows x cols matrix of finite
/// costs. Assigns min(rows, cols) pairs; negative costs are fine.
/// Deterministic for a given matrix.
inline AssignmentResult solve(const std::vector<std::vector<double>>& cost) {
  AssignmentResult result;
  if (cost.empty()) return result;
  const std::size_t rows = cost.size();
  const std::size_t cols = cost.front().size();
  for (const auto& row : cost) {
    if (row.size() != cols) throw ShapeError("assignment: ragged cost matrix");
    for (double c : row) {
      if (!(c < std::numeric_limits<double>::infinity()) ||
          !(c > -std::numeric_limits<double>::infinity())) {
        throw ValidationError("assignment: costs must be finite");
      }
    }
  }
  if (cols == 0) {
    result.row_to_col.assign(rows, -1);
    return result;
  }

  result.row_to_col.assign(rows, -1);
  if (rows <= cols) {
    const auto match = detail::solve_rows_le_cols(cost);
    for (std::size_t j = 1; j <= cols; ++j) {
      if (match[j] != 0) result.row_to_col[static_cast<std::size_t>(match[j]) - 1] =
          static_cast<int>(j) - 1;
    }
  } else {
    std::vector<std::vector<double>> transposed(cols, std::vector<double>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) transposed[j][i] = cost[i][j];
    }
    const auto match = detail::solve_rows_le_cols(transposed);
    for (std::size_t j = 1; j <= rows; ++j) {
      if (match[j] != 0) {
        result.row_to_col[j - 1] = match[j] - 1;
      }
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (result.row_to_col[i] >= 0) {
      result.total_cost += cost[i][static_cast<std::size_t>(result.row_to_col[i])];
    }
  }
  return result;
}

}  // namespace dialkit::assignment
