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

#include <catch2/catch_amalgamated.hpp>

#include "dialkit/assignment.hpp"
#include "dialkit/rng.hpp"
#include "oracles.hpp"

using namespace dialkit;

TEST_CASE("known assignment", "[assignment]") {
  const std::vector<std::vector<double>> cost{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  const auto result = assignment::solve(cost);
  CHECK(result.total_cost == Catch::Approx(5.0));  // 1 + 2 + 2
  CHECK(result.row_to_col == std::vector<int>{1, 0, 2});
}

TEST_CASE("solver matches brute force on random matrices", "[assignment]") {
  rng::Prng prng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + prng.next_index(5);
    const std::size_t cols = 1 + prng.next_index(5);
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (auto& row : cost) {
      for (auto& c : row) c = std::floor(prng.next_canonical() * 41.0) - 20.0;
    }
    const auto solved = assignment::solve(cost);
    // Minimizing cost over full-size matchings == maximizing the negated
    // weights; the enumerator explores partial maps too, so force
    // completeness by rewarding every matched pair with a large bonus.
    std::vector<std::vector<double>> weight(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) weight[i][j] = 1000.0 - cost[i][j];
    }
    const double best = oracles::brute_force_max_assignment(weight);
    const double expected_pairs = static_cast<double>(std::min(rows, cols));
    CHECK(solved.total_cost == Catch::Approx(expected_pairs * 1000.0 - best));

    std::size_t assigned = 0;
    std::vector<char> used(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
      if (solved.row_to_col[i] >= 0) {
        ++assigned;
        REQUIRE_FALSE(used[static_cast<std::size_t>(solved.row_to_col[i])]);
        used[static_cast<std::size_t>(solved.row_to_col[i])] = 1;
      }
    }
    CHECK(assigned == std::min(rows, cols));
  }
}

TEST_CASE("solver rejects ragged and non-finite input", "[assignment]") {
  CHECK_THROWS_AS(assignment::solve({{1.0, 2.0}, {1.0}}), ShapeError);
  CHECK_THROWS_AS(assignment::solve({{std::numeric_limits<double>::infinity()}}),
                  ValidationError);
  CHECK(assignment::solve({}).row_to_col.empty());
}
