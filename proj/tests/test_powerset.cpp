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

#include <filesystem>

#include <catch2/catch_amalgamated.hpp>

#include "dialkit/powerset.hpp"
#include "dialkit/rng.hpp"
#include "oracles.hpp"

using namespace dialkit;
using powerset::PowersetConfig;

TEST_CASE("class counts match the combinatorial sum", "[powerset]") {
  CHECK(powerset::class_count({2, 2}) == 4);
  CHECK(powerset::class_count({4, 2}) == 11);
  CHECK(powerset::class_count({1, 1}) == 2);
  CHECK_THROWS_AS(powerset::class_count({0, 1}), ValidationError);
  CHECK_THROWS_AS(powerset::class_count({2, 3}), ValidationError);
}

TEST_CASE("two-speaker codec table", "[powerset]") {
  const PowersetConfig cfg{2, 2};
  CHECK(powerset::encode({0, 0}, cfg) == 0);
  CHECK(powerset::encode({1, 0}, cfg) == 1);
  CHECK(powerset::encode({0, 1}, cfg) == 2);
  CHECK(powerset::encode({1, 1}, cfg) == 3);
  CHECK(powerset::decode(3, cfg) == std::vector<uint8_t>{1, 1});
  CHECK(powerset::decode(0, cfg) == std::vector<uint8_t>{0, 0});
}

TEST_CASE("pair ranking for the four-speaker head", "[powerset]") {
  const PowersetConfig cfg{4, 2};
  CHECK(powerset::encode({0, 1, 0, 1}, cfg) == 9);
  CHECK_THROWS_AS(powerset::encode({1, 1, 1, 0}, cfg), ValidationError);
  for (uint64_t idx = 0; idx < 11; ++idx) {
    CHECK(powerset::encode(powerset::decode(idx, cfg), cfg) == idx);
  }
}

TEST_CASE("codec matches the enumeration oracle exhaustively", "[powerset]") {
  for (int k = 1; k <= 5; ++k) {
    for (int m = 1; m <= std::min(k, 3); ++m) {
      const PowersetConfig cfg{k, m};
      const auto table = oracles::powerset_table(k, m);
      REQUIRE(powerset::class_count(cfg) == table.size());
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        CHECK(powerset::decode(idx, cfg) == table[idx]);
        CHECK(powerset::encode(table[idx], cfg) == idx);
      }
    }
  }
}

TEST_CASE("decode_frames takes the argmax with low-index ties", "[powerset]") {
  const PowersetConfig cfg{2, 2};
  powerset::PosteriorGrid grid;
  grid.num_classes = 4;
  grid.frame_duration = 0.02;
  grid.values = {0.0f, 0.0f, 0.0f, 1.0f,    // class 3 -> both speakers
                 0.25f, 0.25f, 0.25f, 0.25f};  // uniform tie -> class 0
  const auto activity = powerset::decode_frames(grid, cfg);
  REQUIRE(activity.frames() == 2);
  CHECK(activity.at(0, 0) == 1.0f);
  CHECK(activity.at(0, 1) == 1.0f);
  CHECK(activity.at(1, 0) == 0.0f);
  CHECK(activity.at(1, 1) == 0.0f);
}

TEST_CASE("decode_frames equals a per-row max scan on random posteriors", "[powerset]") {
  const PowersetConfig cfg{2, 2};
  rng::Prng prng(11);
  powerset::PosteriorGrid grid;
  grid.num_classes = 4;
  grid.values.resize(100 * 4);
  for (auto& v : grid.values) v = static_cast<float>(prng.next_canonical());
  const auto activity = powerset::decode_frames(grid, cfg);
  for (std::size_t f = 0; f < 100; ++f) {
    int best = 0;
    for (int c = 1; c < 4; ++c) {
      if (grid.at(f, c) > grid.at(f, best)) best = c;
    }
    const auto expected = powerset::decode(static_cast<uint64_t>(best), cfg);
    for (int s = 0; s < 2; ++s) {
      CHECK(activity.at(f, s) == (expected[static_cast<std::size_t>(s)] ? 1.0f : 0.0f));
    }
  }
}

TEST_CASE("decode_frames validates shape and finiteness", "[powerset]") {
  const PowersetConfig cfg{2, 2};
  powerset::PosteriorGrid grid;
  grid.num_classes = 3;
  grid.values = {0.1f, 0.2f, 0.3f};
  CHECK_THROWS_AS(powerset::decode_frames(grid, cfg), ShapeError);
  grid.num_classes = 4;
  grid.values = {0.1f, 0.2f, 0.3f, std::numeric_limits<float>::quiet_NaN()};
  CHECK_THROWS_AS(powerset::decode_frames(grid, cfg), ValidationError);
}

TEST_CASE("decoded rows never exceed max_simultaneous", "[powerset]") {
  rng::Prng prng(5);
  const PowersetConfig cfg{5, 3};
  const auto classes = powerset::class_count(cfg);
  for (int i = 0; i < 200; ++i) {
    const auto row = powerset::decode(prng.next_index(classes), cfg);
    int popcount = 0;
    for (auto v : row) popcount += v;
    CHECK(popcount <= cfg.max_simultaneous);
  }
}

TEST_CASE("column permutation commutes with encoding", "[powerset]") {
  for (int k : {2, 3}) {
    const PowersetConfig cfg{k, k};
    const auto classes = powerset::class_count(cfg);
    // Reverse the speaker columns; derive the induced class permutation.
    std::vector<uint64_t> induced(classes);
    for (uint64_t idx = 0; idx < classes; ++idx) {
      auto row = powerset::decode(idx, cfg);
      std::reverse(row.begin(), row.end());
      induced[idx] = powerset::encode(row, cfg);
    }
    rng::Prng prng(k);
    for (int i = 0; i < 50; ++i) {
      std::vector<uint8_t> active(static_cast<std::size_t>(k));
      for (auto& v : active) v = prng.next_index(2);
      auto permuted = active;
      std::reverse(permuted.begin(), permuted.end());
      CHECK(powerset::encode(permuted, cfg) == induced[powerset::encode(active, cfg)]);
    }
  }
}

TEST_CASE("posterior files round-trip in both formats", "[powerset]") {
  const PowersetConfig cfg{2, 2};
  rng::Prng prng(3);
  powerset::PosteriorGrid grid;
  grid.num_classes = 4;
  grid.frame_duration = 0.02;
  grid.values.resize(17 * 4);
  for (auto& v : grid.values) {
    v = static_cast<float>(prng.next_index(1000)) / 1000.0f;
  }
  const auto dir = std::filesystem::temp_directory_path() / "dialkit_powerset_io";
  std::filesystem::create_directories(dir);

  powerset::save_posteriors_binary(dir / "grid.bin", cfg, grid);
  const auto binary = powerset::load_posteriors(dir / "grid.bin");
  CHECK(binary.config == cfg);
  CHECK(binary.grid.values == grid.values);
  CHECK(binary.grid.frame_duration == grid.frame_duration);

  powerset::save_posteriors_text(dir / "grid.txt", cfg, grid);
  const auto text = powerset::load_posteriors(dir / "grid.txt");
  CHECK(text.config == cfg);
  REQUIRE(text.grid.values.size() == grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    CHECK(text.grid.values[i] == Catch::Approx(grid.values[i]).margin(1e-6));
  }
  std::filesystem::remove_all(dir);
}
