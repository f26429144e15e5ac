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
//
// Test-only oracles, kept deliberately independent of the library code
// paths they check: brute-force enumeration instead of assignment solvers,
// membership scans instead of event sweeps, full-matrix DPs instead of
// rolling arrays.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "dialkit/rng.hpp"
#include "dialkit/segio.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Edit distance (plain Levenshtein, full matrix).
// ---------------------------------------------------------------------------

inline int64_t levenshtein(const std::vector<std::string>& ref,
                           const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::vector<int64_t>> dp(n + 1, std::vector<int64_t>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) dp[i][0] = static_cast<int64_t>(i);
  for (std::size_t j = 0; j <= m; ++j) dp[0][j] = static_cast<int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int64_t sub = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      dp[i][j] = std::min({dp[i - 1][j - 1] + sub, dp[i - 1][j] + 1, dp[i][j - 1] + 1});
    }
  }
  return dp[n][m];
}

// ---------------------------------------------------------------------------
// LCS (full matrix).
// ---------------------------------------------------------------------------

inline int64_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<int64_t>> dp(a.size() + 1, std::vector<int64_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                      : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  return dp[a.size()][b.size()];
}

// ---------------------------------------------------------------------------
// Injective assignments by exhaustive enumeration.
// ---------------------------------------------------------------------------

/// All injective maps from rows into columns (including partial maps is not
/// needed: callers pad). Calls visit(map) where map[row] = column.
template <typename Visit>
inline void enumerate_injections(std::size_t rows, std::size_t cols, Visit&& visit) {
  std::vector<int> map(rows, -1);
  std::vector<char> used(cols, 0);
  const std::size_t depth_max = rows;
  auto recurse = [&](auto&& self, std::size_t row) -> void {
    if (row == depth_max) {
      visit(map);
      return;
    }
    // Leaving a row unmatched is allowed; required when rows > cols.
    map[row] = -1;
    self(self, row + 1);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      map[row] = static_cast<int>(c);
      self(self, row + 1);
      used[c] = 0;
      map[row] = -1;
    }
  };
  recurse(recurse, 0);
}

// ---------------------------------------------------------------------------
// DER by brute force: enumerate hyp -> ref injections, score each with a
// membership-scan instant sweep, keep the minimum error.
// ---------------------------------------------------------------------------

struct DerOracleResult {
  double miss = 0.0, fa = 0.0, conf = 0.0, total_ref = 0.0, der = 0.0;
};

namespace detail {

inline int64_t ms(double seconds) { return std::llround(seconds * 1000.0); }

struct Scored {
  double miss = 0.0, fa = 0.0, conf = 0.0, total_ref = 0.0;
};

inline Scored score_mapping(const dialkit::segio::Timeline& ref,
                            const dialkit::segio::Timeline& hyp,
                            const std::vector<std::string>& ref_speakers,
                            const std::vector<std::string>& hyp_speakers,
                            const std::vector<int>& hyp_to_ref, double collar,
                            bool score_overlap) {
  // Breakpoints from every boundary and collar edge.
  std::set<int64_t> points;
  const int64_t half = std::llround(collar * 500.0);
  for (const auto& s : ref.segments()) {
    points.insert(ms(s.onset));
    points.insert(ms(s.end()));
    if (half > 0) {
      points.insert(ms(s.onset) - half);
      points.insert(ms(s.onset) + half);
      points.insert(ms(s.end()) - half);
      points.insert(ms(s.end()) + half);
    }
  }
  for (const auto& s : hyp.segments()) {
    points.insert(ms(s.onset));
    points.insert(ms(s.end()));
  }
  const std::vector<int64_t> ticks(points.begin(), points.end());

  Scored out;
  for (std::size_t t = 0; t + 1 < ticks.size(); ++t) {
    const int64_t lo = ticks[t];
    const int64_t hi = ticks[t + 1];
    const double len = static_cast<double>(hi - lo) / 1000.0;
    // Membership scans over all segments and collar zones.
    bool excluded = false;
    if (half > 0) {
      for (const auto& s : ref.segments()) {
        for (int64_t b : {ms(s.onset), ms(s.end())}) {
          if (lo >= b - half && hi <= b + half) excluded = true;
        }
      }
    }
    std::set<std::string> active_ref, active_hyp;
    for (const auto& s : ref.segments()) {
      if (ms(s.onset) <= lo && hi <= ms(s.end())) active_ref.insert(s.speaker);
    }
    for (const auto& s : hyp.segments()) {
      if (ms(s.onset) <= lo && hi <= ms(s.end())) active_hyp.insert(s.speaker);
    }
    if (!score_overlap && active_ref.size() >= 2) excluded = true;
    if (excluded) continue;

    const int num_ref = static_cast<int>(active_ref.size());
    const int num_hyp = static_cast<int>(active_hyp.size());
    int correct = 0;
    for (std::size_t h = 0; h < hyp_speakers.size(); ++h) {
      if (hyp_to_ref[h] < 0) continue;
      if (active_hyp.count(hyp_speakers[h]) &&
          active_ref.count(ref_speakers[static_cast<std::size_t>(hyp_to_ref[h])])) {
        ++correct;
      }
    }
    out.total_ref += len * num_ref;
    out.miss += len * std::max(0, num_ref - num_hyp);
    out.fa += len * std::max(0, num_hyp - num_ref);
    out.conf += len * (std::min(num_ref, num_hyp) - correct);
  }
  return out;
}

}  // namespace detail

inline DerOracleResult brute_force_der(const dialkit::segio::Timeline& ref,
                                       const dialkit::segio::Timeline& hyp,
                                       double collar = 0.0, bool score_overlap = true) {
  const auto ref_speakers = ref.speakers();
  const auto hyp_speakers = hyp.speakers();
  DerOracleResult best;
  bool first = true;
  enumerate_injections(hyp_speakers.size(), ref_speakers.size(), [&](const std::vector<int>& map) {
    const auto scored = detail::score_mapping(ref, hyp, ref_speakers, hyp_speakers, map,
                                              collar, score_overlap);
    const double err = scored.miss + scored.fa + scored.conf;
    if (first || err < best.miss + best.fa + best.conf) {
      first = false;
      best.miss = scored.miss;
      best.fa = scored.fa;
      best.conf = scored.conf;
      best.total_ref = scored.total_ref;
    }
  });
  best.der = best.total_ref > 0
                 ? (best.miss + best.fa + best.conf) / best.total_ref
                 : (best.miss + best.fa + best.conf > 0
                        ? std::numeric_limits<double>::infinity()
                        : 0.0);
  return best;
}

/// Best assignment value by enumeration: maximizes the summed matrix weight
/// over injective row -> column maps.
inline double brute_force_max_assignment(const std::vector<std::vector<double>>& weight) {
  if (weight.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  enumerate_injections(weight.size(), weight.front().size(), [&](const std::vector<int>& map) {
    double total = 0.0;
    for (std::size_t r = 0; r < map.size(); ++r) {
      if (map[r] >= 0) total += weight[r][static_cast<std::size_t>(map[r])];
    }
    best = std::max(best, total);
  });
  return best;
}

/// Minimum total over injective maps where unmatched rows/columns incur the
/// given penalties. Mirrors the stream-assignment semantics of tcpWER.
inline double brute_force_min_assignment_with_rejection(
    const std::vector<std::vector<double>>& cost, const std::vector<double>& row_penalty,
    const std::vector<double>& col_penalty) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t cols = cost.empty() ? col_penalty.size() : cost.front().size();
  enumerate_injections(row_penalty.size(), cols, [&](const std::vector<int>& map) {
    double total = 0.0;
    std::vector<char> used(cols, 0);
    for (std::size_t r = 0; r < map.size(); ++r) {
      if (map[r] < 0) {
        total += row_penalty[r];
      } else {
        total += cost[r][static_cast<std::size_t>(map[r])];
        used[static_cast<std::size_t>(map[r])] = 1;
      }
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!used[c]) total += col_penalty[c];
    }
    best = std::min(best, total);
  });
  return best;
}

// ---------------------------------------------------------------------------
// Lloyd restarts with uniform random seeding.
// ---------------------------------------------------------------------------

inline double lloyd_restart_best_inertia(const std::vector<std::vector<double>>& points,
                                         int k, int restarts, uint64_t seed) {
  dialkit::rng::Prng prng(seed);
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    // Distinct random initial centroids.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(order[i], order[i + prng.next_index(n - i)]);
    }
    std::vector<std::vector<double>> centroids;
    for (int c = 0; c < k; ++c) centroids.push_back(points[order[static_cast<std::size_t>(c)]]);

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < 300; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        int arg = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          double d = 0.0;
          for (std::size_t j = 0; j < dim; ++j) {
            const double diff = points[i][j] - centroids[static_cast<std::size_t>(c)][j];
            d += diff * diff;
          }
          if (d < best_d) {
            best_d = d;
            arg = c;
          }
        }
        if (assign[i] != arg) {
          assign[i] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                            std::vector<double>(dim, 0.0));
      std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < n; ++i) {
        ++counts[static_cast<std::size_t>(assign[i])];
        for (std::size_t j = 0; j < dim; ++j) {
          sums[static_cast<std::size_t>(assign[i])][j] += points[i][j];
        }
      }
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) continue;
        for (std::size_t j = 0; j < dim; ++j) {
          centroids[static_cast<std::size_t>(c)][j] =
              sums[static_cast<std::size_t>(c)][j] /
              static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
      }
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double diff = points[i][j] - centroids[static_cast<std::size_t>(assign[i])][j];
        inertia += diff * diff;
      }
    }
    best = std::min(best, inertia);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Powerset classes by direct enumeration.
// ---------------------------------------------------------------------------

/// All binary vectors of length k with popcount <= m, sorted by
/// (cardinality, lexicographic member order) -- independently of the codec.
inline std::vector<std::vector<uint8_t>> powerset_table(int k, int m) {
  std::vector<std::vector<int>> subsets;
  for (uint32_t bits = 0; bits < (uint32_t{1} << k); ++bits) {
    if (std::popcount(bits) > m) continue;
    std::vector<int> members;
    for (int s = 0; s < k; ++s) {
      if (bits >> s & 1) members.push_back(s);
    }
    subsets.push_back(std::move(members));
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  std::vector<std::vector<uint8_t>> table;
  for (const auto& members : subsets) {
    std::vector<uint8_t> row(static_cast<std::size_t>(k), 0);
    for (int s : members) row[static_cast<std::size_t>(s)] = 1;
    table.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Random timeline generation on the millisecond grid.
// ---------------------------------------------------------------------------

inline dialkit::segio::Timeline random_timeline(dialkit::rng::Prng& prng, int max_speakers,
                                                int max_segments,
                                                const std::string& file_id = "rnd",
                                                const std::string& prefix = "spk") {
  dialkit::segio::Timeline t(file_id);
  const int speakers = 1 + static_cast<int>(prng.next_index(static_cast<std::size_t>(max_speakers)));
  const int segments = 1 + static_cast<int>(prng.next_index(static_cast<std::size_t>(max_segments)));
  for (int i = 0; i < segments; ++i) {
    dialkit::segio::Segment s;
    s.onset = static_cast<double>(prng.next_index(30000)) / 1000.0;
    s.duration = static_cast<double>(1 + prng.next_index(8000)) / 1000.0;
    s.speaker = prefix + std::to_string(prng.next_index(static_cast<std::size_t>(speakers)));
    t.add(std::move(s));
  }
  return t;
}

}  // namespace oracles
