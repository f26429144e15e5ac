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
// Diarization Error Rate with optimal reference/hypothesis speaker mapping,
// boundary collar, and overlap accounting. The sweep walks merged boundary
// events on an exact millisecond grid; no frame sampling is involved.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dialkit/assignment.hpp"
#include "dialkit/errors.hpp"
#include "dialkit/segio.hpp"

namespace dialkit::der {

struct DerBreakdown {
  double miss = 0.0;         // seconds
  double false_alarm = 0.0;  // seconds
  double confusion = 0.0;    // seconds
  double total_ref = 0.0;    // scored reference speaker time, seconds
  double der = 0.0;          // (miss + false_alarm + confusion) / total_ref
  std::map<std::string, std::string> mapping;  // hyp speaker -> ref speaker
  double collar = 0.0;
  bool score_overlap = true;

  double error_seconds() const { return miss + false_alarm + confusion; }
};

namespace detail {

using Ticks = int64_t;

inline Ticks to_ticks(double seconds) { return std::llround(seconds * 1000.0); }
inline double to_seconds(Ticks t) { return static_cast<double>(t) / 1000.0; }

struct ElementaryInterval {
  Ticks length = 0;
  uint64_t ref_mask = 0;
  uint64_t hyp_mask = 0;
};

struct BoundaryEvent {
  Ticks tick = 0;
  int kind = 0;   // 0 = ref speaker, 1 = hyp speaker, 2 = exclusion
  int index = 0;  // speaker index for kinds 0/1
  int delta = 0;
};

inline std::vector<std::string> indexed_speakers(const segio::Timeline& t) {
  auto speakers = t.speakers();
  if (speakers.size() > 64) {
    throw ValidationError("der: more than 64 distinct speakers per side is unsupported");
  }
  return speakers;
}

inline int speaker_index(const std::vector<std::string>& speakers, const std::string& name) {
  return static_cast<int>(std::lower_bound(speakers.begin(), speakers.end(), name) -
                          speakers.begin());
}

/// Elementary intervals of the non-excluded evaluation region, with active
/// speaker bitmasks per side. Exclusions: +-collar/2 around every reference
/// segment boundary, plus reference overlap regions when score_overlap is
/// off.
inline std::vector<ElementaryInterval> sweep(const segio::Timeline& ref,
                                             const segio::Timeline& hyp,
                                             const std::vector<std::string>& ref_speakers,
                                             const std::vector<std::string>& hyp_speakers,
                                             double collar, bool score_overlap) {
  std::vector<BoundaryEvent> events;
  const Ticks half_collar = std::llround(collar * 500.0);

  for (const auto& s : ref.segments()) {
    const Ticks onset = to_ticks(s.onset);
    const Ticks end = to_ticks(s.end());
    const int idx = speaker_index(ref_speakers, s.speaker);
    events.push_back({onset, 0, idx, +1});
    events.push_back({end, 0, idx, -1});
    if (half_collar > 0) {
      events.push_back({onset - half_collar, 2, 0, +1});
      events.push_back({onset + half_collar, 2, 0, -1});
      events.push_back({end - half_collar, 2, 0, +1});
      events.push_back({end + half_collar, 2, 0, -1});
    }
  }
  for (const auto& s : hyp.segments()) {
    const Ticks onset = to_ticks(s.onset);
    const Ticks end = to_ticks(s.end());
    const int idx = speaker_index(hyp_speakers, s.speaker);
    events.push_back({onset, 1, idx, +1});
    events.push_back({end, 1, idx, -1});
  }

  if (!score_overlap) {
    // Reference overlap regions become exclusions: sweep reference counts.
    std::vector<BoundaryEvent> ref_events;
    for (const auto& s : ref.segments()) {
      const int idx = speaker_index(ref_speakers, s.speaker);
      ref_events.push_back({to_ticks(s.onset), 0, idx, +1});
      ref_events.push_back({to_ticks(s.end()), 0, idx, -1});
    }
    std::sort(ref_events.begin(), ref_events.end(),
              [](const BoundaryEvent& a, const BoundaryEvent& b) { return a.tick < b.tick; });
    std::vector<int> counts(ref_speakers.size(), 0);
    int active = 0;
    Ticks overlap_start = 0;
    bool in_overlap = false;
    std::size_t i = 0;
    while (i < ref_events.size()) {
      const Ticks tick = ref_events[i].tick;
      while (i < ref_events.size() && ref_events[i].tick == tick) {
        auto& c = counts[static_cast<std::size_t>(ref_events[i].index)];
        const bool was_active = c > 0;
        c += ref_events[i].delta;
        if (was_active != (c > 0)) active += (c > 0) ? 1 : -1;
        ++i;
      }
      if (!in_overlap && active >= 2) {
        in_overlap = true;
        overlap_start = tick;
      } else if (in_overlap && active < 2) {
        in_overlap = false;
        events.push_back({overlap_start, 2, 0, +1});
        events.push_back({tick, 2, 0, -1});
      }
    }
  }

  std::sort(events.begin(), events.end(),
            [](const BoundaryEvent& a, const BoundaryEvent& b) { return a.tick < b.tick; });

  std::vector<ElementaryInterval> intervals;
  std::vector<int> ref_counts(ref_speakers.size(), 0);
  std::vector<int> hyp_counts(hyp_speakers.size(), 0);
  int excluded = 0;
  uint64_t ref_mask = 0;
  uint64_t hyp_mask = 0;
  std::size_t i = 0;
  Ticks prev = events.empty() ? 0 : events.front().tick;
  while (i < events.size()) {
    const Ticks tick = events[i].tick;
    if (tick > prev && excluded == 0 && (ref_mask != 0 || hyp_mask != 0)) {
      intervals.push_back({tick - prev, ref_mask, hyp_mask});
    }
    while (i < events.size() && events[i].tick == tick) {
      const auto& e = events[i];
      if (e.kind == 2) {
        excluded += e.delta;
      } else {
        auto& counts = e.kind == 0 ? ref_counts : hyp_counts;
        auto& mask = e.kind == 0 ? ref_mask : hyp_mask;
        auto& c = counts[static_cast<std::size_t>(e.index)];
        const bool was_active = c > 0;
        c += e.delta;
        if (was_active != (c > 0)) mask ^= (uint64_t{1} << e.index);
      }
      ++i;
    }
    prev = tick;
  }
  return intervals;
}

inline std::vector<std::vector<double>> cooccurrence(
    const std::vector<ElementaryInterval>& intervals, std::size_t num_ref,
    std::size_t num_hyp) {
  std::vector<std::vector<double>> co(num_ref, std::vector<double>(num_hyp, 0.0));
  for (const auto& iv : intervals) {
    if (iv.ref_mask == 0 || iv.hyp_mask == 0) continue;
    for (std::size_t r = 0; r < num_ref; ++r) {
      if (!(iv.ref_mask >> r & 1)) continue;
      for (std::size_t h = 0; h < num_hyp; ++h) {
        if (iv.hyp_mask >> h & 1) co[r][h] += static_cast<double>(iv.length);
      }
    }
  }
  return co;
}

/// Injective hyp -> ref assignment maximizing total co-occurrence; pairs
/// with zero co-occurrence stay unmapped.
inline std::vector<int> best_mapping(const std::vector<std::vector<double>>& co) {
  if (co.empty() || co.front().empty()) {
    return std::vector<int>(co.empty() ? 0 : co.front().size(), -1);
  }
  const std::size_t num_ref = co.size();
  const std::size_t num_hyp = co.front().size();
  std::vector<std::vector<double>> cost(num_hyp, std::vector<double>(num_ref));
  for (std::size_t h = 0; h < num_hyp; ++h) {
    for (std::size_t r = 0; r < num_ref; ++r) cost[h][r] = -co[r][h];
  }
  const auto solved = assignment::solve(cost);
  std::vector<int> hyp_to_ref(num_hyp, -1);
  for (std::size_t h = 0; h < num_hyp; ++h) {
    const int r = solved.row_to_col[h];
    if (r >= 0 && co[static_cast<std::size_t>(r)][h] > 0.0) hyp_to_ref[h] = r;
  }
  return hyp_to_ref;
}

}  // namespace detail

/// Injective hyp -> ref speaker map maximizing total co-occurrence duration
/// over the full timelines (no collar, overlap included).
inline std::map<std::string, std::string> optimal_mapping(const segio::Timeline& ref,
                                                          const segio::Timeline& hyp) {
  const auto ref_speakers = detail::indexed_speakers(ref);
  const auto hyp_speakers = detail::indexed_speakers(hyp);
  const auto intervals = detail::sweep(ref, hyp, ref_speakers, hyp_speakers, 0.0, true);
  const auto co = detail::cooccurrence(intervals, ref_speakers.size(), hyp_speakers.size());
  const auto hyp_to_ref = detail::best_mapping(co);
  std::map<std::string, std::string> mapping;
  for (std::size_t h = 0; h < hyp_speakers.size(); ++h) {
    if (hyp_to_ref[h] >= 0) {
      mapping[hyp_speakers[h]] = ref_speakers[static_cast<std::size_t>(hyp_to_ref[h])];
    }
  }
  return mapping;
}

/// DER over the evaluation region that excludes +-collar/2 around every
/// reference boundary (and reference overlap regions when score_overlap is
/// off). The speaker mapping maximizes co-occurrence over that same region,
/// which is exactly the error-minimizing bijection.
inline DerBreakdown compute_der(const segio::Timeline& ref, const segio::Timeline& hyp,
                                double collar = 0.25, bool score_overlap = true) {
  if (collar < 0.0) throw ValidationError("der: collar must be >= 0");
  DerBreakdown result;
  result.collar = collar;
  result.score_overlap = score_overlap;

  const auto ref_speakers = detail::indexed_speakers(ref);
  const auto hyp_speakers = detail::indexed_speakers(hyp);
  const auto intervals =
      detail::sweep(ref, hyp, ref_speakers, hyp_speakers, collar, score_overlap);
  const auto co = detail::cooccurrence(intervals, ref_speakers.size(), hyp_speakers.size());
  const auto hyp_to_ref = detail::best_mapping(co);

  detail::Ticks miss = 0, fa = 0, conf = 0, total_ref = 0;
  for (const auto& iv : intervals) {
    const int num_ref = std::popcount(iv.ref_mask);
    const int num_hyp = std::popcount(iv.hyp_mask);
    int num_correct = 0;
    for (std::size_t h = 0; h < hyp_speakers.size(); ++h) {
      if (!(iv.hyp_mask >> h & 1) || hyp_to_ref[h] < 0) continue;
      if (iv.ref_mask >> hyp_to_ref[h] & 1) ++num_correct;
    }
    total_ref += iv.length * num_ref;
    miss += iv.length * std::max(0, num_ref - num_hyp);
    fa += iv.length * std::max(0, num_hyp - num_ref);
    conf += iv.length * (std::min(num_ref, num_hyp) - num_correct);
  }

  result.miss = detail::to_seconds(miss);
  result.false_alarm = detail::to_seconds(fa);
  result.confusion = detail::to_seconds(conf);
  result.total_ref = detail::to_seconds(total_ref);
  for (std::size_t h = 0; h < hyp_speakers.size(); ++h) {
    if (hyp_to_ref[h] >= 0) {
      result.mapping[hyp_speakers[h]] = ref_speakers[static_cast<std::size_t>(hyp_to_ref[h])];
    }
  }
  if (total_ref > 0) {
    result.der = result.error_seconds() / result.total_ref;
  } else {
    result.der = result.error_seconds() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return result;
}

}  // namespace dialkit::der
