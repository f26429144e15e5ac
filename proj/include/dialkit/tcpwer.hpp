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
// Time-constrained minimum-permutation word error rate for
// speaker-attributed ASR. A reference/hypothesis word pair may align only
// when their intervals, each extended by +-collar, intersect; hypothesis
// streams are assigned to reference streams by a minimum-cost assignment
// that may also leave streams unassigned (all deletions / all insertions).

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dialkit/assignment.hpp"
#include "dialkit/errors.hpp"
#include "dialkit/segio.hpp"

namespace dialkit::tcpwer {

struct AlignCounts {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t matches = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }
};

struct TcpWerReport {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t ref_words = 0;
  double tcpwer = 0.0;
  std::map<std::string, std::string> assignment;  // hyp stream -> ref stream
  double collar = 0.0;

  int64_t errors() const { return substitutions + deletions + insertions; }
};

/// Splits a transcript segment into one word per equal sub-interval, in
/// order. Empty text yields no words; a zero-length segment with text is
/// rejected.
inline std::vector<segio::TimedWord> pseudo_word_timing(const segio::TranscriptSegment& seg) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < seg.text.size()) {
    while (i < seg.text.size() && std::isspace(static_cast<unsigned char>(seg.text[i]))) ++i;
    std::size_t j = i;
    while (j < seg.text.size() && !std::isspace(static_cast<unsigned char>(seg.text[j]))) ++j;
    if (j > i) tokens.push_back(seg.text.substr(i, j - i));
    i = j;
  }
  if (tokens.empty()) return {};
  if (!(seg.offset > seg.onset)) {
    throw ValidationError("pseudo_word_timing: segment has no positive duration");
  }
  std::vector<segio::TimedWord> words;
  words.reserve(tokens.size());
  const double step = (seg.offset - seg.onset) / static_cast<double>(tokens.size());
  for (std::size_t w = 0; w < tokens.size(); ++w) {
    segio::TimedWord word;
    word.word = std::move(tokens[w]);
    word.speaker = seg.speaker;
    word.onset = seg.onset + static_cast<double>(w) * step;
    word.offset = seg.onset + static_cast<double>(w + 1) * step;
    words.push_back(std::move(word));
  }
  return words;
}

/// Builds per-speaker word streams from a transcript via pseudo word timing.
inline std::vector<segio::SpeakerWordStream> streams_from_transcript(
    const std::vector<segio::TranscriptSegment>& segments) {
  std::map<std::string, segio::SpeakerWordStream> by_speaker;
  for (const auto& seg : segments) {
    auto words = pseudo_word_timing(seg);
    auto [it, inserted] = by_speaker.try_emplace(seg.speaker);
    it->second.speaker = seg.speaker;
    it->second.segment_timed = true;
    for (auto& w : words) it->second.words.push_back(std::move(w));
  }
  std::vector<segio::SpeakerWordStream> out;
  for (auto& [speaker, stream] : by_speaker) {
    std::stable_sort(
        stream.words.begin(), stream.words.end(),
        [](const segio::TimedWord& a, const segio::TimedWord& b) { return a.onset < b.onset; });
    out.push_back(std::move(stream));
  }
  return out;
}

namespace detail {

inline bool compatible(const segio::TimedWord& ref, const segio::TimedWord& hyp,
                       double collar) {
  return ref.onset - collar <= hyp.offset + collar &&
         hyp.onset - collar <= ref.offset + collar;
}

inline void require_sorted(const std::vector<segio::TimedWord>& words, const char* side) {
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (words[i].onset < words[i - 1].onset) {
      throw ValidationError(std::string("tc_align: ") + side + " words not sorted by onset");
    }
  }
}

}  // namespace detail

/// Minimum-cost edit alignment under the temporal constraint. Incompatible
/// pairs cannot match or substitute, so they fall back to
/// deletion + insertion. Tie-broken deterministically (diagonal, then
/// deletion, then insertion on the backtrace).
inline AlignCounts tc_align(const std::vector<segio::TimedWord>& ref,
                            const std::vector<segio::TimedWord>& hyp, double collar) {
  detail::require_sorted(ref, "ref");
  detail::require_sorted(hyp, "hyp");
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const int32_t kBig = std::numeric_limits<int32_t>::max() / 4;
  std::vector<int32_t> dp((n + 1) * (m + 1), kBig);
  auto cell = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };

  for (std::size_t j = 0; j <= m; ++j) dp[cell(0, j)] = static_cast<int32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    dp[cell(i, 0)] = static_cast<int32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      int32_t best = dp[cell(i - 1, j)] + 1;                           // deletion
      best = std::min(best, dp[cell(i, j - 1)] + 1);                   // insertion
      if (detail::compatible(ref[i - 1], hyp[j - 1], collar)) {
        const int32_t sub = ref[i - 1].word == hyp[j - 1].word ? 0 : 1;
        best = std::min(best, dp[cell(i - 1, j - 1)] + sub);
      }
      dp[cell(i, j)] = best;
    }
  }

  AlignCounts counts;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int32_t here = dp[cell(i, j)];
    if (i > 0 && j > 0 && detail::compatible(ref[i - 1], hyp[j - 1], collar)) {
      const int32_t sub = ref[i - 1].word == hyp[j - 1].word ? 0 : 1;
      if (dp[cell(i - 1, j - 1)] + sub == here) {
        (sub == 0 ? counts.matches : counts.substitutions) += 1;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && dp[cell(i - 1, j)] + 1 == here) {
      counts.deletions += 1;
      --i;
      continue;
    }
    counts.insertions += 1;
    --j;
  }
  return counts;
}

/// tcpWER across speaker streams: per-pair tc_align costs, then an optimal
/// injective hyp -> ref stream assignment where unassigned reference
/// streams count as all deletions and unassigned hypothesis streams as all
/// insertions.
inline TcpWerReport compute_tcpwer(const std::vector<segio::SpeakerWordStream>& ref_streams,
                                   const std::vector<segio::SpeakerWordStream>& hyp_streams,
                                   double collar = 5.0) {
  if (collar < 0.0) throw ValidationError("tcpwer: collar must be >= 0");
  TcpWerReport report;
  report.collar = collar;

  const std::size_t num_ref = ref_streams.size();
  const std::size_t num_hyp = hyp_streams.size();
  for (const auto& s : ref_streams) report.ref_words += static_cast<int64_t>(s.words.size());

  std::vector<std::vector<AlignCounts>> pair_counts(num_ref,
                                                    std::vector<AlignCounts>(num_hyp));
  // Square matrix with rejection: ref i may fall to its dummy column
  // (num_hyp + i) at all-deletion cost, hyp j to its dummy row at
  // all-insertion cost; dummy-dummy pairs are free.
  const std::size_t dim = num_ref + num_hyp;
  double big = 1.0;
  for (const auto& s : ref_streams) big += static_cast<double>(s.words.size());
  for (const auto& s : hyp_streams) big += static_cast<double>(s.words.size());
  std::vector<std::vector<double>> cost(dim, std::vector<double>(dim, big));
  for (std::size_t i = 0; i < num_ref; ++i) {
    for (std::size_t j = 0; j < num_hyp; ++j) {
      pair_counts[i][j] = tc_align(ref_streams[i].words, hyp_streams[j].words, collar);
      cost[i][j] = static_cast<double>(pair_counts[i][j].errors());
    }
    cost[i][num_hyp + i] = static_cast<double>(ref_streams[i].words.size());
  }
  for (std::size_t j = 0; j < num_hyp; ++j) {
    cost[num_ref + j][j] = static_cast<double>(hyp_streams[j].words.size());
  }
  for (std::size_t j = 0; j < num_hyp; ++j) {
    for (std::size_t i = 0; i < num_ref; ++i) cost[num_ref + j][num_hyp + i] = 0.0;
  }

  if (dim > 0) {
    const auto solved = assignment::solve(cost);
    std::vector<char> hyp_assigned(num_hyp, 0);
    for (std::size_t i = 0; i < num_ref; ++i) {
      const int j = solved.row_to_col[i];
      if (j >= 0 && static_cast<std::size_t>(j) < num_hyp) {
        const auto& c = pair_counts[i][static_cast<std::size_t>(j)];
        report.substitutions += c.substitutions;
        report.deletions += c.deletions;
        report.insertions += c.insertions;
        report.assignment[hyp_streams[static_cast<std::size_t>(j)].speaker] =
            ref_streams[i].speaker;
        hyp_assigned[static_cast<std::size_t>(j)] = 1;
      } else {
        report.deletions += static_cast<int64_t>(ref_streams[i].words.size());
      }
    }
    for (std::size_t j = 0; j < num_hyp; ++j) {
      if (!hyp_assigned[j]) {
        report.insertions += static_cast<int64_t>(hyp_streams[j].words.size());
      }
    }
  }

  if (report.ref_words > 0) {
    report.tcpwer =
        static_cast<double>(report.errors()) / static_cast<double>(report.ref_words);
  } else {
    report.tcpwer =
        report.errors() > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return report;
}

}  // namespace dialkit::tcpwer
