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
// Contrastive snippet extraction: diff transcripts against ground truth
// after normalization, then window each erroneous segment with surrounding
// context for few-shot prompt assembly.

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialkit/errors.hpp"
#include "dialkit/segio.hpp"
#include "dialkit/textprep.hpp"

namespace dialkit::snippets {

struct SnippetPair {
  std::vector<segio::TranscriptSegment> asr_segments;
  std::vector<segio::TranscriptSegment> gt_segments;
  int lo = 0;  // inclusive segment indices of the window
  int hi = 0;
};

/// Indices whose normalized texts differ between index-aligned transcripts.
inline std::set<int> mark_errors(
    const std::vector<segio::TranscriptSegment>& asr,
    const std::vector<segio::TranscriptSegment>& gt,
    const textprep::NormalizationProfile& profile = textprep::NormalizationProfile::defaults()) {
  if (asr.size() != gt.size()) {
    throw ValidationError("snippets: transcripts have " + std::to_string(asr.size()) +
                          " vs " + std::to_string(gt.size()) + " segments");
  }
  std::set<int> errors;
  for (std::size_t i = 0; i < asr.size(); ++i) {
    if (textprep::apply(asr[i].text, profile) != textprep::apply(gt[i].text, profile)) {
      errors.insert(static_cast<int>(i));
    }
  }
  return errors;
}

/// Windows each error index with +-context segments, clips to bounds, and
/// merges overlapping or touching windows into maximal ones.
inline std::vector<SnippetPair> extract_snippets(
    const std::vector<segio::TranscriptSegment>& asr,
    const std::vector<segio::TranscriptSegment>& gt, int context = 2,
    const textprep::NormalizationProfile& profile = textprep::NormalizationProfile::defaults()) {
  if (context < 0) throw ValidationError("snippets: context must be >= 0");
  const auto errors = mark_errors(asr, gt, profile);
  const int last = static_cast<int>(gt.size()) - 1;

  std::vector<std::pair<int, int>> windows;
  for (int e : errors) {
    const int lo = std::max(0, e - context);
    const int hi = std::min(last, e + context);
    if (!windows.empty() && lo <= windows.back().second + 1) {
      windows.back().second = std::max(windows.back().second, hi);
    } else {
      windows.emplace_back(lo, hi);
    }
  }

  std::vector<SnippetPair> out;
  out.reserve(windows.size());
  for (const auto& [lo, hi] : windows) {
    SnippetPair pair;
    pair.lo = lo;
    pair.hi = hi;
    pair.asr_segments.assign(asr.begin() + lo, asr.begin() + hi + 1);
    pair.gt_segments.assign(gt.begin() + lo, gt.begin() + hi + 1);
    out.push_back(std::move(pair));
  }
  return out;
}

/// Fallback for transcripts that are not index-aligned: a minimum-edit
/// alignment over normalized segment texts pads each side with empty
/// placeholder segments so both cover one shared index range, after which
/// the index-aligned path applies. Placeholders always count as errors.
inline std::pair<std::vector<segio::TranscriptSegment>, std::vector<segio::TranscriptSegment>>
align_by_text(const std::vector<segio::TranscriptSegment>& asr,
              const std::vector<segio::TranscriptSegment>& gt,
              const textprep::NormalizationProfile& profile =
                  textprep::NormalizationProfile::defaults()) {
  std::vector<std::string> asr_norm, gt_norm;
  asr_norm.reserve(asr.size());
  gt_norm.reserve(gt.size());
  for (const auto& s : asr) asr_norm.push_back(textprep::apply(s.text, profile));
  for (const auto& s : gt) gt_norm.push_back(textprep::apply(s.text, profile));

  const std::size_t n = gt.size();
  const std::size_t m = asr.size();
  std::vector<int> dp((n + 1) * (m + 1), 0);
  auto cell = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = 0; i <= n; ++i) dp[cell(i, 0)] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) dp[cell(0, j)] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = gt_norm[i - 1] == asr_norm[j - 1] ? 0 : 1;
      dp[cell(i, j)] = std::min({dp[cell(i - 1, j - 1)] + sub, dp[cell(i - 1, j)] + 1,
                                 dp[cell(i, j - 1)] + 1});
    }
  }

  std::vector<segio::TranscriptSegment> gt_out, asr_out;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int here = dp[cell(i, j)];
    if (i > 0 && j > 0 &&
        dp[cell(i - 1, j - 1)] + (gt_norm[i - 1] == asr_norm[j - 1] ? 0 : 1) == here) {
      gt_out.push_back(gt[i - 1]);
      asr_out.push_back(asr[j - 1]);
      --i;
      --j;
    } else if (i > 0 && dp[cell(i - 1, j)] + 1 == here) {
      segio::TranscriptSegment placeholder;
      placeholder.speaker = gt[i - 1].speaker;
      placeholder.onset = gt[i - 1].onset;
      placeholder.offset = gt[i - 1].onset;
      gt_out.push_back(gt[i - 1]);
      asr_out.push_back(placeholder);
      --i;
    } else {
      segio::TranscriptSegment placeholder;
      placeholder.speaker = asr[j - 1].speaker;
      placeholder.onset = asr[j - 1].onset;
      placeholder.offset = asr[j - 1].onset;
      gt_out.push_back(placeholder);
      asr_out.push_back(asr[j - 1]);
      --j;
    }
  }
  std::reverse(gt_out.begin(), gt_out.end());
  std::reverse(asr_out.begin(), asr_out.end());
  for (std::size_t k = 0; k < gt_out.size(); ++k) {
    gt_out[k].index = static_cast<int>(k);
    asr_out[k].index = static_cast<int>(k);
  }
  return {std::move(asr_out), std::move(gt_out)};
}

inline std::string emit_snippets(const std::vector<SnippetPair>& pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    nlohmann::json asr_list = nlohmann::json::array();
    nlohmann::json gt_list = nlohmann::json::array();
    for (const auto& s : pair.asr_segments) {
      asr_list.push_back({{"index", s.index}, {"speaker", s.speaker}, {"text", s.text}});
    }
    for (const auto& s : pair.gt_segments) {
      gt_list.push_back({{"index", s.index}, {"speaker", s.speaker}, {"text", s.text}});
    }
    nlohmann::json record{{"window", {pair.lo, pair.hi}}, {"asr", asr_list}, {"gt", gt_list}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace dialkit::snippets
