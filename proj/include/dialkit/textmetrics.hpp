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
// ROUGE-1 (clipped unigram overlap) and ROUGE-L (longest common
// subsequence) over normalized tokens.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dialkit/textprep.hpp"

namespace dialkit::textmetrics {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Normalizes (canonical composition + punctuation stripping per profile),
/// lowercases ASCII letters, splits on whitespace. Devanagari has no case,
/// so lowercasing only touches the Latin range.
inline std::vector<std::string> tokenize(
    std::string_view text,
    const textprep::NormalizationProfile& profile = textprep::NormalizationProfile::defaults()) {
  std::string normalized = textprep::apply(text, profile);
  for (char& c : normalized) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < normalized.size()) {
    while (i < normalized.size() && normalized[i] == ' ') ++i;
    std::size_t j = i;
    while (j < normalized.size() && normalized[j] != ' ') ++j;
    if (j > i) tokens.push_back(normalized.substr(i, j - i));
    i = j;
  }
  return tokens;
}

namespace detail {

inline RougeScore from_overlap(double overlap, std::size_t ref_tokens, std::size_t hyp_tokens) {
  RougeScore score;
  if (ref_tokens == 0 && hyp_tokens == 0) {
    score.precision = score.recall = score.f1 = 1.0;
    return score;
  }
  if (ref_tokens == 0 || hyp_tokens == 0) return score;
  score.precision = overlap / static_cast<double>(hyp_tokens);
  score.recall = overlap / static_cast<double>(ref_tokens);
  if (score.precision + score.recall > 0.0) {
    score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

}  // namespace detail

/// LCS length over token sequences, O(nm) time, O(min(n,m)) memory.
inline int64_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto& longer = a.size() >= b.size() ? a : b;
  const auto& shorter = a.size() >= b.size() ? b : a;
  std::vector<int64_t> row(shorter.size() + 1, 0);
  for (std::size_t i = 1; i <= longer.size(); ++i) {
    int64_t diag = 0;
    for (std::size_t j = 1; j <= shorter.size(); ++j) {
      const int64_t saved = row[j];
      if (longer[i - 1] == shorter[j - 1]) {
        row[j] = diag + 1;
      } else {
        row[j] = std::max(row[j], row[j - 1]);
      }
      diag = saved;
    }
  }
  return row[shorter.size()];
}

/// Clipped unigram overlap. Both sides empty scores 1 by convention, one
/// side empty scores 0.
inline RougeScore rouge1(
    std::string_view ref, std::string_view hyp,
    const textprep::NormalizationProfile& profile = textprep::NormalizationProfile::defaults()) {
  const auto ref_tokens = tokenize(ref, profile);
  const auto hyp_tokens = tokenize(hyp, profile);
  std::map<std::string, int64_t> ref_counts;
  for (const auto& t : ref_tokens) ++ref_counts[t];
  int64_t overlap = 0;
  for (const auto& t : hyp_tokens) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return detail::from_overlap(static_cast<double>(overlap), ref_tokens.size(),
                              hyp_tokens.size());
}

/// LCS-based score with the same empty-input conventions as rouge1.
inline RougeScore rougeL(
    std::string_view ref, std::string_view hyp,
    const textprep::NormalizationProfile& profile = textprep::NormalizationProfile::defaults()) {
  const auto ref_tokens = tokenize(ref, profile);
  const auto hyp_tokens = tokenize(hyp, profile);
  const int64_t lcs = lcs_length(ref_tokens, hyp_tokens);
  return detail::from_overlap(static_cast<double>(lcs), ref_tokens.size(), hyp_tokens.size());
}

}  // namespace dialkit::textmetrics
