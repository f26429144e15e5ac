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
// Canonical Unicode normalization (composition form) and punctuation
// normalization for Devanagari/Latin mixed text. Precomposed nukta letters
// such as U+0958 sit on the composition-exclusion list, so both spellings
// of a grapheme converge to the base + U+093C sequence.

#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dialkit/errors.hpp"
#include "dialkit/unicode_data.hpp"
#include "dialkit/utf8.hpp"

namespace dialkit::textprep {

namespace detail {

// Hangul syllable constants from the Unicode standard, chapter 3.12.
inline constexpr uint32_t kHangulSBase = 0xAC00;
inline constexpr uint32_t kHangulLBase = 0x1100;
inline constexpr uint32_t kHangulVBase = 0x1161;
inline constexpr uint32_t kHangulTBase = 0x11A7;
inline constexpr uint32_t kHangulLCount = 19;
inline constexpr uint32_t kHangulVCount = 21;
inline constexpr uint32_t kHangulTCount = 28;
inline constexpr uint32_t kHangulNCount = kHangulVCount * kHangulTCount;
inline constexpr uint32_t kHangulSCount = kHangulLCount * kHangulNCount;

inline uint8_t combining_class(uint32_t cp) {
  const auto* begin = std::begin(unicode_data::kCombiningClasses);
  const auto* end = std::end(unicode_data::kCombiningClasses);
  const auto* it = std::lower_bound(begin, end, cp,
                                    [](const unicode_data::CombiningClass& e,
                                       uint32_t v) { return e.cp < v; });
  return (it != end && it->cp == cp) ? it->ccc : 0;
}

inline const unicode_data::Decomposition* find_decomposition(uint32_t cp) {
  const auto* begin = std::begin(unicode_data::kDecompositions);
  const auto* end = std::end(unicode_data::kDecompositions);
  const auto* it = std::lower_bound(begin, end, cp,
                                    [](const unicode_data::Decomposition& e,
                                       uint32_t v) { return e.cp < v; });
  return (it != end && it->cp == cp) ? it : nullptr;
}

inline uint32_t compose_pair(uint32_t a, uint32_t b) {
  // Hangul LV and LVT composition.
  if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount && b >= kHangulVBase &&
      b < kHangulVBase + kHangulVCount) {
    return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
  }
  if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
      (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
      b < kHangulTBase + kHangulTCount) {
    return a + (b - kHangulTBase);
  }
  const auto* begin = std::begin(unicode_data::kCompositions);
  const auto* end = std::end(unicode_data::kCompositions);
  const auto* it = std::lower_bound(begin, end, std::pair{a, b},
                                    [](const unicode_data::Composition& e,
                                       const std::pair<uint32_t, uint32_t>& v) {
                                      return e.first != v.first ? e.first < v.first
                                                                : e.second < v.second;
                                    });
  return (it != end && it->first == a && it->second == b) ? it->composite : 0;
}

inline void decompose_into(uint32_t cp, std::vector<uint32_t>& out) {
  if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
    const uint32_t index = cp - kHangulSBase;
    out.push_back(kHangulLBase + index / kHangulNCount);
    out.push_back(kHangulVBase + (index % kHangulNCount) / kHangulTCount);
    if (index % kHangulTCount != 0) out.push_back(kHangulTBase + index % kHangulTCount);
    return;
  }
  if (const auto* d = find_decomposition(cp)) {
    decompose_into(d->first, out);
    if (d->second != 0) decompose_into(d->second, out);
    return;
  }
  out.push_back(cp);
}

// Canonical ordering: stable sort of each nonzero-ccc run by combining class.
inline void canonical_order(std::vector<uint32_t>& cps) {
  std::size_t i = 0;
  while (i < cps.size()) {
    if (combining_class(cps[i]) == 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && combining_class(cps[j]) != 0) ++j;
    std::stable_sort(cps.begin() + i, cps.begin() + j,
                     [](uint32_t a, uint32_t b) { return combining_class(a) < combining_class(b); });
    i = j;
  }
}

// Canonical composition pass over a decomposed, canonically ordered sequence.
inline void compose_in_place(std::vector<uint32_t>& cps) {
  std::vector<uint32_t> out;
  out.reserve(cps.size());
  std::ptrdiff_t last_starter = -1;
  for (uint32_t cp : cps) {
    const uint8_t ccc = combining_class(cp);
    if (last_starter >= 0) {
      const bool adjacent = static_cast<std::size_t>(last_starter) + 1 == out.size();
      const bool unblocked = adjacent || combining_class(out.back()) < ccc;
      if (unblocked) {
        if (const uint32_t composite = compose_pair(out[last_starter], cp)) {
          out[last_starter] = composite;
          continue;
        }
      }
    }
    if (ccc == 0) last_starter = static_cast<std::ptrdiff_t>(out.size());
    out.push_back(cp);
  }
  cps = std::move(out);
}

}  // namespace detail

/// Canonical decomposition with canonical ordering (NFD) over code points.
inline std::vector<uint32_t> canonical_decompose(const std::vector<uint32_t>& cps) {
  std::vector<uint32_t> out;
  out.reserve(cps.size());
  for (uint32_t cp : cps) detail::decompose_into(cp, out);
  detail::canonical_order(out);
  return out;
}

/// Canonical composition form (NFC). Invalid UTF-8 raises ValidationError.
inline std::string normalize_unicode(std::string_view text) {
  auto cps = canonical_decompose(utf8::decode(utf8::strip_bom(text)));
  detail::compose_in_place(cps);
  return utf8::encode(cps);
}

inline constexpr uint32_t kDanda = 0x0964;
inline constexpr uint32_t kDoubleDanda = 0x0965;

enum class DandaPolicy { kStrip, kMapToPeriod };

struct NormalizationProfile {
  bool unicode_form = true;  // apply canonical composition
  std::unordered_set<uint32_t> punctuation_set;
  bool whitespace_collapse = true;
  DandaPolicy danda_policy = DandaPolicy::kStrip;

  /// Canonical composition, ASCII punctuation stripped, danda stripped,
  /// whitespace collapsed.
  static NormalizationProfile defaults() {
    NormalizationProfile p;
    for (uint32_t cp = 0x21; cp <= 0x7E; ++cp) {
      const bool alnum = (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') ||
                         (cp >= 'a' && cp <= 'z');
      if (!alnum) p.punctuation_set.insert(cp);
    }
    return p;
  }
};

/// Strips profile punctuation (danda per policy), collapses whitespace runs
/// to single spaces, trims the ends. Stripped marks become spaces so
/// adjoining words never fuse.
inline std::string normalize_punct(std::string_view text, const NormalizationProfile& profile) {
  const auto cps = utf8::decode(utf8::strip_bom(text));
  std::vector<uint32_t> kept;
  kept.reserve(cps.size());
  for (uint32_t cp : cps) {
    if (cp == kDanda || cp == kDoubleDanda) {
      kept.push_back(profile.danda_policy == DandaPolicy::kMapToPeriod ? uint32_t('.')
                                                                       : uint32_t(' '));
    } else if (profile.punctuation_set.count(cp) > 0) {
      kept.push_back(' ');
    } else {
      kept.push_back(cp);
    }
  }
  if (!profile.whitespace_collapse) return utf8::encode(kept);

  std::vector<uint32_t> out;
  out.reserve(kept.size());
  bool pending_space = false;
  for (uint32_t cp : kept) {
    const bool ws = cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
                    cp == '\v';
    if (ws) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(cp);
  }
  return utf8::encode(out);
}

/// Full profile application: canonical composition (when enabled) followed
/// by punctuation normalization. Idempotent.
inline std::string apply(std::string_view text, const NormalizationProfile& profile) {
  if (profile.unicode_form) {
    return normalize_punct(normalize_unicode(text), profile);
  }
  return normalize_punct(text, profile);
}

}  // namespace dialkit::textprep
