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

#include "dialkit/profiles.hpp"
#include "dialkit/rng.hpp"
#include "dialkit/textprep.hpp"
#include "dialkit/utf8.hpp"

using namespace dialkit;

namespace {
#include "unicode_cases.inc"

std::string random_devanagari(rng::Prng& prng, std::size_t length) {
  static const uint32_t pool[] = {0x0915, 0x0916, 0x0928, 0x092B, 0x092F, 0x093C, 0x093E,
                                  0x0941, 0x094D, 0x0958, 0x095B, 0x095F, 0x0901, 0x0902,
                                  0x0964, 0x0951, 0x0952, 'a',    'Z',    ' ',    '.'};
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    utf8::append(out, pool[prng.next_index(std::size(pool))]);
  }
  return out;
}

/// Devanagari letters (independent vowels, consonants, precomposed nukta
/// forms); marks and signs excluded. Closed under canonical composition.
std::size_t devanagari_letter_count(const std::string& text) {
  std::size_t count = 0;
  for (uint32_t cp : utf8::decode(text)) {
    if ((cp >= 0x0904 && cp <= 0x0939) || (cp >= 0x0958 && cp <= 0x0961) ||
        (cp >= 0x0972 && cp <= 0x097F)) {
      ++count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("precomposed nukta letters decompose under canonical composition", "[textprep]") {
  // U+0958 sits on the composition-exclusion list: base + nukta.
  CHECK(textprep::normalize_unicode("क़") == "क़");
  CHECK(textprep::normalize_unicode("क़") == "क़");
  // U+0929 is not excluded, so base + nukta composes.
  CHECK(textprep::normalize_unicode("ऩ") == "ऩ");
}

TEST_CASE("ascii text is unchanged", "[textprep]") {
  CHECK(textprep::normalize_unicode("hello world 123") == "hello world 123");
}

TEST_CASE("canonical composition matches frozen reference data", "[textprep]") {
  for (const auto& test_case : kNfcCases) {
    CHECK(textprep::normalize_unicode(test_case.input) == test_case.nfc);
  }
}

TEST_CASE("normalization is idempotent on fuzzed Devanagari", "[textprep]") {
  rng::Prng prng(99);
  const auto profile = textprep::NormalizationProfile::defaults();
  for (int i = 0; i < 500; ++i) {
    const auto text = random_devanagari(prng, 1 + prng.next_index(24));
    const auto once = textprep::normalize_unicode(text);
    CHECK(textprep::normalize_unicode(once) == once);
    const auto applied = textprep::apply(text, profile);
    CHECK(textprep::apply(applied, profile) == applied);
  }
}

TEST_CASE("normalization preserves Devanagari letter counts", "[textprep]") {
  rng::Prng prng(123);
  for (int i = 0; i < 500; ++i) {
    const auto text = random_devanagari(prng, 1 + prng.next_index(24));
    CHECK(devanagari_letter_count(textprep::normalize_unicode(text)) ==
          devanagari_letter_count(text));
  }
}

TEST_CASE("invalid utf-8 is rejected", "[textprep]") {
  CHECK_THROWS_AS(textprep::normalize_unicode("\xC0\xAF"), ValidationError);
  CHECK_THROWS_AS(textprep::normalize_unicode("\xE0\x80"), ValidationError);
  CHECK_THROWS_AS(textprep::normalize_unicode("\xFF"), ValidationError);
}

TEST_CASE("punctuation normalization strips danda and collapses whitespace", "[textprep]") {
  const auto profile = textprep::NormalizationProfile::defaults();
  CHECK(textprep::normalize_punct("ठीक है।", profile) ==
        "ठीक है");
  CHECK(textprep::normalize_punct("a ,  b !!", profile) == "a b");
  CHECK(textprep::normalize_punct("a b", profile) == "a b");
  // Punctuation becomes a separator, never glue.
  CHECK(textprep::normalize_punct("one।two", profile) == "one two");
}

TEST_CASE("danda can map to a period instead", "[textprep]") {
  auto profile = textprep::NormalizationProfile::defaults();
  profile.danda_policy = textprep::DandaPolicy::kMapToPeriod;
  CHECK(textprep::normalize_punct("है।", profile) == "है.");
}

TEST_CASE("profile files parse with defaults for missing keys", "[textprep]") {
  const auto profile = textprep::parse_profile(
      R"({"unicode": false, "punctuation": "!?", "danda_policy": "period"})");
  CHECK_FALSE(profile.unicode_form);
  CHECK(profile.punctuation_set.size() == 2);
  CHECK(profile.punctuation_set.count('!') == 1);
  CHECK(profile.danda_policy == textprep::DandaPolicy::kMapToPeriod);
  CHECK(profile.whitespace_collapse);
  CHECK_THROWS_AS(textprep::parse_profile(R"({"danda_policy": "bogus"})"), ValidationError);
  CHECK_THROWS_AS(textprep::parse_profile("[]"), ParseError);
}
