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

#include "dialkit/rng.hpp"
#include "dialkit/snippets.hpp"

using namespace dialkit;

namespace {

std::vector<segio::TranscriptSegment> make_transcript(std::size_t n) {
  std::vector<segio::TranscriptSegment> segments;
  for (std::size_t i = 0; i < n; ++i) {
    segio::TranscriptSegment seg;
    seg.index = static_cast<int>(i);
    seg.speaker = i % 2 == 0 ? "doctor" : "patient";
    seg.text = "segment " + std::to_string(i);
    seg.onset = static_cast<double>(i);
    seg.offset = static_cast<double>(i + 1);
    segments.push_back(std::move(seg));
  }
  return segments;
}

}  // namespace

TEST_CASE("identical transcripts have no errors", "[snippets]") {
  const auto gt = make_transcript(10);
  CHECK(snippets::mark_errors(gt, gt).empty());
  CHECK(snippets::extract_snippets(gt, gt).empty());
}

TEST_CASE("danda-only differences vanish under normalization", "[snippets]") {
  auto gt = make_transcript(4);
  auto asr = gt;
  asr[2].text += "।";
  CHECK(snippets::mark_errors(asr, gt).empty());
}

TEST_CASE("a single substituted segment is marked", "[snippets]") {
  auto gt = make_transcript(10);
  auto asr = gt;
  asr[5].text = "oops";
  const auto errors = snippets::mark_errors(asr, gt);
  REQUIRE(errors.size() == 1);
  CHECK(errors.count(5) == 1);
}

TEST_CASE("a lone error gets a plus-minus-two window", "[snippets]") {
  auto gt = make_transcript(10);
  auto asr = gt;
  asr[5].text = "oops";
  const auto pairs = snippets::extract_snippets(asr, gt, 2);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].lo == 3);
  CHECK(pairs[0].hi == 7);
  REQUIRE(pairs[0].asr_segments.size() == 5);
  CHECK(pairs[0].asr_segments[2].text == "oops");
  CHECK(pairs[0].gt_segments[2].text == "segment 5");
}

TEST_CASE("overlapping windows merge into one", "[snippets]") {
  auto gt = make_transcript(10);
  auto asr = gt;
  asr[2].text = "oops";
  asr[4].text = "oops";
  const auto pairs = snippets::extract_snippets(asr, gt, 2);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].lo == 0);
  CHECK(pairs[0].hi == 6);
}

TEST_CASE("touching windows merge too", "[snippets]") {
  auto gt = make_transcript(20);
  auto asr = gt;
  asr[2].text = "oops";
  asr[7].text = "oops";  // windows [0,4] and [5,9] touch
  const auto pairs = snippets::extract_snippets(asr, gt, 2);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].lo == 0);
  CHECK(pairs[0].hi == 9);
}

TEST_CASE("length mismatch is an error", "[snippets]") {
  CHECK_THROWS_AS(snippets::mark_errors(make_transcript(3), make_transcript(4)),
                  ValidationError);
}

TEST_CASE("windows cover every error exactly once and stay disjoint", "[snippets]") {
  rng::Prng prng(83);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + prng.next_index(30);
    auto gt = make_transcript(n);
    auto asr = gt;
    std::set<int> injected;
    for (std::size_t i = 0; i < n; ++i) {
      if (prng.next_bernoulli(0.2)) {
        asr[i].text = "error";
        injected.insert(static_cast<int>(i));
      }
    }
    const int context = static_cast<int>(prng.next_index(4));
    const auto pairs = snippets::extract_snippets(asr, gt, context);
    for (int e : injected) {
      int covering = 0;
      for (const auto& p : pairs) {
        if (p.lo <= e && e <= p.hi) ++covering;
      }
      CHECK(covering == 1);
    }
    for (std::size_t i = 1; i < pairs.size(); ++i) {
      CHECK(pairs[i - 1].hi < pairs[i].lo);
    }
    std::size_t total = 0;
    for (const auto& p : pairs) total += static_cast<std::size_t>(p.hi - p.lo + 1);
    CHECK(total <= injected.size() * static_cast<std::size_t>(2 * context + 1));
  }
}

TEST_CASE("edit alignment pads unaligned transcripts", "[snippets]") {
  auto gt = make_transcript(6);
  auto asr = gt;
  asr.erase(asr.begin() + 3);  // ASR dropped one segment entirely
  for (std::size_t i = 0; i < asr.size(); ++i) asr[i].index = static_cast<int>(i);

  const auto [asr_aligned, gt_aligned] = snippets::align_by_text(asr, gt);
  REQUIRE(asr_aligned.size() == gt_aligned.size());
  REQUIRE(asr_aligned.size() == 6);
  const auto errors = snippets::mark_errors(asr_aligned, gt_aligned);
  REQUIRE(errors.size() == 1);
  CHECK(errors.count(3) == 1);
  const auto pairs = snippets::extract_snippets(asr_aligned, gt_aligned, 1);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].lo == 2);
  CHECK(pairs[0].hi == 4);
}
