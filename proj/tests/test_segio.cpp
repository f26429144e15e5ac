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
#include "dialkit/segio.hpp"

using namespace dialkit;

TEST_CASE("rttm single line parses field by field", "[segio]") {
  const auto t = segio::parse_rttm("SPEAKER f1 1 0.00 2.50 <NA> <NA> doctor <NA> <NA>");
  REQUIRE(t.size() == 1);
  CHECK(t.file_id() == "f1");
  CHECK(t.segments()[0].onset == 0.0);
  CHECK(t.segments()[0].duration == 2.5);
  CHECK(t.segments()[0].speaker == "doctor");
}

TEST_CASE("rttm lines out of time order come back sorted", "[segio]") {
  const auto t = segio::parse_rttm(
      "SPEAKER f1 1 5.00 1.00 <NA> <NA> b <NA> <NA>\n"
      "SPEAKER f1 1 1.00 2.00 <NA> <NA> a <NA> <NA>\n");
  REQUIRE(t.size() == 2);
  CHECK(t.segments()[0].speaker == "a");
  CHECK(t.segments()[1].speaker == "b");
}

TEST_CASE("rttm negative or zero duration is a validation error", "[segio]") {
  CHECK_THROWS_AS(segio::parse_rttm("SPEAKER f1 1 0.00 -1.0 <NA> <NA> a <NA> <NA>"),
                  ValidationError);
  CHECK_THROWS_AS(segio::parse_rttm("SPEAKER f1 1 0.00 0.0 <NA> <NA> a <NA> <NA>"),
                  ValidationError);
}

TEST_CASE("rttm malformed line reports its line number", "[segio]") {
  try {
    segio::parse_rttm(
        "SPEAKER f1 1 0.00 1.00 <NA> <NA> a <NA> <NA>\n"
        "BOGUS f1 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("rttm parses decimal points only, never commas", "[segio]") {
  CHECK_THROWS_AS(segio::parse_rttm("SPEAKER f1 1 0,00 1,50 <NA> <NA> a <NA> <NA>"),
                  ParseError);
}

TEST_CASE("rttm emit uses fixed 3-decimal precision", "[segio]") {
  segio::Timeline t("f1");
  t.add({0.0, 2.5, "doctor"});
  CHECK(segio::emit_rttm(t) == "SPEAKER f1 1 0.000 2.500 <NA> <NA> doctor <NA> <NA>\n");
  CHECK(segio::emit_rttm(segio::Timeline("f1")).empty());
}

TEST_CASE("rttm roundtrip is the identity on random millisecond timelines", "[segio]") {
  rng::Prng prng(7);
  for (int i = 0; i < 100; ++i) {
    segio::Timeline t("file" + std::to_string(i));
    const int n = 1 + static_cast<int>(prng.next_index(20));
    for (int s = 0; s < n; ++s) {
      segio::Segment seg;
      seg.onset = static_cast<double>(prng.next_index(100000)) / 1000.0;
      seg.duration = static_cast<double>(1 + prng.next_index(20000)) / 1000.0;
      seg.speaker = "spk" + std::to_string(prng.next_index(4));
      t.add(std::move(seg));
    }
    const auto back = segio::parse_rttm(segio::emit_rttm(t));
    REQUIRE(back == t);
  }
}

TEST_CASE("multi-file rttm splits per recording", "[segio]") {
  const auto files = segio::parse_rttm_files(
      "SPEAKER b 1 0.00 1.00 <NA> <NA> x <NA> <NA>\n"
      "SPEAKER a 1 0.00 1.00 <NA> <NA> y <NA> <NA>\n");
  REQUIRE(files.size() == 2);
  CHECK(files[0].file_id() == "a");
  CHECK(files[1].file_id() == "b");
  CHECK_THROWS_AS(segio::parse_rttm("SPEAKER a 1 0.0 1.0 <NA> <NA> x <NA> <NA>\n"
                                    "SPEAKER b 1 0.0 1.0 <NA> <NA> x <NA> <NA>\n"),
                  ValidationError);
}

TEST_CASE("timeline total duration sums segments regardless of overlap", "[segio]") {
  segio::Timeline t("f");
  t.add({0.0, 5.0, "a"});
  t.add({2.0, 5.0, "b"});  // overlaps a
  t.add({3.0, 1.0, "a"});  // nested overlap
  CHECK(t.total_duration() == Catch::Approx(11.0));
}

TEST_CASE("word records group per speaker and sort by onset", "[segio]") {
  const auto streams = segio::parse_word_stream(
      R"({"word":"w1","speaker":"doctor","onset":4.0,"offset":4.5})" "\n"
      R"({"word":"w2","speaker":"patient","onset":1.0,"offset":1.5})" "\n"
      R"({"word":"w3","speaker":"doctor","onset":0.0,"offset":0.5})" "\n"
      R"({"word":"w4","speaker":"doctor","onset":2.0,"offset":2.5})" "\n"
      R"({"word":"w5","speaker":"patient","onset":3.0,"offset":3.5})" "\n");
  REQUIRE(streams.size() == 2);
  CHECK(streams[0].speaker == "doctor");
  REQUIRE(streams[0].words.size() == 3);
  CHECK(streams[0].words[0].word == "w3");
  CHECK(streams[0].words[1].word == "w4");
  CHECK(streams[0].words[2].word == "w1");
  CHECK(streams[1].speaker == "patient");
  CHECK(streams[1].words.size() == 2);
}

TEST_CASE("word records validate times and speaker", "[segio]") {
  CHECK_THROWS_AS(segio::parse_word_stream(R"({"word":"a","speaker":"s","onset":2.0})"),
                  ValidationError);
  CHECK_THROWS_AS(
      segio::parse_word_stream(R"({"word":"a","speaker":"s","onset":2.0,"offset":1.0})"),
      ValidationError);
  CHECK_THROWS_AS(segio::parse_word_stream(R"({"word":"a","onset":0.0,"offset":1.0})"),
                  ValidationError);
  CHECK_THROWS_AS(
      segio::parse_word_stream(R"({"word":"  ","speaker":"s","onset":0.0,"offset":1.0})"),
      ValidationError);
}

TEST_CASE("transcripts reindex contiguously in document order", "[segio]") {
  std::string text;
  for (int i = 0; i < 10; ++i) {
    text += R"({"speaker":"s","text":"hello","onset":)" + std::to_string(i) +
            R"(,"offset":)" + std::to_string(i + 1) + "}\n";
  }
  const auto segments = segio::parse_transcript(text);
  REQUIRE(segments.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(segments[static_cast<std::size_t>(i)].index == i);
  CHECK(segio::parse_transcript("").empty());
}

TEST_CASE("transcript explicit indices honor the strict flag", "[segio]") {
  const std::string shuffled =
      R"({"index":3,"speaker":"s","text":"c","onset":2.0,"offset":3.0})" "\n"
      R"({"index":1,"speaker":"s","text":"a","onset":0.0,"offset":1.0})" "\n"
      R"({"index":2,"speaker":"s","text":"b","onset":1.0,"offset":2.0})" "\n";
  CHECK_THROWS_AS(segio::parse_transcript(shuffled, /*strict=*/true), ValidationError);
  const auto reordered = segio::parse_transcript(shuffled, /*strict=*/false);
  REQUIRE(reordered.size() == 3);
  CHECK(reordered[0].text == "a");
  CHECK(reordered[1].text == "b");
  CHECK(reordered[2].text == "c");
  CHECK(reordered[2].index == 2);

  const std::string duplicated =
      R"({"index":0,"speaker":"s","text":"a","onset":0.0,"offset":1.0})" "\n"
      R"({"index":0,"speaker":"s","text":"b","onset":1.0,"offset":2.0})" "\n";
  CHECK_THROWS_AS(segio::parse_transcript(duplicated, false), ValidationError);
}

TEST_CASE("byte order marks are stripped before parsing", "[segio]") {
  const auto t =
      segio::parse_rttm("\xEF\xBB\xBFSPEAKER f1 1 0.00 1.00 <NA> <NA> a <NA> <NA>");
  CHECK(t.size() == 1);
}

TEST_CASE("conditions records roundtrip", "[segio]") {
  const std::vector<segio::ConditionRecord> records{{"dlg000", "fever cough"},
                                                    {"dlg001", "headache"}};
  const auto back = segio::parse_conditions(segio::emit_conditions(records));
  REQUIRE(back == records);
}
