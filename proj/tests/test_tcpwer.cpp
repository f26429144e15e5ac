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
#include "dialkit/tcpwer.hpp"
#include "dialkit/textprep.hpp"
#include "oracles.hpp"

using namespace dialkit;

namespace {

std::vector<segio::TimedWord> make_words(const std::vector<std::string>& tokens,
                                         double onset, double step,
                                         const std::string& speaker = "s") {
  std::vector<segio::TimedWord> words;
  double t = onset;
  for (const auto& token : tokens) {
    words.push_back({token, t, t + step, speaker});
    t += step;
  }
  return words;
}

segio::SpeakerWordStream make_stream(const std::string& speaker,
                                     const std::vector<std::string>& tokens, double onset,
                                     double step = 0.5) {
  segio::SpeakerWordStream stream;
  stream.speaker = speaker;
  stream.words = make_words(tokens, onset, step, speaker);
  return stream;
}

std::vector<std::string> random_tokens(rng::Prng& prng, std::size_t n,
                                       std::size_t vocabulary) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < n; ++i) {
    tokens.push_back("t" + std::to_string(prng.next_index(vocabulary)));
  }
  return tokens;
}

}  // namespace

TEST_CASE("pseudo word timing divides the segment evenly", "[tcpwer]") {
  segio::TranscriptSegment seg{0, "s", "a b c d", 10.0, 12.0};
  const auto words = tcpwer::pseudo_word_timing(seg);
  REQUIRE(words.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(words[i].onset == Catch::Approx(10.0 + 0.5 * static_cast<double>(i)));
    CHECK(words[i].offset == Catch::Approx(10.5 + 0.5 * static_cast<double>(i)));
  }
  CHECK(words[2].word == "c");

  seg.text = "solo";
  const auto single = tcpwer::pseudo_word_timing(seg);
  REQUIRE(single.size() == 1);
  CHECK(single[0].onset == 10.0);
  CHECK(single[0].offset == 12.0);

  seg.text = "";
  CHECK(tcpwer::pseudo_word_timing(seg).empty());

  seg.text = "word";
  seg.offset = seg.onset;
  CHECK_THROWS_AS(tcpwer::pseudo_word_timing(seg), ValidationError);
}

TEST_CASE("tc_align on identical input is error free", "[tcpwer]") {
  const auto words = make_words({"a", "b", "c"}, 0.0, 0.5);
  const auto counts = tcpwer::tc_align(words, words, 5.0);
  CHECK(counts.errors() == 0);
  CHECK(counts.matches == 3);
}

TEST_CASE("tc_align counts a co-timed substitution", "[tcpwer]") {
  const auto ref = make_words({"a", "b", "c"}, 0.0, 0.5);
  const auto hyp = make_words({"a", "x", "c"}, 0.0, 0.5);
  const auto counts = tcpwer::tc_align(ref, hyp, 5.0);
  CHECK(counts.substitutions == 1);
  CHECK(counts.deletions == 0);
  CHECK(counts.insertions == 0);
  // Constraint inactive, so the plain edit distance agrees.
  CHECK(counts.errors() == oracles::levenshtein({"a", "b", "c"}, {"a", "x", "c"}));
}

TEST_CASE("tc_align forces deletion plus insertion when intervals never meet", "[tcpwer]") {
  const auto ref = make_words({"a", "b", "c"}, 0.0, 1.0);
  const auto hyp = make_words({"a", "b", "c"}, 100.0, 1.0);
  const auto counts = tcpwer::tc_align(ref, hyp, 5.0);
  CHECK(counts.deletions == 3);
  CHECK(counts.insertions == 3);
  CHECK(counts.substitutions == 0);
}

TEST_CASE("tc_align rejects unsorted input", "[tcpwer]") {
  auto words = make_words({"a", "b"}, 0.0, 0.5);
  std::swap(words[0], words[1]);
  CHECK_THROWS_AS(tcpwer::tc_align(words, words, 5.0), ValidationError);
}

TEST_CASE("perfect two-stream hypothesis scores zero", "[tcpwer]") {
  const std::vector<segio::SpeakerWordStream> streams{
      make_stream("doctor", {"a", "b", "c"}, 0.0),
      make_stream("patient", {"d", "e"}, 2.0)};
  const auto report = tcpwer::compute_tcpwer(streams, streams, 5.0);
  CHECK(report.tcpwer == 0.0);
  CHECK(report.ref_words == 5);
}

TEST_CASE("stream assignment recovers swapped labels", "[tcpwer]") {
  const std::vector<segio::SpeakerWordStream> ref{
      make_stream("doctor", {"a", "b", "c"}, 0.0),
      make_stream("patient", {"d", "e"}, 2.0)};
  const std::vector<segio::SpeakerWordStream> hyp{
      make_stream("patient", {"a", "b", "c"}, 0.0),
      make_stream("doctor", {"d", "e"}, 2.0)};
  const auto report = tcpwer::compute_tcpwer(ref, hyp, 5.0);
  CHECK(report.tcpwer == 0.0);
  CHECK(report.assignment.at("patient") == "doctor");
  CHECK(report.assignment.at("doctor") == "patient");
}

TEST_CASE("huge collar degenerates to plain word error rate", "[tcpwer]") {
  rng::Prng prng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const auto ref_tokens = random_tokens(prng, 1 + prng.next_index(20), 5);
    const auto hyp_tokens = random_tokens(prng, prng.next_index(20), 5);
    const std::vector<segio::SpeakerWordStream> ref{make_stream("s", ref_tokens, 0.0)};
    const std::vector<segio::SpeakerWordStream> hyp{
        make_stream("s", hyp_tokens, prng.next_canonical() * 50.0)};
    const auto report = tcpwer::compute_tcpwer(ref, hyp, 1e9);
    CHECK(report.errors() == oracles::levenshtein(ref_tokens, hyp_tokens));
  }
}

TEST_CASE("tcpwer is monotone in the collar", "[tcpwer]") {
  rng::Prng prng(59);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<segio::SpeakerWordStream> ref, hyp;
    const std::size_t streams = 1 + prng.next_index(3);
    for (std::size_t s = 0; s < streams; ++s) {
      ref.push_back(make_stream("r" + std::to_string(s),
                                random_tokens(prng, 1 + prng.next_index(12), 6),
                                prng.next_canonical() * 20.0));
      hyp.push_back(make_stream("h" + std::to_string(s),
                                random_tokens(prng, 1 + prng.next_index(12), 6),
                                prng.next_canonical() * 20.0));
    }
    double previous = std::numeric_limits<double>::infinity();
    for (double collar : {1e9, 20.0, 5.0, 1.0, 0.0}) {
      const auto report = tcpwer::compute_tcpwer(ref, hyp, collar);
      if (previous != std::numeric_limits<double>::infinity()) {
        CHECK(report.tcpwer >= previous - 1e-12);
      }
      previous = report.tcpwer;
    }
  }
}

TEST_CASE("renaming hypothesis streams never changes the rate", "[tcpwer]") {
  rng::Prng prng(61);
  std::vector<segio::SpeakerWordStream> ref, hyp, renamed;
  for (int s = 0; s < 3; ++s) {
    ref.push_back(make_stream("r" + std::to_string(s), random_tokens(prng, 8, 6),
                              static_cast<double>(s) * 5.0));
    auto stream = make_stream("h" + std::to_string(s), random_tokens(prng, 8, 6),
                              static_cast<double>(s) * 5.0);
    hyp.push_back(stream);
    stream.speaker = "renamed" + std::to_string(s);
    renamed.push_back(std::move(stream));
  }
  CHECK(tcpwer::compute_tcpwer(ref, hyp, 5.0).tcpwer ==
        tcpwer::compute_tcpwer(ref, renamed, 5.0).tcpwer);
}

TEST_CASE("stream assignment matches exhaustive enumeration", "[tcpwer]") {
  rng::Prng prng(67);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<segio::SpeakerWordStream> ref, hyp;
    const std::size_t num_ref = 1 + prng.next_index(4);
    const std::size_t num_hyp = 1 + prng.next_index(4);
    for (std::size_t s = 0; s < num_ref; ++s) {
      ref.push_back(make_stream("r" + std::to_string(s),
                                random_tokens(prng, 1 + prng.next_index(8), 4),
                                prng.next_canonical() * 10.0));
    }
    for (std::size_t s = 0; s < num_hyp; ++s) {
      hyp.push_back(make_stream("h" + std::to_string(s),
                                random_tokens(prng, 1 + prng.next_index(8), 4),
                                prng.next_canonical() * 10.0));
    }
    const double collar = 2.0;
    const auto report = tcpwer::compute_tcpwer(ref, hyp, collar);

    std::vector<std::vector<double>> cost(num_ref, std::vector<double>(num_hyp));
    std::vector<double> ref_penalty(num_ref), hyp_penalty(num_hyp);
    for (std::size_t i = 0; i < num_ref; ++i) {
      ref_penalty[i] = static_cast<double>(ref[i].words.size());
      for (std::size_t j = 0; j < num_hyp; ++j) {
        cost[i][j] =
            static_cast<double>(tcpwer::tc_align(ref[i].words, hyp[j].words, collar).errors());
      }
    }
    for (std::size_t j = 0; j < num_hyp; ++j) {
      hyp_penalty[j] = static_cast<double>(hyp[j].words.size());
    }
    const double best =
        oracles::brute_force_min_assignment_with_rejection(cost, ref_penalty, hyp_penalty);
    CHECK(static_cast<double>(report.errors()) == Catch::Approx(best));
  }
}

TEST_CASE("empty reference with hypothesis words reports the infinity sentinel", "[tcpwer]") {
  const std::vector<segio::SpeakerWordStream> ref;
  const std::vector<segio::SpeakerWordStream> hyp{make_stream("h", {"a", "b"}, 0.0)};
  const auto report = tcpwer::compute_tcpwer(ref, hyp, 5.0);
  CHECK(std::isinf(report.tcpwer));
  CHECK(report.insertions == 2);
}

TEST_CASE("normalization makes encoding variants score zero", "[tcpwer]") {
  // Same grapheme, two spellings: precomposed U+0958 vs base + nukta.
  segio::SpeakerWordStream precomposed;
  precomposed.speaker = "s";
  precomposed.words = {{"क़ा", 0.0, 0.5, "s"}};
  segio::SpeakerWordStream decomposed;
  decomposed.speaker = "s";
  decomposed.words = {{"क़ा", 0.0, 0.5, "s"}};

  const auto raw = tcpwer::compute_tcpwer({precomposed}, {decomposed}, 5.0);
  CHECK(raw.errors() == 1);  // exact-match scoring sees different byte strings

  const auto profile = textprep::NormalizationProfile::defaults();
  for (auto* stream : {&precomposed, &decomposed}) {
    for (auto& w : stream->words) w.word = textprep::apply(w.word, profile);
  }
  const auto normalized = tcpwer::compute_tcpwer({precomposed}, {decomposed}, 5.0);
  CHECK(normalized.errors() == 0);
  CHECK(normalized.tcpwer == 0.0);
}
