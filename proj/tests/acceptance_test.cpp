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
// End-to-end acceptance suite. Each criterion is one test case printing a
// [PASS] line; run them all with `ctest` or `./acceptance_tests`.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <catch2/catch_amalgamated.hpp>

#include "dialkit/der.hpp"
#include "dialkit/powerset.hpp"
#include "dialkit/rng.hpp"
#include "dialkit/run.hpp"
#include "dialkit/segio.hpp"
#include "dialkit/snippets.hpp"
#include "dialkit/stitch.hpp"
#include "dialkit/synth.hpp"
#include "dialkit/tcpwer.hpp"
#include "dialkit/textmetrics.hpp"
#include "dialkit/textprep.hpp"
#include "oracles.hpp"

using namespace dialkit;
namespace fs = std::filesystem;

namespace {

#include "unicode_cases.inc"

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void pass(int criterion, const std::string& what) {
  std::cout << "[PASS] criterion " << criterion << ": " << what << "\n";
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("DER equals the exhaustive-bijection oracle", "[criterion1]") {
  const auto start = std::chrono::steady_clock::now();
  rng::Prng prng(1001);
  for (int trial = 0; trial < 500; ++trial) {
    const auto ref = oracles::random_timeline(prng, 4, 20, "f", "r");
    const auto hyp = oracles::random_timeline(prng, 4, 20, "f", "h");
    const double collar = (trial % 4) * 0.25;
    const bool overlap = trial % 2 == 0;
    const auto fast = der::compute_der(ref, hyp, collar, overlap);
    const auto slow = oracles::brute_force_der(ref, hyp, collar, overlap);
    REQUIRE(fast.error_seconds() ==
            Catch::Approx(slow.miss + slow.fa + slow.conf).margin(1e-9));
    REQUIRE(fast.total_ref == Catch::Approx(slow.total_ref).margin(1e-9));
    if (slow.total_ref > 0) {
      REQUIRE(fast.der == Catch::Approx(slow.der).margin(1e-9));
    }
  }
  const double seconds = elapsed_seconds(start);
  REQUIRE(seconds < 10.0);
  pass(1, "500 random timeline pairs match the brute-force oracle within 1e-9 (" +
              numio::format_fixed(seconds, 2) + " s)");
}

TEST_CASE("tcpWER degenerates to WER and is collar monotone", "[criterion2]") {
  rng::Prng prng(2002);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> ref_tokens, hyp_tokens;
    for (std::size_t i = 0; i < 1 + prng.next_index(25); ++i) {
      ref_tokens.push_back("t" + std::to_string(prng.next_index(6)));
    }
    for (std::size_t i = 0; i < prng.next_index(25); ++i) {
      hyp_tokens.push_back("t" + std::to_string(prng.next_index(6)));
    }
    auto make_stream = [](const std::vector<std::string>& tokens, double onset) {
      segio::SpeakerWordStream s;
      s.speaker = "spk";
      double t = onset;
      for (const auto& token : tokens) {
        s.words.push_back({token, t, t + 0.4, "spk"});
        t += 0.4;
      }
      return s;
    };
    const auto report = tcpwer::compute_tcpwer({make_stream(ref_tokens, 0.0)},
                                               {make_stream(hyp_tokens, 500.0)}, 1e9);
    REQUIRE(report.errors() == oracles::levenshtein(ref_tokens, hyp_tokens));
  }

  for (int trial = 0; trial < 200; ++trial) {
    std::vector<segio::SpeakerWordStream> ref, hyp;
    const std::size_t streams = 2 + prng.next_index(2);
    for (std::size_t s = 0; s < streams; ++s) {
      for (auto* side : {&ref, &hyp}) {
        segio::SpeakerWordStream stream;
        stream.speaker = (side == &ref ? "r" : "h") + std::to_string(s);
        double t = prng.next_canonical() * 20.0;
        const std::size_t words = 1 + prng.next_index(10);
        for (std::size_t w = 0; w < words; ++w) {
          stream.words.push_back(
              {"t" + std::to_string(prng.next_index(5)), t, t + 0.3, stream.speaker});
          t += 0.3;
        }
        side->push_back(std::move(stream));
      }
    }
    double previous = -1.0;
    for (double collar : {0.0, 0.5, 2.0, 10.0, 1e9}) {
      const double rate = tcpwer::compute_tcpwer(ref, hyp, collar).tcpwer;
      if (previous >= 0.0) REQUIRE(rate <= previous + 1e-12);
      previous = rate;
    }
  }
  pass(2, "200 single-speaker cases equal the Levenshtein oracle; collar monotone on 200 "
          "multi-speaker cases");
}

TEST_CASE("powerset codec is exhaustively correct", "[criterion3]") {
  const auto start = std::chrono::steady_clock::now();
  for (int k = 1; k <= 5; ++k) {
    for (int m = 1; m <= std::min(k, 3); ++m) {
      const powerset::PowersetConfig cfg{k, m};
      const auto table = oracles::powerset_table(k, m);
      uint64_t expected = 0;
      for (int i = 0; i <= m; ++i) expected += powerset::choose(k, i);
      REQUIRE(powerset::class_count(cfg) == expected);
      REQUIRE(powerset::class_count(cfg) == table.size());
      for (uint64_t idx = 0; idx < table.size(); ++idx) {
        REQUIRE(powerset::decode(idx, cfg) == table[idx]);
        REQUIRE(powerset::encode(table[idx], cfg) == idx);
      }
    }
  }
  const double seconds = elapsed_seconds(start);
  REQUIRE(seconds < 1.0);
  pass(3, "roundtrip and class counts verified for all K <= 5, M <= 3 (" +
              numio::format_fixed(seconds, 3) + " s)");
}

TEST_CASE("stitching recovers a synthetic dialogue", "[criterion4]") {
  const auto start = std::chrono::steady_clock::now();
  synth::SynthConfig cfg;
  cfg.duration = 1800.0;
  cfg.p_single = 0.8430;
  cfg.p_silence = 0.1135;
  cfg.p_overlap = 0.0435;
  cfg.mean_turn = 4.0;
  cfg.embedding_dim = 16;
  cfg.cluster_separation = 20.0;  // 20x the unit within-cluster spread
  cfg.seed = 40004;
  const auto out = synth::gen_conversation(cfg, "dlg");

  stitch::StitchConfig stitch_config;  // paper defaults: threshold 0.5, min 0.4 s
  stitch_config.seed = 7;
  stitch_config.file_id = "dlg";
  const auto stitched = stitch::stitch_pipeline(out.chunks, stitch_config);
  const auto scored = der::compute_der(out.truth, stitched, 0.0, true);
  REQUIRE(scored.der <= 0.01);
  const double seconds = elapsed_seconds(start);
  REQUIRE(seconds < 30.0);
  pass(4, "30-minute corpus-statistics dialogue stitched to DER " +
              numio::format_fixed(scored.der * 100.0, 3) + "% <= 1% (" +
              numio::format_fixed(seconds, 2) + " s)");
}

TEST_CASE("injected errors are recovered exactly from the masks", "[criterion5]") {
  const auto start = std::chrono::steady_clock::now();

  // Label flips on an overlap-free dialogue: confusion == flipped seconds.
  synth::SynthConfig cfg;
  cfg.duration = 1800.0;
  cfg.p_single = 0.85;
  cfg.p_silence = 0.15;
  cfg.p_overlap = 0.0;
  cfg.mean_turn = 2.0;
  cfg.seed = 50005;
  const auto truth = synth::gen_conversation(cfg, "dlg");

  synth::PerturbConfig flips;
  flips.label_flip_rate = 0.05;
  flips.seed = 55;
  const auto flipped = synth::perturb(truth.dialogue, flips);
  REQUIRE_FALSE(flipped.mask.flipped_segments.empty());
  const auto der_scored =
      der::compute_der(truth.truth, synth::timeline_of(flipped.dialogue), 0.0, true);
  REQUIRE(der_scored.confusion ==
          Catch::Approx(flipped.mask.flipped_duration).epsilon(1e-6));
  REQUIRE(der_scored.miss == 0.0);
  REQUIRE(der_scored.false_alarm == 0.0);

  // Word substitutions: tcpWER counts equal the mask exactly.
  synth::PerturbConfig subs;
  subs.word_sub_rate = 0.1;
  subs.seed = 56;
  const auto substituted = synth::perturb(truth.dialogue, subs);
  REQUIRE(substituted.mask.substituted_words > 0);
  const auto tcp = tcpwer::compute_tcpwer(synth::streams_of(truth.dialogue),
                                          synth::streams_of(substituted.dialogue), 5.0);
  REQUIRE(tcp.substitutions == substituted.mask.substituted_words);
  REQUIRE(tcp.deletions == 0);
  REQUIRE(tcp.insertions == 0);
  const double expected_rate = static_cast<double>(substituted.mask.substituted_words) /
                               static_cast<double>(substituted.mask.total_words);
  REQUIRE(tcp.tcpwer == Catch::Approx(expected_rate).epsilon(1e-6));

  const double seconds = elapsed_seconds(start);
  REQUIRE(seconds < 30.0);
  pass(5, "mask-derived confusion and substitution totals matched within 1e-6 (" +
              numio::format_fixed(seconds, 2) + " s)");
}

TEST_CASE("normalization converges, idempotent, and kills encoding variance",
          "[criterion6]") {
  // The eight precomposed nukta letters against Unicode canonical data.
  const std::pair<const char*, const char*> nukta_pairs[] = {
      {"क़", "क़"}, {"ख़", "ख़"},
      {"ग़", "ग़"}, {"ज़", "ज़"},
      {"ड़", "ड़"}, {"ढ़", "ढ़"},
      {"फ़", "फ़"}, {"य़", "य़"}};
  for (const auto& [precomposed, decomposed] : nukta_pairs) {
    REQUIRE(textprep::normalize_unicode(precomposed) == decomposed);
    REQUIRE(textprep::normalize_unicode(decomposed) == decomposed);
  }
  for (const auto& test_case : kNfcCases) {
    REQUIRE(textprep::normalize_unicode(test_case.input) == test_case.nfc);
  }

  // Idempotence across a 10k-string fuzz corpus.
  rng::Prng prng(6006);
  static const uint32_t pool[] = {0x0915, 0x0916, 0x0928, 0x0930, 0x0933, 0x092B, 0x092F,
                                  0x093C, 0x093E, 0x0941, 0x0947, 0x094D, 0x0901, 0x0902,
                                  0x0958, 0x095B, 0x095E, 0x095F, 0x0964, 0x0965, 0x0951,
                                  'a',    'B',    'z',    ' ',    '.',    ',',    '!'};
  const auto profile = textprep::NormalizationProfile::defaults();
  for (int i = 0; i < 10000; ++i) {
    std::string text;
    const std::size_t length = 1 + prng.next_index(20);
    for (std::size_t j = 0; j < length; ++j) {
      utf8::append(text, pool[prng.next_index(std::size(pool))]);
    }
    const auto once = textprep::normalize_unicode(text);
    REQUIRE(textprep::normalize_unicode(once) == once);
    const auto applied = textprep::apply(text, profile);
    REQUIRE(textprep::apply(applied, profile) == applied);
  }

  // tcpWER between encoding variants of the same text is zero after
  // normalization.
  segio::SpeakerWordStream a, b;
  a.speaker = b.speaker = "s";
  double t = 0.0;
  for (const auto& [precomposed, decomposed] : nukta_pairs) {
    a.words.push_back({textprep::apply(precomposed, profile), t, t + 0.5, "s"});
    b.words.push_back({textprep::apply(decomposed, profile), t, t + 0.5, "s"});
    t += 0.5;
  }
  const auto report = tcpwer::compute_tcpwer({a}, {b}, 5.0);
  REQUIRE(report.errors() == 0);
  REQUIRE(report.tcpwer == 0.0);
  pass(6, "U+0958..U+095F converge with decomposed spellings; 10k-string idempotence; "
          "encoding variants score tcpWER 0");
}

TEST_CASE("snippet windows reproduce the worked examples", "[criterion7]") {
  std::vector<segio::TranscriptSegment> gt;
  for (int i = 0; i < 10; ++i) {
    gt.push_back({i, "s", "text " + std::to_string(i), static_cast<double>(i),
                  static_cast<double>(i + 1)});
  }

  auto asr = gt;
  asr[5].text = "wrong";
  auto pairs = snippets::extract_snippets(asr, gt, 2);
  REQUIRE(pairs.size() == 1);
  REQUIRE(pairs[0].lo == 3);
  REQUIRE(pairs[0].hi == 7);

  asr = gt;
  asr[2].text = "wrong";
  asr[4].text = "wrong";
  pairs = snippets::extract_snippets(asr, gt, 2);
  REQUIRE(pairs.size() == 1);
  REQUIRE(pairs[0].lo == 0);
  REQUIRE(pairs[0].hi == 6);

  REQUIRE(snippets::extract_snippets(gt, gt, 2).empty());
  pass(7, "windows [3,7], merged [0,6], and the empty case reproduce exactly");
}

TEST_CASE("ROUGE fixtures and the LCS oracle", "[criterion8]") {
  const auto partial = textmetrics::rouge1("fever cough", "fever");
  REQUIRE(partial.f1 == Catch::Approx(2.0 / 3.0).margin(1e-9));
  REQUIRE(partial.recall == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(partial.precision == Catch::Approx(1.0).margin(1e-9));

  const auto swapped = textmetrics::rougeL("a b c d", "a c b d");
  REQUIRE(swapped.f1 == Catch::Approx(0.75).margin(1e-9));

  rng::Prng prng(8008);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> a, b;
    for (std::size_t i = 0; i < prng.next_index(30); ++i) {
      a.push_back("t" + std::to_string(prng.next_index(4)));
    }
    for (std::size_t i = 0; i < prng.next_index(30); ++i) {
      b.push_back("t" + std::to_string(prng.next_index(4)));
    }
    REQUIRE(textmetrics::lcs_length(a, b) == oracles::lcs(a, b));
  }
  pass(8, "hand fixtures within 1e-9; LCS equals the DP oracle on 500 random pairs");
}

TEST_CASE("full runs are byte-identical through the CLI", "[criterion9]") {
  const fs::path root = fs::temp_directory_path() / "dialkit_acceptance_run";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path truth = root / "truth";

  const std::string cli = DIALKIT_CLI_PATH;
  REQUIRE(fs::exists(cli));

  {
    std::ofstream cfg(root / "gen.json");
    cfg << R"({"duration": 300.0, "mean_turn": 2.0, "embedding_dim": 8,)"
        << R"( "cluster_separation": 20.0, "seed": 90009, "n_dialogues": 2})";
  }
  REQUIRE(std::system((cli + " synth gen --config " + (root / "gen.json").string() +
                       " --out " + truth.string() + " > " + (root / "gen.log").string())
                          .c_str()) == 0);

  {
    std::ofstream cfg(root / "run.json");
    cfg << nlohmann::json{{"ref_dir", truth.string()},
                          {"diarization_dir", truth.string()},
                          {"asr_dir", truth.string()},
                          {"conditions_dir", truth.string()},
                          {"out_dir", (root / "out_one").string()},
                          {"der_collar", 0.0},
                          {"stitch", {{"seed", 3}, {"min_duration", 0.0}}}}
               .dump();
  }
  {
    std::ofstream cfg(root / "run2.json");
    cfg << nlohmann::json{{"ref_dir", truth.string()},
                          {"diarization_dir", truth.string()},
                          {"asr_dir", truth.string()},
                          {"conditions_dir", truth.string()},
                          {"out_dir", (root / "out_two").string()},
                          {"der_collar", 0.0},
                          {"stitch", {{"seed", 3}, {"min_duration", 0.0}}}}
               .dump();
  }
  REQUIRE(std::system((cli + " run --config " + (root / "run.json").string() + " > " +
                       (root / "stdout_one.txt").string())
                          .c_str()) == 0);
  REQUIRE(std::system((cli + " run --config " + (root / "run2.json").string() + " > " +
                       (root / "stdout_two.txt").string())
                          .c_str()) == 0);

  REQUIRE(slurp(root / "out_one" / "report.json") == slurp(root / "out_two" / "report.json"));
  for (const auto& id : {"dlg000", "dlg001"}) {
    REQUIRE(slurp(root / "out_one" / id / "report.json") ==
            slurp(root / "out_two" / id / "report.json"));
    REQUIRE(slurp(root / "out_one" / id / "diarization.rttm") ==
            slurp(root / "out_two" / id / "diarization.rttm"));
  }
  REQUIRE(slurp(root / "stdout_one.txt") == slurp(root / "stdout_two.txt"));

  // A self-comparison run also scores perfectly.
  const auto report = nlohmann::json::parse(slurp(root / "out_one" / "report.json"));
  REQUIRE(report["aggregate"]["der"]["der"].get<double>() == 0.0);
  REQUIRE(report["aggregate"]["tcpwer"]["tcpwer"].get<double>() == 0.0);
  REQUIRE(report["aggregate"]["rouge1_mean"]["f1"].get<double>() == 1.0);
  fs::remove_all(root);
  pass(9, "two CLI runs over the synth fixture produced byte-identical reports");
}

TEST_CASE("RTTM roundtrip identity on 1k random timelines", "[criterion10]") {
  rng::Prng prng(1010);
  for (int trial = 0; trial < 1000; ++trial) {
    segio::Timeline t("file" + std::to_string(trial % 7));
    const int segments = 1 + static_cast<int>(prng.next_index(25));
    for (int s = 0; s < segments; ++s) {
      segio::Segment seg;
      seg.onset = static_cast<double>(prng.next_index(3600000)) / 1000.0;
      seg.duration = static_cast<double>(1 + prng.next_index(60000)) / 1000.0;
      seg.speaker = "spk" + std::to_string(prng.next_index(6));
      t.add(std::move(seg));
    }
    REQUIRE(segio::parse_rttm(segio::emit_rttm(t)) == t);
  }
  pass(10, "1000 random timelines survive emit/parse bit-exactly");
}
