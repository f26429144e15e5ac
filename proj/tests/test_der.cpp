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

#include "dialkit/der.hpp"
#include "dialkit/rng.hpp"
#include "oracles.hpp"

using namespace dialkit;

namespace {

segio::Timeline make_timeline(const std::string& file_id,
                              std::initializer_list<segio::Segment> segments) {
  segio::Timeline t(file_id);
  for (const auto& s : segments) t.add(s);
  return t;
}

}  // namespace

TEST_CASE("identical single segments map onto each other", "[der]") {
  const auto ref = make_timeline("f", {{0.0, 10.0, "A"}});
  const auto hyp = make_timeline("f", {{0.0, 10.0, "X"}});
  const auto mapping = der::optimal_mapping(ref, hyp);
  REQUIRE(mapping.size() == 1);
  CHECK(mapping.at("X") == "A");
}

TEST_CASE("mapping maximizes co-occurrence over both bijections", "[der]") {
  // Overlap matrix [[5,0],[1,4]]: identity wins 9 vs 1.
  const auto ref = make_timeline("f", {{0.0, 5.0, "A"}, {5.0, 5.0, "B"}});
  const auto hyp = make_timeline("f", {{0.0, 6.0, "X"}, {6.0, 4.0, "Y"}});
  const auto mapping = der::optimal_mapping(ref, hyp);
  REQUIRE(mapping.size() == 2);
  CHECK(mapping.at("X") == "A");
  CHECK(mapping.at("Y") == "B");
}

TEST_CASE("random 3x3 mappings match exhaustive enumeration", "[der]") {
  rng::Prng prng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ref = oracles::random_timeline(prng, 3, 9, "f", "r");
    const auto hyp = oracles::random_timeline(prng, 3, 9, "f", "h");
    const auto mapping = der::optimal_mapping(ref, hyp);

    // Compare achieved co-occurrence with the enumerated maximum.
    const auto ref_speakers = ref.speakers();
    const auto hyp_speakers = hyp.speakers();
    std::vector<std::vector<double>> co(hyp_speakers.size(),
                                        std::vector<double>(ref_speakers.size(), 0.0));
    for (std::size_t h = 0; h < hyp_speakers.size(); ++h) {
      for (std::size_t r = 0; r < ref_speakers.size(); ++r) {
        for (const auto& hs : hyp.segments()) {
          if (hs.speaker != hyp_speakers[h]) continue;
          for (const auto& rs : ref.segments()) {
            if (rs.speaker != ref_speakers[r]) continue;
            co[h][r] += std::max(
                0.0, std::min(hs.end(), rs.end()) - std::max(hs.onset, rs.onset));
          }
        }
      }
    }
    double achieved = 0.0;
    for (const auto& [h, r] : mapping) {
      std::size_t hi =
          std::lower_bound(hyp_speakers.begin(), hyp_speakers.end(), h) - hyp_speakers.begin();
      std::size_t ri =
          std::lower_bound(ref_speakers.begin(), ref_speakers.end(), r) - ref_speakers.begin();
      achieved += co[hi][ri];
    }
    CHECK(achieved == Catch::Approx(oracles::brute_force_max_assignment(co)).margin(1e-9));
  }
}

TEST_CASE("perfect hypothesis scores zero", "[der]") {
  rng::Prng prng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = oracles::random_timeline(prng, 4, 12);
    const auto result = der::compute_der(t, t, 0.25, true);
    CHECK(result.der == 0.0);
    CHECK(result.miss == 0.0);
    CHECK(result.false_alarm == 0.0);
    CHECK(result.confusion == 0.0);
  }
}

TEST_CASE("truncated hypothesis yields pure miss", "[der]") {
  const auto ref = make_timeline("f", {{0.0, 10.0, "A"}});
  const auto hyp = make_timeline("f", {{0.0, 8.0, "A"}});
  const auto result = der::compute_der(ref, hyp, 0.0, true);
  CHECK(result.miss == Catch::Approx(2.0));
  CHECK(result.false_alarm == 0.0);
  CHECK(result.confusion == 0.0);
  CHECK(result.total_ref == Catch::Approx(10.0));
  CHECK(result.der == Catch::Approx(0.20));
}

TEST_CASE("single hypothesis speaker against two references is half confusion", "[der]") {
  const auto ref = make_timeline("f", {{0.0, 5.0, "A"}, {5.0, 5.0, "B"}});
  const auto hyp = make_timeline("f", {{0.0, 10.0, "X"}});
  const auto result = der::compute_der(ref, hyp, 0.0, true);
  CHECK(result.confusion == Catch::Approx(5.0));
  CHECK(result.der == Catch::Approx(0.50));
}

TEST_CASE("renaming hypothesis speakers never changes the rate", "[der]") {
  rng::Prng prng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ref = oracles::random_timeline(prng, 4, 12, "f", "r");
    const auto hyp = oracles::random_timeline(prng, 4, 12, "f", "h");
    segio::Timeline renamed("f");
    for (auto s : hyp.segments()) {
      s.speaker = "zz_" + s.speaker;
      renamed.add(std::move(s));
    }
    const auto a = der::compute_der(ref, hyp, 0.25, true);
    const auto b = der::compute_der(ref, renamed, 0.25, true);
    CHECK(a.der == Catch::Approx(b.der).margin(1e-12));
    CHECK(a.miss == Catch::Approx(b.miss).margin(1e-12));
  }
}

TEST_CASE("growing the collar never grows the error", "[der]") {
  rng::Prng prng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ref = oracles::random_timeline(prng, 3, 10, "f", "r");
    const auto hyp = oracles::random_timeline(prng, 3, 10, "f", "h");
    double previous = std::numeric_limits<double>::infinity();
    for (double collar : {2.0, 1.0, 0.5, 0.25, 0.0}) {
      const auto result = der::compute_der(ref, hyp, collar, true);
      const double error = result.error_seconds();
      // collar decreasing -> error non-decreasing
      CHECK(error >= -1e-12);
      if (previous != std::numeric_limits<double>::infinity()) {
        CHECK(previous <= error + 1e-9);
      }
      previous = error;
    }
  }
}

TEST_CASE("brute-force oracle equivalence on random pairs", "[der]") {
  rng::Prng prng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const auto ref = oracles::random_timeline(prng, 4, 14, "f", "r");
    const auto hyp = oracles::random_timeline(prng, 4, 14, "f", "h");
    const double collar = (trial % 3) * 0.25;
    const bool overlap = trial % 2 == 0;
    const auto fast = der::compute_der(ref, hyp, collar, overlap);
    const auto slow = oracles::brute_force_der(ref, hyp, collar, overlap);
    CHECK(fast.error_seconds() ==
          Catch::Approx(slow.miss + slow.fa + slow.conf).margin(1e-9));
    CHECK(fast.total_ref == Catch::Approx(slow.total_ref).margin(1e-9));
    if (slow.total_ref > 0) {
      CHECK(fast.der == Catch::Approx(slow.der).margin(1e-9));
    }
  }
}

TEST_CASE("empty reference with nonzero hypothesis reports the infinity sentinel", "[der]") {
  const segio::Timeline ref("f");
  const auto hyp = make_timeline("f", {{0.0, 3.0, "X"}});
  const auto result = der::compute_der(ref, hyp, 0.0, true);
  CHECK(std::isinf(result.der));
  CHECK(result.false_alarm == Catch::Approx(3.0));
  CHECK(result.total_ref == 0.0);
}

TEST_CASE("breakdown recomposes from its components", "[der]") {
  rng::Prng prng(43);
  const auto ref = oracles::random_timeline(prng, 4, 15, "f", "r");
  const auto hyp = oracles::random_timeline(prng, 4, 15, "f", "h");
  const auto result = der::compute_der(ref, hyp, 0.25, true);
  CHECK(result.der ==
        Catch::Approx((result.miss + result.false_alarm + result.confusion) /
                      result.total_ref)
            .margin(1e-12));
  // Injectivity of the mapping.
  std::set<std::string> targets;
  for (const auto& [h, r] : result.mapping) targets.insert(r);
  CHECK(targets.size() == result.mapping.size());
}
