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
// Seeded randomness with hand-rolled transforms. mt19937_64 output is
// pinned by the standard, but the standard distributions are not, so
// uniform/normal/exponential draws are derived here to keep results
// bit-identical across toolchains.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dialkit::rng {

class Prng {
 public:
  explicit Prng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_canonical() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log argument.
  double next_positive() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform index in [0, n). n must be positive.
  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  bool next_bernoulli(double p) { return next_canonical() < p; }

  double next_exponential(double mean) { return -mean * std::log(next_positive()); }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double next_normal() {
    const double u1 = next_positive();
    const double u2 = next_canonical();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dialkit::rng
