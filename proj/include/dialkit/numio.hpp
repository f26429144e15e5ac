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
// Locale-independent number parsing and fixed-point formatting. All text
// interchange uses the decimal point, never the comma, regardless of the
// process locale.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "dialkit/errors.hpp"

namespace dialkit::numio {

inline double parse_double(std::string_view token, std::size_t line = 0) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("expected a number, got '" + std::string(token) + "'", line);
  }
  return value;
}

inline int64_t parse_int(std::string_view token, std::size_t line = 0) {
  int64_t value = 0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("expected an integer, got '" + std::string(token) + "'", line);
  }
  return value;
}

/// Renders value rounded to `decimals` places, e.g. format_fixed(2.5, 3) ->
/// "2.500". Integer based, so the output never depends on LC_NUMERIC.
inline std::string format_fixed(double value, int decimals) {
  int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const bool negative = value < 0;
  const int64_t scaled = std::llround(std::abs(value) * static_cast<double>(scale));
  std::string frac = std::to_string(scaled % scale);
  frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  std::string out = negative && scaled != 0 ? "-" : "";
  out += std::to_string(scaled / scale);
  if (decimals > 0) {
    out += '.';
    out += frac;
  }
  return out;
}

}  // namespace dialkit::numio
