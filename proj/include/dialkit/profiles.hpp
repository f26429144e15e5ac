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
// Normalization profile files (docs/FORMATS.md):
//   {"unicode": true, "punctuation": "<chars>", "whitespace_collapse": true,
//    "danda_policy": "strip" | "period"}
// Missing keys keep the defaults; "punctuation" replaces the default set
// with the code points of the given string.

#pragma once

#include <filesystem>
#include <fstream>
#include <string_view>

#include <json.hpp>

#include "dialkit/errors.hpp"
#include "dialkit/textprep.hpp"
#include "dialkit/utf8.hpp"

namespace dialkit::textprep {

inline NormalizationProfile parse_profile(std::string_view json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("profile is not a JSON object");
  }
  auto profile = NormalizationProfile::defaults();
  profile.unicode_form = doc.value("unicode", true);
  profile.whitespace_collapse = doc.value("whitespace_collapse", true);
  if (doc.contains("punctuation")) {
    profile.punctuation_set.clear();
    for (uint32_t cp : utf8::decode(doc["punctuation"].get<std::string>())) {
      profile.punctuation_set.insert(cp);
    }
  }
  const std::string policy = doc.value("danda_policy", std::string{"strip"});
  if (policy == "strip") {
    profile.danda_policy = DandaPolicy::kStrip;
  } else if (policy == "period") {
    profile.danda_policy = DandaPolicy::kMapToPeriod;
  } else {
    throw ValidationError("profile: danda_policy must be 'strip' or 'period'");
  }
  return profile;
}

inline NormalizationProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_profile(content);
}

}  // namespace dialkit::textprep
