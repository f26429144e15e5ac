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
// Report structures: text tables for humans, JSON records for machines.
// Non-finite ratios (the empty-reference sentinel) serialize as JSON null
// and print as "inf".

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "dialkit/der.hpp"
#include "dialkit/numio.hpp"
#include "dialkit/tcpwer.hpp"
#include "dialkit/textmetrics.hpp"

namespace dialkit::report {

inline std::string format_ratio(double value, int decimals = 4) {
  if (std::isinf(value)) return "inf";
  return numio::format_fixed(value, decimals);
}

inline std::string format_percent(double value, int decimals = 2) {
  if (std::isinf(value)) return "inf";
  return numio::format_fixed(value * 100.0, decimals);
}

inline nlohmann::json to_json(const der::DerBreakdown& b) {
  nlohmann::json mapping = nlohmann::json::object();
  for (const auto& [hyp, ref] : b.mapping) mapping[hyp] = ref;
  return nlohmann::json{{"miss", b.miss},
                        {"false_alarm", b.false_alarm},
                        {"confusion", b.confusion},
                        {"total_ref", b.total_ref},
                        {"der", b.der},
                        {"mapping", mapping},
                        {"collar", b.collar},
                        {"score_overlap", b.score_overlap}};
}

inline nlohmann::json to_json(const tcpwer::TcpWerReport& r) {
  nlohmann::json assignment = nlohmann::json::object();
  for (const auto& [hyp, ref] : r.assignment) assignment[hyp] = ref;
  return nlohmann::json{{"substitutions", r.substitutions},
                        {"deletions", r.deletions},
                        {"insertions", r.insertions},
                        {"ref_words", r.ref_words},
                        {"tcpwer", r.tcpwer},
                        {"assignment", assignment},
                        {"collar", r.collar}};
}

inline nlohmann::json to_json(const textmetrics::RougeScore& s) {
  return nlohmann::json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string render_der_table(const std::string& name, const der::DerBreakdown& b) {
  std::string out;
  out += pad("file", 16) + pad("miss", 10) + pad("fa", 10) + pad("conf", 10) +
         pad("total", 10) + "DER%\n";
  out += pad(name.empty() ? "-" : name, 16) + pad(numio::format_fixed(b.miss, 3), 10) +
         pad(numio::format_fixed(b.false_alarm, 3), 10) +
         pad(numio::format_fixed(b.confusion, 3), 10) +
         pad(numio::format_fixed(b.total_ref, 3), 10) + format_percent(b.der) + "\n";
  return out;
}

inline std::string render_tcpwer_table(const std::string& name, const tcpwer::TcpWerReport& r) {
  std::string out;
  out += pad("file", 16) + pad("sub", 8) + pad("del", 8) + pad("ins", 8) + pad("ref", 8) +
         "tcpWER%\n";
  out += pad(name.empty() ? "-" : name, 16) + pad(std::to_string(r.substitutions), 8) +
         pad(std::to_string(r.deletions), 8) + pad(std::to_string(r.insertions), 8) +
         pad(std::to_string(r.ref_words), 8) + format_percent(r.tcpwer) + "\n";
  return out;
}

inline std::string render_rouge_table(const std::string& name,
                                      const textmetrics::RougeScore& r1,
                                      const textmetrics::RougeScore& rl) {
  std::string out;
  out += pad("file", 16) + pad("R1-P", 8) + pad("R1-R", 8) + pad("R1-F1", 8) + pad("RL-P", 8) +
         pad("RL-R", 8) + "RL-F1\n";
  out += pad(name.empty() ? "-" : name, 16) + pad(format_ratio(r1.precision), 8) +
         pad(format_ratio(r1.recall), 8) + pad(format_ratio(r1.f1), 8) +
         pad(format_ratio(rl.precision), 8) + pad(format_ratio(rl.recall), 8) +
         format_ratio(rl.f1) + "\n";
  return out;
}

}  // namespace dialkit::report
