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
// Interchange formats: RTTM timelines, word-record and transcript JSONL,
// condition strings. See docs/FORMATS.md for the exact field inventory.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dialkit/errors.hpp"
#include "dialkit/numio.hpp"
#include "dialkit/utf8.hpp"

namespace dialkit::segio {

struct Segment {
  double onset = 0.0;
  double duration = 0.0;
  std::string speaker;

  double end() const { return onset + duration; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

inline void validate(const Segment& s, std::size_t line = 0) {
  if (!(s.duration > 0.0)) {
    throw ValidationError("segment duration must be > 0" +
                          (line ? " (line " + std::to_string(line) + ")" : std::string()));
  }
  if (s.onset < 0.0) {
    throw ValidationError("segment onset must be >= 0" +
                          (line ? " (line " + std::to_string(line) + ")" : std::string()));
  }
  if (s.speaker.empty()) {
    throw ValidationError("segment speaker label must be non-empty" +
                          (line ? " (line " + std::to_string(line) + ")" : std::string()));
  }
}

/// Ordered list of speaker-labeled segments for one recording. Sorted by
/// (onset, speaker, duration) after every mutation.
class Timeline {
 public:
  Timeline() = default;
  explicit Timeline(std::string file_id) : file_id_(std::move(file_id)) {}

  static bool order(const Segment& a, const Segment& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    if (a.speaker != b.speaker) return a.speaker < b.speaker;
    return a.duration < b.duration;
  }

  void add(Segment s) {
    validate(s);
    auto it = std::upper_bound(segments_.begin(), segments_.end(), s, order);
    segments_.insert(it, std::move(s));
  }

  const std::string& file_id() const { return file_id_; }
  void set_file_id(std::string id) { file_id_ = std::move(id); }
  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }

  /// Sum of segment durations, counting overlapped time multiply.
  double total_duration() const {
    double total = 0.0;
    for (const auto& s : segments_) total += s.duration;
    return total;
  }

  std::vector<std::string> speakers() const {
    std::vector<std::string> out;
    for (const auto& s : segments_) out.push_back(s.speaker);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  friend bool operator==(const Timeline&, const Timeline&) = default;

 private:
  std::string file_id_;
  std::vector<Segment> segments_;
};

struct TimedWord {
  std::string word;
  double onset = 0.0;
  double offset = 0.0;
  std::string speaker;

  friend bool operator==(const TimedWord&, const TimedWord&) = default;
};

/// Time-stamped word sequence attributed to one speaker, sorted by onset.
struct SpeakerWordStream {
  std::string speaker;
  std::vector<TimedWord> words;
  // True when per-word times were inherited from parent segments rather
  // than measured; such streams get pseudo word timing before alignment.
  bool segment_timed = false;
};

struct TranscriptSegment {
  int index = 0;
  std::string speaker;
  std::string text;
  double onset = 0.0;
  double offset = 0.0;

  friend bool operator==(const TranscriptSegment&, const TranscriptSegment&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename LineFn>
inline void for_each_line(std::string_view text, LineFn&& fn) {
  text = utf8::strip_bom(text);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    fn(line, line_no);
    if (eol == text.size()) break;
    pos = eol + 1;
  }
}

inline nlohmann::json parse_json_line(std::string_view line, std::size_t line_no) {
  nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    throw ParseError("expected a JSON object", line_no);
  }
  return record;
}

inline double require_number(const nlohmann::json& record, const char* key,
                             std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_number()) {
    throw ValidationError("line " + std::to_string(line_no) + ": missing numeric field '" +
                          key + "'");
  }
  return it->get<double>();
}

inline std::string require_string(const nlohmann::json& record, const char* key,
                                  std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw ValidationError("line " + std::to_string(line_no) + ": missing field '" + key +
                          "'");
  }
  return it->get<std::string>();
}

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// RTTM
// ---------------------------------------------------------------------------

/// Parses RTTM text into per-file timelines, sorted by file id.
/// Line format: SPEAKER <file> <chan> <onset> <dur> <NA> <NA> <speaker> <NA> [<NA>]
inline std::vector<Timeline> parse_rttm_files(std::string_view text) {
  std::map<std::string, Timeline> by_file;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = detail::split_ws(line);
    if (fields.empty()) return;
    if (fields[0] != "SPEAKER" || fields.size() < 9) {
      throw ParseError("expected 'SPEAKER' line with >= 9 fields", line_no);
    }
    Segment seg;
    seg.onset = numio::parse_double(fields[3], line_no);
    seg.duration = numio::parse_double(fields[4], line_no);
    seg.speaker = std::string(fields[7]);
    const std::string file_id(fields[1]);
    try {
      validate(seg, line_no);
    } catch (const ValidationError&) {
      throw;
    }
    auto [it, inserted] = by_file.try_emplace(file_id, Timeline(file_id));
    it->second.add(std::move(seg));
  });
  std::vector<Timeline> out;
  out.reserve(by_file.size());
  for (auto& [id, t] : by_file) out.push_back(std::move(t));
  return out;
}

/// Parses RTTM covering exactly one recording.
inline Timeline parse_rttm(std::string_view text) {
  auto files = parse_rttm_files(text);
  if (files.empty()) return Timeline();
  if (files.size() > 1) {
    throw ValidationError("RTTM covers " + std::to_string(files.size()) +
                          " recordings where one was expected");
  }
  return std::move(files.front());
}

/// Emits RTTM with onset/duration at fixed 3-decimal precision.
/// parse_rttm(emit_rttm(t)) == t for timelines on the millisecond grid.
inline std::string emit_rttm(const Timeline& t) {
  std::string out;
  const std::string file_id = t.file_id().empty() ? "<NA>" : t.file_id();
  for (const auto& s : t.segments()) {
    out += "SPEAKER ";
    out += file_id;
    out += " 1 ";
    out += numio::format_fixed(s.onset, 3);
    out += ' ';
    out += numio::format_fixed(s.duration, 3);
    out += " <NA> <NA> ";
    out += s.speaker;
    out += " <NA> <NA>\n";
  }
  return out;
}

inline std::string emit_rttm(const std::vector<Timeline>& files) {
  std::string out;
  for (const auto& t : files) out += emit_rttm(t);
  return out;
}

// ---------------------------------------------------------------------------
// Word records (JSONL)
// ---------------------------------------------------------------------------

/// Parses word records {"word","speaker","onset","offset"} into per-speaker
/// streams sorted by onset (stable on ties), streams ordered by speaker.
inline std::vector<SpeakerWordStream> parse_word_stream(std::string_view text) {
  std::map<std::string, SpeakerWordStream> by_speaker;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (detail::trim(line).empty()) return;
    const auto record = detail::parse_json_line(line, line_no);
    TimedWord w;
    w.word = detail::trim(detail::require_string(record, "word", line_no));
    if (w.word.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": empty word");
    }
    w.speaker = detail::require_string(record, "speaker", line_no);
    if (!record.contains("onset") || !record.contains("offset")) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": word record missing onset/offset and no parent segment");
    }
    w.onset = detail::require_number(record, "onset", line_no);
    w.offset = detail::require_number(record, "offset", line_no);
    if (w.offset < w.onset) {
      throw ValidationError("line " + std::to_string(line_no) + ": offset < onset");
    }
    auto [it, inserted] = by_speaker.try_emplace(w.speaker);
    it->second.speaker = w.speaker;
    it->second.words.push_back(std::move(w));
  });
  std::vector<SpeakerWordStream> out;
  for (auto& [speaker, stream] : by_speaker) {
    std::stable_sort(stream.words.begin(), stream.words.end(),
                     [](const TimedWord& a, const TimedWord& b) { return a.onset < b.onset; });
    out.push_back(std::move(stream));
  }
  return out;
}

inline std::string emit_word_stream(const std::vector<SpeakerWordStream>& streams) {
  std::string out;
  for (const auto& stream : streams) {
    for (const auto& w : stream.words) {
      nlohmann::json record{
          {"word", w.word}, {"speaker", stream.speaker}, {"onset", w.onset}, {"offset", w.offset}};
      out += record.dump();
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transcripts (JSONL)
// ---------------------------------------------------------------------------

/// Parses transcript records {"speaker","text","onset","offset"[,"index"]}.
/// Re-indexes contiguously from 0 in document order. Explicit indices out of
/// document order raise a ValidationError when strict, otherwise the records
/// are reordered by index first. Duplicate explicit indices always raise.
inline std::vector<TranscriptSegment> parse_transcript(std::string_view text,
                                                       bool strict = true) {
  std::vector<TranscriptSegment> out;
  std::vector<int> explicit_indices;
  bool any_explicit = false;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (detail::trim(line).empty()) return;
    const auto record = detail::parse_json_line(line, line_no);
    TranscriptSegment seg;
    seg.speaker = detail::require_string(record, "speaker", line_no);
    auto text_it = record.find("text");
    if (text_it == record.end() || !text_it->is_string()) {
      throw ValidationError("line " + std::to_string(line_no) + ": missing field 'text'");
    }
    seg.text = text_it->get<std::string>();
    seg.onset = detail::require_number(record, "onset", line_no);
    seg.offset = detail::require_number(record, "offset", line_no);
    if (seg.offset < seg.onset) {
      throw ValidationError("line " + std::to_string(line_no) + ": offset < onset");
    }
    if (auto it = record.find("index"); it != record.end()) {
      if (!it->is_number_integer()) {
        throw ValidationError("line " + std::to_string(line_no) + ": non-integer index");
      }
      any_explicit = true;
      explicit_indices.push_back(it->get<int>());
    } else {
      explicit_indices.push_back(-1);
    }
    out.push_back(std::move(seg));
  });

  if (any_explicit) {
    std::vector<int> seen;
    for (int idx : explicit_indices) {
      if (idx >= 0) seen.push_back(idx);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw ValidationError("duplicate explicit transcript indices");
    }
    const bool ordered = std::is_sorted(explicit_indices.begin(), explicit_indices.end(),
                                        [](int a, int b) { return a < b; });
    if (!ordered) {
      if (strict) {
        throw ValidationError("explicit transcript indices out of document order");
      }
      std::vector<std::size_t> perm(out.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return explicit_indices[a] < explicit_indices[b];
      });
      std::vector<TranscriptSegment> reordered;
      reordered.reserve(out.size());
      for (std::size_t i : perm) reordered.push_back(std::move(out[i]));
      out = std::move(reordered);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i);
  return out;
}

inline std::string emit_transcript(const std::vector<TranscriptSegment>& segments) {
  std::string out;
  for (const auto& seg : segments) {
    nlohmann::json record{{"index", seg.index},
                          {"speaker", seg.speaker},
                          {"text", seg.text},
                          {"onset", seg.onset},
                          {"offset", seg.offset}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Condition strings (JSONL, one record per dialogue)
// ---------------------------------------------------------------------------

struct ConditionRecord {
  std::string id;
  std::string text;

  friend bool operator==(const ConditionRecord&, const ConditionRecord&) = default;
};

inline std::vector<ConditionRecord> parse_conditions(std::string_view text) {
  std::vector<ConditionRecord> out;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (detail::trim(line).empty()) return;
    const auto record = detail::parse_json_line(line, line_no);
    ConditionRecord rec;
    rec.id = detail::require_string(record, "id", line_no);
    auto it = record.find("text");
    if (it == record.end() || !it->is_string()) {
      throw ValidationError("line " + std::to_string(line_no) + ": missing field 'text'");
    }
    rec.text = it->get<std::string>();
    out.push_back(std::move(rec));
  });
  return out;
}

inline std::string emit_conditions(const std::vector<ConditionRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    nlohmann::json record{{"id", rec.id}, {"text", rec.text}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace dialkit::segio
