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
// Bidirectional codec between per-frame multilabel speaker activity and
// powerset class indices. Classes are ordered canonically: subsets sorted
// by cardinality, then lexicographically by ascending speaker indices,
// with class 0 the empty set. External posterior files must conform to
// this ordering (docs/FORMATS.md).

#pragma once

#include <cmath>
#include <cstring>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "dialkit/errors.hpp"
#include "dialkit/numio.hpp"

namespace dialkit::powerset {

struct PowersetConfig {
  int num_speakers = 2;     // K
  int max_simultaneous = 2; // M, 1 <= M <= K

  friend bool operator==(const PowersetConfig&, const PowersetConfig&) = default;
};

inline void validate(const PowersetConfig& cfg) {
  if (cfg.num_speakers < 1) {
    throw ValidationError("powerset: num_speakers must be >= 1");
  }
  if (cfg.max_simultaneous < 1 || cfg.max_simultaneous > cfg.num_speakers) {
    throw ValidationError("powerset: max_simultaneous must be in [1, num_speakers]");
  }
}

inline uint64_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  uint64_t result = 1;
  for (int i = 0; i < k; ++i) {
    result = result * static_cast<uint64_t>(n - i) / static_cast<uint64_t>(i + 1);
  }
  return result;
}

/// Number of classes: sum over cardinalities 0..M of C(K, i).
inline uint64_t class_count(const PowersetConfig& cfg) {
  validate(cfg);
  uint64_t total = 0;
  for (int i = 0; i <= cfg.max_simultaneous; ++i) {
    total += choose(cfg.num_speakers, i);
  }
  return total;
}

/// Maps a K-dim binary activity vector to its class index.
inline uint64_t encode(const std::vector<uint8_t>& active, const PowersetConfig& cfg) {
  validate(cfg);
  if (active.size() != static_cast<std::size_t>(cfg.num_speakers)) {
    throw ShapeError("powerset: activity vector length != num_speakers");
  }
  std::vector<int> members;
  for (int s = 0; s < cfg.num_speakers; ++s) {
    if (active[s]) members.push_back(s);
  }
  const int cardinality = static_cast<int>(members.size());
  if (cardinality > cfg.max_simultaneous) {
    throw ValidationError("powerset: " + std::to_string(cardinality) +
                          " simultaneous speakers exceed max_simultaneous " +
                          std::to_string(cfg.max_simultaneous));
  }
  uint64_t index = 0;
  for (int i = 0; i < cardinality; ++i) {
    index += choose(cfg.num_speakers, i);
  }
  // Lexicographic rank of the member set among all C(K, c) combinations.
  int prev = -1;
  for (int j = 0; j < cardinality; ++j) {
    for (int v = prev + 1; v < members[j]; ++v) {
      index += choose(cfg.num_speakers - 1 - v, cardinality - 1 - j);
    }
    prev = members[j];
  }
  return index;
}

/// Inverse of encode.
inline std::vector<uint8_t> decode(uint64_t index, const PowersetConfig& cfg) {
  const uint64_t total = class_count(cfg);
  if (index >= total) {
    throw ValidationError("powerset: class index " + std::to_string(index) +
                          " out of range [0, " + std::to_string(total) + ")");
  }
  int cardinality = 0;
  uint64_t remaining = index;
  while (remaining >= choose(cfg.num_speakers, cardinality)) {
    remaining -= choose(cfg.num_speakers, cardinality);
    ++cardinality;
  }
  std::vector<uint8_t> active(static_cast<std::size_t>(cfg.num_speakers), 0);
  int v = 0;
  for (int j = 0; j < cardinality; ++j) {
    for (;; ++v) {
      const uint64_t with_v = choose(cfg.num_speakers - 1 - v, cardinality - 1 - j);
      if (remaining < with_v) {
        active[v] = 1;
        ++v;
        break;
      }
      remaining -= with_v;
    }
  }
  return active;
}

/// Per-frame multi-speaker activity on a fixed frame grid, row-major
/// frames x num_speakers, values in [0, 1].
struct FrameActivity {
  int num_speakers = 0;
  double frame_duration = 0.02;
  double start_time = 0.0;
  std::vector<float> values;

  std::size_t frames() const {
    return num_speakers > 0 ? values.size() / static_cast<std::size_t>(num_speakers) : 0;
  }
  float at(std::size_t frame, int speaker) const {
    return values[frame * static_cast<std::size_t>(num_speakers) +
                  static_cast<std::size_t>(speaker)];
  }
  float& at(std::size_t frame, int speaker) {
    return values[frame * static_cast<std::size_t>(num_speakers) +
                  static_cast<std::size_t>(speaker)];
  }
  double end_time() const {
    return start_time + static_cast<double>(frames()) * frame_duration;
  }
};

/// Dense per-frame class posteriors, row-major frames x num_classes.
struct PosteriorGrid {
  int num_classes = 0;
  double frame_duration = 0.02;
  std::vector<float> values;

  std::size_t frames() const {
    return num_classes > 0 ? values.size() / static_cast<std::size_t>(num_classes) : 0;
  }
  float at(std::size_t frame, int cls) const {
    return values[frame * static_cast<std::size_t>(num_classes) + static_cast<std::size_t>(cls)];
  }
};

/// Per-frame argmax over classes (ties to the lowest class index), decoded
/// to binary speaker activity.
inline FrameActivity decode_frames(const PosteriorGrid& grid, const PowersetConfig& cfg,
                                   double start_time = 0.0) {
  const uint64_t classes = class_count(cfg);
  if (grid.num_classes != static_cast<int>(classes)) {
    throw ShapeError("powerset: posterior rows have " + std::to_string(grid.num_classes) +
                     " classes, config implies " + std::to_string(classes));
  }
  FrameActivity activity;
  activity.num_speakers = cfg.num_speakers;
  activity.frame_duration = grid.frame_duration;
  activity.start_time = start_time;
  const std::size_t frames = grid.frames();
  activity.values.resize(frames * static_cast<std::size_t>(cfg.num_speakers), 0.0f);
  for (std::size_t f = 0; f < frames; ++f) {
    int best = 0;
    float best_value = -std::numeric_limits<float>::infinity();
    for (int c = 0; c < grid.num_classes; ++c) {
      const float v = grid.at(f, c);
      if (!std::isfinite(v)) {
        throw ValidationError("powerset: non-finite posterior at frame " + std::to_string(f));
      }
      if (v > best_value) {
        best_value = v;
        best = c;
      }
    }
    const auto active = decode(static_cast<uint64_t>(best), cfg);
    for (int s = 0; s < cfg.num_speakers; ++s) {
      activity.at(f, s) = active[s] ? 1.0f : 0.0f;
    }
  }
  return activity;
}

// ---------------------------------------------------------------------------
// Posterior file formats (docs/FORMATS.md). Binary layout, little endian:
//   "DKPF" magic, u32 version, u32 K, u32 M, f64 frame_duration, u64 frames,
//   then frames * class_count float32 values.
// Text layout: header line "powerset K M frame_duration frames", then one
// whitespace-separated row of class_count values per frame.
// ---------------------------------------------------------------------------

inline constexpr char kPosteriorMagic[4] = {'D', 'K', 'P', 'F'};

struct PosteriorFile {
  PowersetConfig config;
  PosteriorGrid grid;
};

inline void save_posteriors_binary(const std::filesystem::path& path,
                                   const PowersetConfig& cfg, const PosteriorGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kPosteriorMagic, 4);
  const uint32_t version = 1;
  const uint32_t k = static_cast<uint32_t>(cfg.num_speakers);
  const uint32_t m = static_cast<uint32_t>(cfg.max_simultaneous);
  const double fd = grid.frame_duration;
  const uint64_t frames = grid.frames();
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&k), sizeof k);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&fd), sizeof fd);
  out.write(reinterpret_cast<const char*>(&frames), sizeof frames);
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(float)));
  if (!out) throw IoError("short write to " + path.string());
}

inline void save_posteriors_text(const std::filesystem::path& path, const PowersetConfig& cfg,
                                 const PosteriorGrid& grid) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "powerset " << cfg.num_speakers << ' ' << cfg.max_simultaneous << ' '
      << numio::format_fixed(grid.frame_duration, 6) << ' ' << grid.frames() << '\n';
  for (std::size_t f = 0; f < grid.frames(); ++f) {
    for (int c = 0; c < grid.num_classes; ++c) {
      if (c > 0) out << ' ';
      out << numio::format_fixed(grid.at(f, c), 6);
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to " + path.string());
}

inline PosteriorFile load_posteriors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  PosteriorFile file;
  if (content.size() >= 4 && content.compare(0, 4, kPosteriorMagic, 4) == 0) {
    const char* p = content.data() + 4;
    const char* end = content.data() + content.size();
    auto read = [&](auto& value) {
      if (p + sizeof value > end) throw IoError("truncated posterior file " + path.string());
      std::memcpy(&value, p, sizeof value);
      p += sizeof value;
    };
    uint32_t version = 0, k = 0, m = 0;
    double fd = 0.0;
    uint64_t frames = 0;
    read(version);
    if (version != 1) throw IoError("unsupported posterior file version in " + path.string());
    read(k);
    read(m);
    read(fd);
    read(frames);
    file.config.num_speakers = static_cast<int>(k);
    file.config.max_simultaneous = static_cast<int>(m);
    validate(file.config);
    file.grid.num_classes = static_cast<int>(class_count(file.config));
    file.grid.frame_duration = fd;
    const std::size_t count = static_cast<std::size_t>(frames) *
                              static_cast<std::size_t>(file.grid.num_classes);
    if (static_cast<std::size_t>(end - p) < count * sizeof(float)) {
      throw IoError("truncated posterior file " + path.string());
    }
    file.grid.values.resize(count);
    std::memcpy(file.grid.values.data(), p, count * sizeof(float));
    return file;
  }

  // Text grid.
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  uint64_t expected_frames = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!line.empty()) {
      std::size_t start = line.find_first_not_of(" \t");
      if (start != std::string_view::npos) {
        std::vector<std::string_view> tokens;
        std::size_t i = start;
        while (i < line.size()) {
          while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
          std::size_t j = i;
          while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
          if (j > i) tokens.push_back(line.substr(i, j - i));
          i = j;
        }
        if (!have_header) {
          if (tokens.size() != 5 || tokens[0] != "powerset") {
            throw ParseError("expected 'powerset K M frame_duration frames' header", line_no);
          }
          file.config.num_speakers = static_cast<int>(numio::parse_int(tokens[1], line_no));
          file.config.max_simultaneous = static_cast<int>(numio::parse_int(tokens[2], line_no));
          validate(file.config);
          file.grid.frame_duration = numio::parse_double(tokens[3], line_no);
          expected_frames = static_cast<uint64_t>(numio::parse_int(tokens[4], line_no));
          file.grid.num_classes = static_cast<int>(class_count(file.config));
          have_header = true;
        } else {
          if (tokens.size() != static_cast<std::size_t>(file.grid.num_classes)) {
            throw ParseError("posterior row has " + std::to_string(tokens.size()) +
                                 " values, expected " + std::to_string(file.grid.num_classes),
                             line_no);
          }
          for (auto tok : tokens) {
            file.grid.values.push_back(static_cast<float>(numio::parse_double(tok, line_no)));
          }
        }
      }
    }
    if (eol == content.size()) break;
    pos = eol + 1;
  }
  if (!have_header) throw ParseError("empty posterior file " + path.string(), 0);
  if (file.grid.frames() != expected_frames) {
    throw ParseError("posterior file declares " + std::to_string(expected_frames) +
                         " frames but carries " + std::to_string(file.grid.frames()),
                     0);
  }
  return file;
}

}  // namespace dialkit::powerset
