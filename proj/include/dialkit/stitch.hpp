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
// Global stitching of chunk-wise diarization: length-normalized speaker
// embeddings are clustered with seeded k-means, chunk-local speakers are
// relabeled to global clusters, and the merged frame activity is rendered
// into a segment timeline.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dialkit/errors.hpp"
#include "dialkit/powerset.hpp"
#include "dialkit/rng.hpp"
#include "dialkit/segio.hpp"

namespace dialkit::stitch {

using powerset::FrameActivity;

/// One inference chunk: local-speaker frame activity plus one embedding per
/// local speaker. Local speakers with zero active frames may omit their
/// embedding; such speakers are dropped at relabel time.
struct ChunkResult {
  int chunk_id = 0;
  double start_time = 0.0;
  FrameActivity activity;
  std::map<int, std::vector<double>> embeddings;  // local speaker -> vector
};

struct NormalizedVector {
  std::vector<double> values;
  bool was_zero = false;
};

/// Scales to unit Euclidean norm. A zero vector comes back unchanged with
/// the flag set.
inline NormalizedVector length_normalize(const std::vector<double>& v) {
  double sum_sq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("length_normalize: non-finite entry");
    sum_sq += x * x;
  }
  NormalizedVector out;
  out.values = v;
  if (sum_sq == 0.0) {
    out.was_zero = true;
    return out;
  }
  const double inv = 1.0 / std::sqrt(sum_sq);
  for (double& x : out.values) x *= inv;
  return out;
}

struct KmeansResult {
  std::vector<int> assignments;            // per input point
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
};

namespace detail {

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace detail

/// Lloyd iterations from seeded k-means++ initialization until the
/// assignment reaches a fixpoint or 300 iterations. A cluster that empties
/// is re-seeded at the point farthest from its previous centroid.
/// Deterministic given (points, k, seed).
inline KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                           uint64_t seed) {
  if (k < 1) throw ValidationError("kmeans: k must be >= 1");
  const std::size_t n = points.size();
  if (n < static_cast<std::size_t>(k)) {
    throw ValidationError("kmeans: " + std::to_string(n) + " points < k = " +
                          std::to_string(k));
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ShapeError("kmeans: points have mixed dimensions");
  }

  rng::Prng prng(seed);
  KmeansResult result;
  result.centroids.reserve(static_cast<std::size_t>(k));

  // k-means++ seeding.
  result.centroids.push_back(points[prng.next_index(n)]);
  std::vector<double> nearest_sq(n, 0.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = detail::squared_distance(points[i], result.centroids.front());
      for (std::size_t j = 1; j < result.centroids.size(); ++j) {
        best = std::min(best, detail::squared_distance(points[i], result.centroids[j]));
      }
      nearest_sq[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = prng.next_canonical() * total;
      double cumulative = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cumulative += nearest_sq[i];
        if (target < cumulative) {
          pick = i;
          break;
        }
      }
    } else {
      pick = prng.next_index(n);
    }
    result.centroids.push_back(points[pick]);
  }

  result.assignments.assign(n, -1);
  for (int iteration = 0; iteration < 300; ++iteration) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = detail::squared_distance(points[i], result.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = detail::squared_distance(points[i], result.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignments[i] != best) {
        result.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(result.assignments[i]);
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed at the farthest point from the previous centroid.
        std::size_t farthest = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = detail::squared_distance(points[i], result.centroids[c]);
          if (d > far_d) {
            far_d = d;
            farthest = i;
          }
        }
        result.centroids[c] = points[farthest];
      } else {
        for (std::size_t d = 0; d < dim; ++d) {
          result.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
      }
    }
  }

  result.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.inertia += detail::squared_distance(
        points[i], result.centroids[static_cast<std::size_t>(result.assignments[i])]);
  }
  return result;
}

/// Cluster labels for every embedded (chunk, local speaker), plus centroids
/// and inertia of the underlying k-means run.
struct ClusterAssignment {
  std::map<std::pair<int, int>, int> labels;  // (chunk_id, local speaker) -> cluster
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
};

/// Length-normalizes all embeddings in canonical (chunk_id, local speaker)
/// order and clusters them, so the partition does not depend on the input
/// chunk order.
inline ClusterAssignment cluster_chunks(const std::vector<ChunkResult>& chunks, int k,
                                        uint64_t seed,
                                        std::vector<std::string>* warnings = nullptr) {
  std::vector<std::pair<int, int>> keys;
  std::vector<std::vector<double>> points;
  std::vector<const ChunkResult*> ordered;
  ordered.reserve(chunks.size());
  for (const auto& c : chunks) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(),
            [](const ChunkResult* a, const ChunkResult* b) { return a->chunk_id < b->chunk_id; });
  for (const auto* chunk : ordered) {
    for (const auto& [local, vec] : chunk->embeddings) {
      auto normalized = length_normalize(vec);
      if (normalized.was_zero && warnings != nullptr) {
        warnings->push_back("chunk " + std::to_string(chunk->chunk_id) + " speaker " +
                            std::to_string(local) + ": zero-norm embedding left unscaled");
      }
      keys.emplace_back(chunk->chunk_id, local);
      points.push_back(std::move(normalized.values));
    }
  }
  const auto km = kmeans(points, k, seed);
  ClusterAssignment assignment;
  assignment.centroids = km.centroids;
  assignment.inertia = km.inertia;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    assignment.labels[keys[i]] = km.assignments[i];
  }
  return assignment;
}

/// Merges chunk-local activities into one global matrix over
/// [min start, max end]. Local speakers sharing a cluster within a chunk
/// merge by per-frame maximum; frames covered by several chunks average
/// their contributions. Local speakers without embeddings are dropped.
inline FrameActivity relabel(const std::vector<ChunkResult>& chunks,
                             const ClusterAssignment& assignment, int k,
                             std::vector<std::string>* warnings = nullptr) {
  if (chunks.empty()) throw ValidationError("relabel: no chunks");
  const double d = chunks.front().activity.frame_duration;
  double start = chunks.front().start_time;
  double end = start;
  for (const auto& c : chunks) {
    if (std::abs(c.activity.frame_duration - d) > 1e-9) {
      throw ValidationError("relabel: frame_duration mismatch across chunks");
    }
    start = std::min(start, c.start_time);
    end = std::max(end, c.start_time +
                            static_cast<double>(c.activity.frames()) * d);
  }
  const auto total_frames = static_cast<std::size_t>(std::llround((end - start) / d));

  std::vector<const ChunkResult*> ordered;
  ordered.reserve(chunks.size());
  for (const auto& c : chunks) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(),
            [](const ChunkResult* a, const ChunkResult* b) { return a->chunk_id < b->chunk_id; });

  std::vector<double> sums(total_frames * static_cast<std::size_t>(k), 0.0);
  std::vector<int> coverage(total_frames, 0);
  for (const auto* chunk : ordered) {
    const auto offset =
        static_cast<std::size_t>(std::llround((chunk->start_time - start) / d));
    const std::size_t frames = chunk->activity.frames();
    std::vector<float> merged(frames * static_cast<std::size_t>(k), 0.0f);
    for (int local = 0; local < chunk->activity.num_speakers; ++local) {
      auto emb = chunk->embeddings.find(local);
      if (emb == chunk->embeddings.end()) {
        bool any_active = false;
        for (std::size_t f = 0; f < frames && !any_active; ++f) {
          any_active = chunk->activity.at(f, local) > 0.0f;
        }
        if (any_active && warnings != nullptr) {
          warnings->push_back("chunk " + std::to_string(chunk->chunk_id) + " speaker " +
                              std::to_string(local) +
                              ": active frames dropped (no embedding)");
        }
        continue;
      }
      auto label = assignment.labels.find({chunk->chunk_id, local});
      if (label == assignment.labels.end()) {
        throw ValidationError("relabel: chunk " + std::to_string(chunk->chunk_id) +
                              " speaker " + std::to_string(local) +
                              " has no cluster assignment");
      }
      const auto cluster = static_cast<std::size_t>(label->second);
      for (std::size_t f = 0; f < frames; ++f) {
        auto& slot = merged[f * static_cast<std::size_t>(k) + cluster];
        slot = std::max(slot, chunk->activity.at(f, local));
      }
    }
    for (std::size_t f = 0; f < frames; ++f) {
      ++coverage[offset + f];
      for (int c = 0; c < k; ++c) {
        sums[(offset + f) * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] +=
            merged[f * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)];
      }
    }
  }

  FrameActivity global;
  global.num_speakers = k;
  global.frame_duration = d;
  global.start_time = start;
  global.values.resize(total_frames * static_cast<std::size_t>(k), 0.0f);
  for (std::size_t f = 0; f < total_frames; ++f) {
    if (coverage[f] == 0) continue;
    for (int c = 0; c < k; ++c) {
      global.values[f * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] =
          static_cast<float>(sums[f * static_cast<std::size_t>(k) +
                                  static_cast<std::size_t>(c)] /
                             static_cast<double>(coverage[f]));
    }
  }
  return global;
}

inline std::string default_speaker_name(int index) {
  std::string num = std::to_string(index);
  if (num.size() < 2) num.insert(0, 2 - num.size(), '0');
  return "spk" + num;
}

/// Renders maximal frame runs with value >= threshold into segments.
inline segio::Timeline to_timeline(const FrameActivity& activity, double threshold,
                                   const std::vector<std::string>& speaker_names = {},
                                   const std::string& file_id = {}) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("to_timeline: threshold must be in (0, 1)");
  }
  segio::Timeline timeline(file_id);
  const std::size_t frames = activity.frames();
  for (int s = 0; s < activity.num_speakers; ++s) {
    const std::string name = static_cast<std::size_t>(s) < speaker_names.size()
                                 ? speaker_names[static_cast<std::size_t>(s)]
                                 : default_speaker_name(s);
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t f = 0; f <= frames; ++f) {
      const bool active = f < frames && activity.at(f, s) >= threshold;
      if (active && !in_run) {
        in_run = true;
        run_start = f;
      } else if (!active && in_run) {
        in_run = false;
        segio::Segment seg;
        seg.onset = activity.start_time + static_cast<double>(run_start) * activity.frame_duration;
        seg.duration = static_cast<double>(f - run_start) * activity.frame_duration;
        seg.speaker = name;
        timeline.add(std::move(seg));
      }
    }
  }
  return timeline;
}

/// Bridges same-speaker gaps shorter than max_gap, then drops segments
/// shorter than min_duration, in that order. Idempotent.
inline segio::Timeline filter_segments(const segio::Timeline& timeline, double min_duration,
                                       double max_gap) {
  if (min_duration < 0.0 || max_gap < 0.0) {
    throw ValidationError("filter_segments: min_duration and max_gap must be >= 0");
  }
  std::map<std::string, std::vector<segio::Segment>> by_speaker;
  for (const auto& seg : timeline.segments()) by_speaker[seg.speaker].push_back(seg);

  segio::Timeline out(timeline.file_id());
  for (auto& [speaker, segments] : by_speaker) {
    std::vector<segio::Segment> bridged;
    for (const auto& seg : segments) {
      if (!bridged.empty() && seg.onset - bridged.back().end() < max_gap) {
        auto& prev = bridged.back();
        prev.duration = std::max(prev.end(), seg.end()) - prev.onset;
      } else {
        bridged.push_back(seg);
      }
    }
    for (const auto& seg : bridged) {
      if (seg.duration < min_duration) continue;
      out.add(seg);
    }
  }
  return out;
}

struct StitchConfig {
  int k = 2;
  uint64_t seed = 0;
  double threshold = 0.5;
  double min_duration = 0.4;
  double max_gap = 0.0;  // bridging disabled by default
  std::vector<std::string> speaker_names;
  std::string file_id;
};

/// Full stitch: normalize + cluster embeddings, relabel chunks, render the
/// timeline, filter fragments.
inline segio::Timeline stitch_pipeline(const std::vector<ChunkResult>& chunks,
                                       const StitchConfig& config,
                                       std::vector<std::string>* warnings = nullptr) {
  if (chunks.empty()) throw ValidationError("stitch: chunk list is empty");
  const auto assignment = cluster_chunks(chunks, config.k, config.seed, warnings);
  const auto global = relabel(chunks, assignment, config.k, warnings);
  auto timeline = to_timeline(global, config.threshold, config.speaker_names, config.file_id);
  return filter_segments(timeline, config.min_duration, config.max_gap);
}

// ---------------------------------------------------------------------------
// Chunk bundle layout on disk (docs/FORMATS.md): a manifest.json listing
// per-chunk posterior and embedding files, paths relative to the manifest.
// ---------------------------------------------------------------------------

struct ManifestEntry {
  int chunk_id = 0;
  double start_time = 0.0;
  std::string posteriors;
  std::string embeddings;
};

struct Manifest {
  std::string file_id;
  powerset::PowersetConfig powerset_config;
  double frame_duration = 0.02;
  std::vector<ManifestEntry> chunks;
};

inline Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("manifest is not a JSON object: " + path.string());
  }
  Manifest manifest;
  manifest.file_id = doc.value("file_id", std::string{});
  manifest.powerset_config.num_speakers = doc.value("num_speakers", 2);
  manifest.powerset_config.max_simultaneous = doc.value("max_simultaneous", 2);
  powerset::validate(manifest.powerset_config);
  manifest.frame_duration = doc.value("frame_duration", 0.02);
  if (!doc.contains("chunks") || !doc["chunks"].is_array()) {
    throw ParseError("manifest missing 'chunks' array: " + path.string());
  }
  for (const auto& entry : doc["chunks"]) {
    ManifestEntry e;
    e.chunk_id = entry.at("chunk_id").get<int>();
    e.start_time = entry.at("start_time").get<double>();
    e.posteriors = entry.at("posteriors").get<std::string>();
    e.embeddings = entry.at("embeddings").get<std::string>();
    manifest.chunks.push_back(std::move(e));
  }
  return manifest;
}

inline std::map<int, std::vector<double>> load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::map<int, std::vector<double>> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> values;
    int local = -1;
    std::size_t pos = 0;
    bool first = true;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      if (end == pos) break;
      const std::string_view token(line.data() + pos, end - pos);
      if (first) {
        local = static_cast<int>(numio::parse_int(token, line_no));
        first = false;
      } else {
        values.push_back(numio::parse_double(token, line_no));
      }
      pos = end;
    }
    if (first || values.empty()) {
      throw ParseError("embedding line needs '<local_id> v0 v1 ...'", line_no);
    }
    if (dim == 0) dim = values.size();
    if (values.size() != dim) {
      throw ValidationError("embedding dimension mismatch in " + path.string());
    }
    out[local] = std::move(values);
  }
  return out;
}

inline void save_embeddings(const std::filesystem::path& path,
                            const std::map<int, std::vector<double>>& embeddings) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [local, values] : embeddings) {
    out << local;
    char buffer[64];
    for (double v : values) {
      auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
      out << ' ' << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer));
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to " + path.string());
}

/// Loads and powerset-decodes every chunk listed in a manifest.
inline std::vector<ChunkResult> load_chunks(const std::filesystem::path& manifest_path) {
  const auto manifest = load_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  std::vector<ChunkResult> chunks;
  chunks.reserve(manifest.chunks.size());
  for (const auto& entry : manifest.chunks) {
    auto posteriors = powerset::load_posteriors(base / entry.posteriors);
    if (posteriors.config != manifest.powerset_config) {
      throw ValidationError("chunk " + std::to_string(entry.chunk_id) +
                            ": posterior file powerset config disagrees with manifest");
    }
    if (std::abs(posteriors.grid.frame_duration - manifest.frame_duration) > 1e-9) {
      throw ValidationError("chunk " + std::to_string(entry.chunk_id) +
                            ": frame_duration disagrees with manifest");
    }
    ChunkResult chunk;
    chunk.chunk_id = entry.chunk_id;
    chunk.start_time = entry.start_time;
    chunk.activity =
        powerset::decode_frames(posteriors.grid, posteriors.config, entry.start_time);
    chunk.embeddings = load_embeddings(base / entry.embeddings);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

}  // namespace dialkit::stitch
