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
// Seeded generator of dyadic conversations (timeline, chunked activity,
// embeddings, word streams) plus controlled perturbation, for model-free
// end-to-end validation. A four-state activity chain
// {silence, spk0, spk1, both} draws exponential dwell times whose means are
// proportional to the target occupancy of each state; with uniform
// transitions the stationary occupancy then matches the configured
// proportions. All times land on the frame grid, so the exported chunks
// reproduce the truth timeline exactly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialkit/errors.hpp"
#include "dialkit/powerset.hpp"
#include "dialkit/rng.hpp"
#include "dialkit/segio.hpp"
#include "dialkit/stitch.hpp"
#include "dialkit/tcpwer.hpp"

namespace dialkit::synth {

inline constexpr double kFrameDuration = 0.02;
inline constexpr double kChunkSeconds = 10.0;
inline constexpr std::size_t kChunkFrames = 500;
inline constexpr double kWordSpacing = 0.35;
inline constexpr int kVocabSize = 400;
inline constexpr int kConditionTokens = 6;

struct SynthConfig {
  double duration = 1800.0;
  double p_single = 0.8430;
  double p_silence = 0.1135;
  double p_overlap = 0.0435;
  double mean_turn = 2.0;
  int embedding_dim = 16;
  double cluster_separation = 10.0;
  uint64_t seed = 0;
  std::vector<std::string> lexicon;  // empty -> synthetic w### tokens
};

struct PerturbConfig {
  double boundary_jitter_sd = 0.0;  // seconds
  double label_flip_rate = 0.0;
  double word_sub_rate = 0.0;
  uint64_t seed = 0;
};

/// Transcript-centric view of one conversation; the timeline and word
/// streams derive from it.
struct Dialogue {
  std::string id;
  std::vector<segio::TranscriptSegment> segments;
  std::string conditions;
};

struct SynthOutput {
  Dialogue dialogue;
  segio::Timeline truth;
  std::vector<stitch::ChunkResult> chunks;
};

struct PerturbMask {
  std::vector<int> flipped_segments;  // indices into the truth transcript
  double flipped_duration = 0.0;      // seconds, before any jitter
  int64_t substituted_words = 0;
  int64_t total_words = 0;
};

struct PerturbResult {
  Dialogue dialogue;
  PerturbMask mask;
};

inline segio::Timeline timeline_of(const Dialogue& dialogue) {
  segio::Timeline timeline(dialogue.id);
  for (const auto& seg : dialogue.segments) {
    segio::Segment s;
    s.onset = seg.onset;
    s.duration = seg.offset - seg.onset;
    s.speaker = seg.speaker;
    timeline.add(std::move(s));
  }
  return timeline;
}

inline std::vector<segio::SpeakerWordStream> streams_of(const Dialogue& dialogue) {
  return tcpwer::streams_from_transcript(dialogue.segments);
}

namespace detail {

inline std::string vocab_token(int id) {
  std::string num = std::to_string(id);
  if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
  return "w" + num;
}

inline std::string draw_token(rng::Prng& prng, const std::vector<std::string>& lexicon) {
  if (!lexicon.empty()) return lexicon[prng.next_index(lexicon.size())];
  return vocab_token(static_cast<int>(prng.next_index(kVocabSize)));
}

}  // namespace detail

inline void validate(const SynthConfig& cfg) {
  if (!(cfg.duration > 0.0)) throw ValidationError("synth: duration must be > 0");
  if (cfg.p_single < 0.0 || cfg.p_silence < 0.0 || cfg.p_overlap < 0.0) {
    throw ValidationError("synth: proportions must be >= 0");
  }
  const double sum = cfg.p_single + cfg.p_silence + cfg.p_overlap;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("synth: proportions must sum to 1");
  }
  if (!(cfg.mean_turn > 0.0)) throw ValidationError("synth: mean_turn must be > 0");
  if (cfg.embedding_dim < 1) throw ValidationError("synth: embedding_dim must be >= 1");
  if (cfg.cluster_separation < 0.0) {
    throw ValidationError("synth: cluster_separation must be >= 0");
  }
}

inline SynthOutput gen_conversation(const SynthConfig& cfg, const std::string& id = "dlg000") {
  validate(cfg);
  rng::Prng prng(cfg.seed);

  const auto total_frames =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.duration / kFrameDuration)));

  // State chain: 0 silence, 1 spk0, 2 spk1, 3 both.
  const double targets[4] = {cfg.p_silence, cfg.p_single / 2.0, cfg.p_single / 2.0,
                             cfg.p_overlap};
  const double anchor = std::max({targets[0], targets[1], targets[2], targets[3]});
  double dwell_mean[4];
  for (int s = 0; s < 4; ++s) dwell_mean[s] = cfg.mean_turn * targets[s] / anchor;

  int state = 0;
  {
    const double u = prng.next_canonical();
    double cumulative = 0.0;
    for (int s = 0; s < 4; ++s) {
      cumulative += targets[s];
      if (u < cumulative) {
        state = s;
        break;
      }
    }
    if (targets[state] <= 0.0) {
      for (int s = 0; s < 4; ++s) {
        if (targets[s] > 0.0) state = s;
      }
    }
  }

  std::vector<uint8_t> active0(total_frames, 0);
  std::vector<uint8_t> active1(total_frames, 0);
  std::size_t frame = 0;
  while (frame < total_frames) {
    const auto dwell_frames = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(prng.next_exponential(dwell_mean[state]) / kFrameDuration)));
    const std::size_t until = std::min(total_frames, frame + dwell_frames);
    const uint8_t a0 = state == 1 || state == 3;
    const uint8_t a1 = state == 2 || state == 3;
    for (; frame < until; ++frame) {
      active0[frame] = a0;
      active1[frame] = a1;
    }
    // Uniform transition among the other reachable states.
    std::vector<int> candidates;
    for (int s = 0; s < 4; ++s) {
      if (s != state && targets[s] > 0.0) candidates.push_back(s);
    }
    if (candidates.empty()) break;
    state = candidates[prng.next_index(candidates.size())];
  }
  if (frame < total_frames) {
    const uint8_t a0 = state == 1 || state == 3;
    const uint8_t a1 = state == 2 || state == 3;
    for (; frame < total_frames; ++frame) {
      active0[frame] = a0;
      active1[frame] = a1;
    }
  }

  SynthOutput out;
  out.dialogue.id = id;
  out.truth.set_file_id(id);
  const std::string speaker_names[2] = {stitch::default_speaker_name(0),
                                        stitch::default_speaker_name(1)};
  for (int spk = 0; spk < 2; ++spk) {
    const auto& active = spk == 0 ? active0 : active1;
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t f = 0; f <= total_frames; ++f) {
      const bool on = f < total_frames && active[f] != 0;
      if (on && !in_run) {
        in_run = true;
        run_start = f;
      } else if (!on && in_run) {
        in_run = false;
        segio::Segment seg;
        seg.onset = static_cast<double>(run_start) * kFrameDuration;
        seg.duration = static_cast<double>(f - run_start) * kFrameDuration;
        seg.speaker = speaker_names[spk];
        out.truth.add(std::move(seg));
      }
    }
  }

  // Chunk export with a random local speaker permutation per chunk,
  // mirroring chunk-wise inference whose local labels carry no global
  // meaning.
  const std::size_t num_chunks = (total_frames + kChunkFrames - 1) / kChunkFrames;
  const double centers[2] = {-cfg.cluster_separation / 2.0, cfg.cluster_separation / 2.0};
  for (std::size_t c = 0; c < num_chunks; ++c) {
    const std::size_t begin = c * kChunkFrames;
    const std::size_t end = std::min(total_frames, begin + kChunkFrames);
    stitch::ChunkResult chunk;
    chunk.chunk_id = static_cast<int>(c);
    chunk.start_time = static_cast<double>(c) * kChunkSeconds;
    chunk.activity.num_speakers = 2;
    chunk.activity.frame_duration = kFrameDuration;
    chunk.activity.start_time = chunk.start_time;
    chunk.activity.values.resize((end - begin) * 2, 0.0f);

    const bool swapped = (prng.next_u64() & 1) != 0;
    const int global_of_local[2] = {swapped ? 1 : 0, swapped ? 0 : 1};
    for (std::size_t f = begin; f < end; ++f) {
      const uint8_t globals[2] = {active0[f], active1[f]};
      for (int local = 0; local < 2; ++local) {
        chunk.activity.at(f - begin, local) =
            globals[global_of_local[local]] ? 1.0f : 0.0f;
      }
    }
    for (int local = 0; local < 2; ++local) {
      bool any_active = false;
      for (std::size_t f = 0; f < end - begin && !any_active; ++f) {
        any_active = chunk.activity.at(f, local) > 0.0f;
      }
      if (!any_active) continue;
      const int global = global_of_local[local];
      std::vector<double> embedding(static_cast<std::size_t>(cfg.embedding_dim));
      for (auto& value : embedding) value = prng.next_normal();
      embedding[0] += centers[global];
      chunk.embeddings[local] = std::move(embedding);
    }
    out.chunks.push_back(std::move(chunk));
  }

  // Transcript: one segment per truth segment, evenly spoken words.
  std::map<std::string, int64_t> token_counts;
  for (const auto& seg : out.truth.segments()) {
    segio::TranscriptSegment t;
    t.index = static_cast<int>(out.dialogue.segments.size());
    t.speaker = seg.speaker;
    t.onset = seg.onset;
    t.offset = seg.end();
    const auto num_words =
        std::max<int64_t>(1, std::llround(seg.duration / kWordSpacing));
    std::string text;
    for (int64_t w = 0; w < num_words; ++w) {
      const std::string token = detail::draw_token(prng, cfg.lexicon);
      ++token_counts[token];
      if (!text.empty()) text += ' ';
      text += token;
    }
    t.text = std::move(text);
    out.dialogue.segments.push_back(std::move(t));
  }

  // Conditions: the most frequent tokens of the dialogue.
  std::vector<std::pair<std::string, int64_t>> ranked(token_counts.begin(),
                                                      token_counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::string conditions;
  for (std::size_t i = 0; i < ranked.size() && i < kConditionTokens; ++i) {
    if (!conditions.empty()) conditions += ' ';
    conditions += ranked[i].first;
  }
  out.dialogue.conditions = std::move(conditions);
  return out;
}

inline void validate(const PerturbConfig& cfg) {
  if (cfg.label_flip_rate < 0.0 || cfg.label_flip_rate > 1.0 || cfg.word_sub_rate < 0.0 ||
      cfg.word_sub_rate > 1.0) {
    throw ValidationError("perturb: rates must be in [0, 1]");
  }
  if (cfg.boundary_jitter_sd < 0.0) {
    throw ValidationError("perturb: boundary_jitter_sd must be >= 0");
  }
}

/// Applies seeded label flips, boundary jitter (quantized to the
/// millisecond grid, durations kept positive), and word substitutions.
/// Flips relabel both the segment and its words. The mask records exactly
/// what was applied.
inline PerturbResult perturb(const Dialogue& truth, const PerturbConfig& cfg) {
  validate(cfg);
  rng::Prng prng(cfg.seed);

  std::vector<std::string> speakers;
  for (const auto& seg : truth.segments) speakers.push_back(seg.speaker);
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()), speakers.end());

  PerturbResult result;
  result.dialogue.id = truth.id;
  result.dialogue.conditions = truth.conditions;
  for (const auto& seg : truth.segments) {
    segio::TranscriptSegment hyp = seg;

    if (speakers.size() > 1 && prng.next_bernoulli(cfg.label_flip_rate)) {
      const auto self =
          static_cast<std::size_t>(std::lower_bound(speakers.begin(), speakers.end(),
                                                    seg.speaker) -
                                   speakers.begin());
      std::size_t other = (self + 1) % speakers.size();
      if (speakers.size() > 2) {
        other = (self + 1 + prng.next_index(speakers.size() - 1)) % speakers.size();
      }
      hyp.speaker = speakers[other];
      result.mask.flipped_segments.push_back(seg.index);
      result.mask.flipped_duration += seg.offset - seg.onset;
    }

    if (cfg.boundary_jitter_sd > 0.0) {
      double onset = hyp.onset + prng.next_normal() * cfg.boundary_jitter_sd;
      double offset = hyp.offset + prng.next_normal() * cfg.boundary_jitter_sd;
      onset = std::max(0.0, onset);
      offset = std::max(onset + 0.01, offset);
      hyp.onset = static_cast<double>(std::llround(onset * 1000.0)) / 1000.0;
      hyp.offset = static_cast<double>(std::llround(offset * 1000.0)) / 1000.0;
      if (hyp.offset <= hyp.onset) hyp.offset = hyp.onset + 0.001;
    }

    if (cfg.word_sub_rate > 0.0) {
      std::string text;
      std::size_t i = 0;
      while (i < hyp.text.size()) {
        while (i < hyp.text.size() && hyp.text[i] == ' ') ++i;
        std::size_t j = i;
        while (j < hyp.text.size() && hyp.text[j] != ' ') ++j;
        if (j > i) {
          std::string token = hyp.text.substr(i, j - i);
          ++result.mask.total_words;
          if (prng.next_bernoulli(cfg.word_sub_rate)) {
            ++result.mask.substituted_words;
            if (token.size() == 4 && token[0] == 'w' &&
                std::all_of(token.begin() + 1, token.end(),
                            [](char c) { return c >= '0' && c <= '9'; })) {
              const int id = std::stoi(token.substr(1));
              const int next =
                  (id + 1 + static_cast<int>(prng.next_index(kVocabSize - 1))) % kVocabSize;
              token = detail::vocab_token(next);
            } else {
              token = "x" + token;
            }
          }
          if (!text.empty()) text += ' ';
          text += token;
        }
        i = j;
      }
      hyp.text = std::move(text);
    } else {
      std::size_t i = 0;
      while (i < hyp.text.size()) {
        while (i < hyp.text.size() && hyp.text[i] == ' ') ++i;
        std::size_t j = i;
        while (j < hyp.text.size() && hyp.text[j] != ' ') ++j;
        if (j > i) ++result.mask.total_words;
        i = j;
      }
    }

    result.dialogue.segments.push_back(std::move(hyp));
  }
  for (std::size_t i = 0; i < result.dialogue.segments.size(); ++i) {
    result.dialogue.segments[i].index = static_cast<int>(i);
  }
  return result;
}

// ---------------------------------------------------------------------------
// On-disk layout (docs/FORMATS.md): per dialogue <id>.rttm,
// <id>.transcript.jsonl, <id>.words.jsonl, <id>.conditions.jsonl, and a
// <id>/ chunk bundle with manifest.json for the stitcher.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace detail

inline void write_dialogue_files(const std::filesystem::path& dir, const Dialogue& dialogue,
                                 const segio::Timeline& timeline) {
  std::filesystem::create_directories(dir);
  detail::write_file(dir / (dialogue.id + ".rttm"), segio::emit_rttm(timeline));
  detail::write_file(dir / (dialogue.id + ".transcript.jsonl"),
                     segio::emit_transcript(dialogue.segments));
  detail::write_file(dir / (dialogue.id + ".words.jsonl"),
                     segio::emit_word_stream(streams_of(dialogue)));
  detail::write_file(dir / (dialogue.id + ".conditions.jsonl"),
                     segio::emit_conditions({{dialogue.id, dialogue.conditions}}));
}

inline void write_chunk_bundle(const std::filesystem::path& dir, const SynthOutput& out) {
  const auto bundle_dir = dir / out.dialogue.id;
  std::filesystem::create_directories(bundle_dir);
  const powerset::PowersetConfig cfg{2, 2};
  nlohmann::json manifest{{"file_id", out.dialogue.id},
                          {"num_speakers", cfg.num_speakers},
                          {"max_simultaneous", cfg.max_simultaneous},
                          {"frame_duration", kFrameDuration}};
  nlohmann::json chunk_list = nlohmann::json::array();
  for (const auto& chunk : out.chunks) {
    std::string stem = std::to_string(chunk.chunk_id);
    if (stem.size() < 3) stem.insert(0, 3 - stem.size(), '0');
    const std::string post_name = "chunk_" + stem + ".post";
    const std::string emb_name = "chunk_" + stem + ".emb";

    powerset::PosteriorGrid grid;
    grid.num_classes = static_cast<int>(powerset::class_count(cfg));
    grid.frame_duration = kFrameDuration;
    const std::size_t frames = chunk.activity.frames();
    grid.values.assign(frames * static_cast<std::size_t>(grid.num_classes), 0.0f);
    std::vector<uint8_t> active(2, 0);
    for (std::size_t f = 0; f < frames; ++f) {
      active[0] = chunk.activity.at(f, 0) > 0.5f;
      active[1] = chunk.activity.at(f, 1) > 0.5f;
      const auto cls = powerset::encode(active, cfg);
      grid.values[f * static_cast<std::size_t>(grid.num_classes) + cls] = 1.0f;
    }
    powerset::save_posteriors_binary(bundle_dir / post_name, cfg, grid);
    stitch::save_embeddings(bundle_dir / emb_name, chunk.embeddings);

    chunk_list.push_back({{"chunk_id", chunk.chunk_id},
                          {"start_time", chunk.start_time},
                          {"posteriors", post_name},
                          {"embeddings", emb_name}});
  }
  manifest["chunks"] = std::move(chunk_list);
  detail::write_file(bundle_dir / "manifest.json", manifest.dump(2) + "\n");
}

inline void write_mask(const std::filesystem::path& path, const PerturbMask& mask) {
  nlohmann::json doc{{"flipped_segments", mask.flipped_segments},
                     {"flipped_duration", mask.flipped_duration},
                     {"substituted_words", mask.substituted_words},
                     {"total_words", mask.total_words}};
  detail::write_file(path, doc.dump(2) + "\n");
}

/// Generator config file. Keys mirror SynthConfig; "n_dialogues" and
/// "id_prefix" drive corpus generation (dialogue i uses seed + i),
/// "lexicon" names a file with one token per line.
struct GenRequest {
  SynthConfig config;
  int n_dialogues = 1;
  std::string id_prefix = "dlg";
};

inline GenRequest load_gen_request(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("synth config is not a JSON object: " + path.string());
  }
  GenRequest request;
  auto& cfg = request.config;
  cfg.duration = doc.value("duration", cfg.duration);
  cfg.p_single = doc.value("p_single", cfg.p_single);
  cfg.p_silence = doc.value("p_silence", cfg.p_silence);
  cfg.p_overlap = doc.value("p_overlap", cfg.p_overlap);
  cfg.mean_turn = doc.value("mean_turn", cfg.mean_turn);
  cfg.embedding_dim = doc.value("embedding_dim", cfg.embedding_dim);
  cfg.cluster_separation = doc.value("cluster_separation", cfg.cluster_separation);
  cfg.seed = doc.value("seed", cfg.seed);
  request.n_dialogues = doc.value("n_dialogues", 1);
  request.id_prefix = doc.value("id_prefix", std::string{"dlg"});
  if (doc.contains("lexicon")) {
    const auto lexicon_path = path.parent_path() / doc["lexicon"].get<std::string>();
    std::ifstream lex(lexicon_path);
    if (!lex) throw IoError("cannot read lexicon " + lexicon_path.string());
    std::string token;
    while (std::getline(lex, token)) {
      if (!token.empty() && token.back() == '\r') token.pop_back();
      if (!token.empty()) cfg.lexicon.push_back(token);
    }
  }
  if (request.n_dialogues < 1) throw ValidationError("synth: n_dialogues must be >= 1");
  return request;
}

inline PerturbConfig load_perturb_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("perturb config is not a JSON object: " + path.string());
  }
  PerturbConfig cfg;
  cfg.boundary_jitter_sd = doc.value("boundary_jitter_sd", 0.0);
  cfg.label_flip_rate = doc.value("label_flip_rate", 0.0);
  cfg.word_sub_rate = doc.value("word_sub_rate", 0.0);
  cfg.seed = doc.value("seed", uint64_t{0});
  validate(cfg);
  return cfg;
}

inline std::string zero_padded(int value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

inline Dialogue load_dialogue(const std::filesystem::path& dir, const std::string& id) {
  Dialogue dialogue;
  dialogue.id = id;
  const auto transcript_path = dir / (id + ".transcript.jsonl");
  std::ifstream in(transcript_path);
  if (!in) throw IoError("cannot read " + transcript_path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  dialogue.segments = segio::parse_transcript(content);
  const auto conditions_path = dir / (id + ".conditions.jsonl");
  if (std::filesystem::exists(conditions_path)) {
    std::ifstream cin(conditions_path);
    std::string ctext((std::istreambuf_iterator<char>(cin)), std::istreambuf_iterator<char>());
    const auto records = segio::parse_conditions(ctext);
    if (!records.empty()) dialogue.conditions = records.front().text;
  }
  return dialogue;
}

}  // namespace dialkit::synth
