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
// Orchestrates the cascade over a corpus: stitch (or pass through)
// diarization, normalize transcripts, score DER / tcpWER / ROUGE against
// references, one consolidated report per dialogue plus a corpus
// aggregate. Stage outputs are materialized to disk between steps, so any
// stage can be fed from external system outputs instead; swapping a single
// input directory reproduces one arm of a module-ablation grid.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialkit/der.hpp"
#include "dialkit/errors.hpp"
#include "dialkit/report.hpp"
#include "dialkit/segio.hpp"
#include "dialkit/stitch.hpp"
#include "dialkit/tcpwer.hpp"
#include "dialkit/textmetrics.hpp"
#include "dialkit/textprep.hpp"

namespace dialkit::run {

struct RunConfig {
  std::vector<std::string> dialogues;  // empty -> discover <id>.rttm under ref_dir
  std::string ref_dir;
  std::string diarization_dir;  // <id>/manifest.json (chunks) or <id>.rttm
  std::string asr_dir;          // <id>.transcript.jsonl or <id>.words.jsonl
  std::string conditions_dir;   // <id>.conditions.jsonl
  std::string out_dir;
  double der_collar = 0.25;
  bool score_overlap = true;
  double tcp_collar = 5.0;
  bool normalize_text = true;
  stitch::StitchConfig stitch_config;
  std::string report_format = "table";  // "table" | "json"
  int jobs = 1;
  bool keep_going = false;
};

struct DialogueOutcome {
  std::string id;
  std::optional<der::DerBreakdown> der_result;
  std::optional<tcpwer::TcpWerReport> tcpwer_result;
  std::optional<textmetrics::RougeScore> rouge1_result;
  std::optional<textmetrics::RougeScore> rougeL_result;
  std::vector<std::string> diagnostics;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("short write to " + path.string());
}

/// Normalizes every word of every stream with the default profile; words
/// that normalize to nothing are dropped.
inline std::vector<segio::SpeakerWordStream> normalize_streams(
    std::vector<segio::SpeakerWordStream> streams) {
  const auto profile = textprep::NormalizationProfile::defaults();
  for (auto& stream : streams) {
    std::vector<segio::TimedWord> kept;
    kept.reserve(stream.words.size());
    for (auto& w : stream.words) {
      w.word = textprep::apply(w.word, profile);
      if (!w.word.empty()) kept.push_back(std::move(w));
    }
    stream.words = std::move(kept);
  }
  std::erase_if(streams,
                [](const segio::SpeakerWordStream& s) { return s.words.empty(); });
  return streams;
}

/// Loads word streams from either a word-record file or a transcript file
/// (words pseudo-timed per segment).
inline std::vector<segio::SpeakerWordStream> load_streams_for(
    const std::filesystem::path& dir, const std::string& id) {
  const auto words_path = dir / (id + ".words.jsonl");
  if (std::filesystem::exists(words_path)) {
    return segio::parse_word_stream(read_file(words_path));
  }
  const auto transcript_path = dir / (id + ".transcript.jsonl");
  if (std::filesystem::exists(transcript_path)) {
    return tcpwer::streams_from_transcript(segio::parse_transcript(read_file(transcript_path)));
  }
  throw IoError("no " + id + ".words.jsonl or " + id + ".transcript.jsonl under " +
                dir.string());
}

inline std::optional<std::string> load_condition_text(const std::filesystem::path& dir,
                                                      const std::string& id) {
  const auto path = dir / (id + ".conditions.jsonl");
  if (!std::filesystem::exists(path)) return std::nullopt;
  for (const auto& rec : segio::parse_conditions(read_file(path))) {
    if (rec.id == id) return rec.text;
  }
  return std::nullopt;
}

inline DialogueOutcome score_dialogue(const RunConfig& config, const std::string& id) {
  namespace fs = std::filesystem;
  DialogueOutcome outcome;
  outcome.id = id;
  const fs::path ref_dir(config.ref_dir);
  const fs::path out_dir = fs::path(config.out_dir) / id;
  fs::create_directories(out_dir);

  // Diarization: stitch a chunk bundle or pass a precomputed RTTM through,
  // materializing the hypothesis either way.
  if (!config.diarization_dir.empty()) {
    const fs::path ref_rttm = ref_dir / (id + ".rttm");
    try {
      if (!fs::exists(ref_rttm)) throw IoError("missing reference " + ref_rttm.string());
      segio::Timeline hyp;
      const fs::path manifest = fs::path(config.diarization_dir) / id / "manifest.json";
      const fs::path direct = fs::path(config.diarization_dir) / (id + ".rttm");
      if (fs::exists(manifest)) {
        auto chunks = stitch::load_chunks(manifest);
        auto stitch_config = config.stitch_config;
        stitch_config.file_id = id;
        hyp = stitch::stitch_pipeline(chunks, stitch_config);
      } else if (fs::exists(direct)) {
        hyp = segio::parse_rttm(read_file(direct));
        hyp.set_file_id(id);
      } else {
        throw IoError("no diarization input for " + id + " under " +
                      config.diarization_dir);
      }
      write_file(out_dir / "diarization.rttm", segio::emit_rttm(hyp));
      const auto ref = segio::parse_rttm(read_file(ref_rttm));
      outcome.der_result =
          der::compute_der(ref, hyp, config.der_collar, config.score_overlap);
    } catch (const std::exception& e) {
      outcome.diagnostics.push_back(std::string("der: ") + e.what());
    }
  }

  // Speaker-attributed ASR scoring.
  if (!config.asr_dir.empty()) {
    try {
      auto ref_streams = load_streams_for(ref_dir, id);
      auto hyp_streams = load_streams_for(fs::path(config.asr_dir), id);
      if (config.normalize_text) {
        ref_streams = normalize_streams(std::move(ref_streams));
        hyp_streams = normalize_streams(std::move(hyp_streams));
        write_file(out_dir / "hyp.words.normalized.jsonl",
                   segio::emit_word_stream(hyp_streams));
      }
      outcome.tcpwer_result =
          tcpwer::compute_tcpwer(ref_streams, hyp_streams, config.tcp_collar);
    } catch (const std::exception& e) {
      outcome.diagnostics.push_back(std::string("tcpwer: ") + e.what());
    }
  }

  // Condition extraction scoring.
  if (!config.conditions_dir.empty()) {
    try {
      const auto ref_text = load_condition_text(ref_dir, id);
      const auto hyp_text = load_condition_text(fs::path(config.conditions_dir), id);
      if (!ref_text) throw IoError("missing reference conditions for " + id);
      if (!hyp_text) throw IoError("missing hypothesis conditions for " + id);
      outcome.rouge1_result = textmetrics::rouge1(*ref_text, *hyp_text);
      outcome.rougeL_result = textmetrics::rougeL(*ref_text, *hyp_text);
    } catch (const std::exception& e) {
      outcome.diagnostics.push_back(std::string("rouge: ") + e.what());
    }
  }

  return outcome;
}

inline nlohmann::json config_json(const RunConfig& config) {
  return nlohmann::json{
      {"der_collar", config.der_collar},
      {"score_overlap", config.score_overlap},
      {"tcp_collar", config.tcp_collar},
      {"normalize_text", config.normalize_text},
      {"stitch",
       {{"k", config.stitch_config.k},
        {"seed", config.stitch_config.seed},
        {"threshold", config.stitch_config.threshold},
        {"min_duration", config.stitch_config.min_duration},
        {"max_gap", config.stitch_config.max_gap}}}};
}

inline nlohmann::json outcome_json(const DialogueOutcome& outcome) {
  nlohmann::json doc{{"id", outcome.id}, {"diagnostics", outcome.diagnostics}};
  if (outcome.der_result) doc["der"] = report::to_json(*outcome.der_result);
  if (outcome.tcpwer_result) doc["tcpwer"] = report::to_json(*outcome.tcpwer_result);
  if (outcome.rouge1_result) doc["rouge1"] = report::to_json(*outcome.rouge1_result);
  if (outcome.rougeL_result) doc["rougeL"] = report::to_json(*outcome.rougeL_result);
  return doc;
}

}  // namespace detail

/// Discovers dialogue ids as <id>.rttm files under the reference directory.
inline std::vector<std::string> discover_dialogues(const std::string& ref_dir) {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(ref_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.size() > 5 && name.substr(name.size() - 5) == ".rttm") {
      ids.push_back(name.substr(0, name.size() - 5));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("run config is not a JSON object: " + path.string());
  }
  RunConfig config;
  if (doc.contains("dialogues")) {
    config.dialogues = doc["dialogues"].get<std::vector<std::string>>();
  }
  config.ref_dir = doc.value("ref_dir", std::string{});
  config.diarization_dir = doc.value("diarization_dir", std::string{});
  config.asr_dir = doc.value("asr_dir", std::string{});
  config.conditions_dir = doc.value("conditions_dir", std::string{});
  config.out_dir = doc.value("out_dir", std::string{});
  config.der_collar = doc.value("der_collar", 0.25);
  config.score_overlap = doc.value("score_overlap", true);
  config.tcp_collar = doc.value("tcp_collar", 5.0);
  config.normalize_text = doc.value("normalize_text", true);
  config.report_format = doc.value("report_format", std::string{"table"});
  config.jobs = doc.value("jobs", 1);
  if (doc.contains("stitch")) {
    const auto& s = doc["stitch"];
    config.stitch_config.k = s.value("k", 2);
    config.stitch_config.seed = s.value("seed", uint64_t{0});
    config.stitch_config.threshold = s.value("threshold", 0.5);
    config.stitch_config.min_duration = s.value("min_duration", 0.4);
    config.stitch_config.max_gap = s.value("max_gap", 0.0);
  }
  if (config.ref_dir.empty() || config.out_dir.empty()) {
    throw ValidationError("run config needs ref_dir and out_dir");
  }
  return config;
}

/// Runs the cascade. Returns 0 iff every requested score was computed;
/// without keep_going the first dialogue with diagnostics stops the run.
inline int run_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  auto dialogues = config.dialogues;
  if (dialogues.empty()) dialogues = discover_dialogues(config.ref_dir);
  if (dialogues.empty()) {
    err << "run: no dialogues found under " << config.ref_dir << "\n";
    return 1;
  }
  fs::create_directories(config.out_dir);

  std::vector<DialogueOutcome> outcomes;
  outcomes.reserve(dialogues.size());
  const int jobs = std::max(1, config.jobs);
  std::size_t next = 0;
  bool abort = false;
  while (next < dialogues.size() && !abort) {
    const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                                    dialogues.size() - next);
    std::vector<std::future<DialogueOutcome>> futures;
    futures.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      const std::string id = dialogues[next + i];
      futures.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   [&config, id] { return detail::score_dialogue(config, id); }));
    }
    for (auto& f : futures) {
      outcomes.push_back(f.get());
      if (!outcomes.back().diagnostics.empty() && !config.keep_going) {
        abort = true;
        break;
      }
    }
    next += batch;
  }

  // Aggregate: DER and tcpWER pool their components, ROUGE macro-averages.
  der::DerBreakdown der_total;
  der_total.collar = config.der_collar;
  der_total.score_overlap = config.score_overlap;
  bool any_der = false;
  tcpwer::TcpWerReport tcp_total;
  tcp_total.collar = config.tcp_collar;
  bool any_tcp = false;
  textmetrics::RougeScore rouge1_mean, rougeL_mean;
  std::size_t rouge_count = 0;
  bool any_diagnostics = false;
  for (const auto& o : outcomes) {
    any_diagnostics = any_diagnostics || !o.diagnostics.empty();
    if (o.der_result) {
      any_der = true;
      der_total.miss += o.der_result->miss;
      der_total.false_alarm += o.der_result->false_alarm;
      der_total.confusion += o.der_result->confusion;
      der_total.total_ref += o.der_result->total_ref;
    }
    if (o.tcpwer_result) {
      any_tcp = true;
      tcp_total.substitutions += o.tcpwer_result->substitutions;
      tcp_total.deletions += o.tcpwer_result->deletions;
      tcp_total.insertions += o.tcpwer_result->insertions;
      tcp_total.ref_words += o.tcpwer_result->ref_words;
    }
    if (o.rouge1_result && o.rougeL_result) {
      ++rouge_count;
      rouge1_mean.precision += o.rouge1_result->precision;
      rouge1_mean.recall += o.rouge1_result->recall;
      rouge1_mean.f1 += o.rouge1_result->f1;
      rougeL_mean.precision += o.rougeL_result->precision;
      rougeL_mean.recall += o.rougeL_result->recall;
      rougeL_mean.f1 += o.rougeL_result->f1;
    }
  }
  if (der_total.total_ref > 0) {
    der_total.der = der_total.error_seconds() / der_total.total_ref;
  } else {
    der_total.der =
        der_total.error_seconds() > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  if (tcp_total.ref_words > 0) {
    tcp_total.tcpwer = static_cast<double>(tcp_total.errors()) /
                       static_cast<double>(tcp_total.ref_words);
  } else {
    tcp_total.tcpwer =
        tcp_total.errors() > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  if (rouge_count > 0) {
    const auto n = static_cast<double>(rouge_count);
    rouge1_mean.precision /= n;
    rouge1_mean.recall /= n;
    rouge1_mean.f1 /= n;
    rougeL_mean.precision /= n;
    rougeL_mean.recall /= n;
    rougeL_mean.f1 /= n;
  }

  nlohmann::json aggregate;
  if (any_der) aggregate["der"] = report::to_json(der_total);
  if (any_tcp) aggregate["tcpwer"] = report::to_json(tcp_total);
  if (rouge_count > 0) {
    aggregate["rouge1_mean"] = report::to_json(rouge1_mean);
    aggregate["rougeL_mean"] = report::to_json(rougeL_mean);
    aggregate["rouge_dialogues"] = rouge_count;
  }

  nlohmann::json corpus{{"config", detail::config_json(config)},
                        {"dialogues", nlohmann::json::array()},
                        {"aggregate", aggregate}};
  for (const auto& o : outcomes) {
    const auto doc = detail::outcome_json(o);
    detail::write_file(fs::path(config.out_dir) / o.id / "report.json", doc.dump(2) + "\n");
    corpus["dialogues"].push_back(doc);
  }
  detail::write_file(fs::path(config.out_dir) / "report.json", corpus.dump(2) + "\n");

  if (config.report_format == "json") {
    out << corpus.dump(2) << "\n";
  } else {
    out << report::pad("dialogue", 16) << report::pad("DER%", 10)
        << report::pad("tcpWER%", 10) << report::pad("R1-F1", 10) << "RL-F1\n";
    auto row = [&](const std::string& name, const std::optional<der::DerBreakdown>& d,
                   const std::optional<tcpwer::TcpWerReport>& t,
                   const std::optional<textmetrics::RougeScore>& r1,
                   const std::optional<textmetrics::RougeScore>& rl) {
      out << report::pad(name, 16)
          << report::pad(d ? report::format_percent(d->der) : "-", 10)
          << report::pad(t ? report::format_percent(t->tcpwer) : "-", 10)
          << report::pad(r1 ? report::format_ratio(r1->f1) : "-", 10)
          << (rl ? report::format_ratio(rl->f1) : "-") << "\n";
    };
    for (const auto& o : outcomes) {
      row(o.id, o.der_result, o.tcpwer_result, o.rouge1_result, o.rougeL_result);
    }
    row("corpus", any_der ? std::optional(der_total) : std::nullopt,
        any_tcp ? std::optional(tcp_total) : std::nullopt,
        rouge_count ? std::optional(rouge1_mean) : std::nullopt,
        rouge_count ? std::optional(rougeL_mean) : std::nullopt);
  }

  for (const auto& o : outcomes) {
    for (const auto& d : o.diagnostics) err << o.id << ": " << d << "\n";
  }
  return any_diagnostics ? 1 : 0;
}

}  // namespace dialkit::run
