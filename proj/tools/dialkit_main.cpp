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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dialkit/der.hpp"
#include "dialkit/profiles.hpp"
#include "dialkit/report.hpp"
#include "dialkit/run.hpp"
#include "dialkit/segio.hpp"
#include "dialkit/snippets.hpp"
#include "dialkit/stitch.hpp"
#include "dialkit/synth.hpp"
#include "dialkit/tcpwer.hpp"
#include "dialkit/textmetrics.hpp"
#include "dialkit/textprep.hpp"

namespace {

namespace fs = std::filesystem;
using dialkit::numio::format_fixed;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dialkit::IoError("cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dialkit::IoError("cannot write " + path.string());
  out << content;
  if (!out) throw dialkit::IoError("short write to " + path.string());
}

void maybe_write_json(const std::string& json_path, const nlohmann::json& doc) {
  if (!json_path.empty()) write_file(json_path, doc.dump(2) + "\n");
}

struct StitchArgs {
  std::string manifest;
  std::string out;
  dialkit::stitch::StitchConfig config;
  std::string names;
};

int cmd_stitch(const StitchArgs& args) {
  auto chunks = dialkit::stitch::load_chunks(args.manifest);
  auto config = args.config;
  if (!args.names.empty()) {
    config.speaker_names.clear();
    std::size_t pos = 0;
    while (pos <= args.names.size()) {
      std::size_t comma = args.names.find(',', pos);
      if (comma == std::string::npos) comma = args.names.size();
      config.speaker_names.push_back(args.names.substr(pos, comma - pos));
      pos = comma + 1;
    }
  }
  if (config.file_id.empty()) {
    config.file_id = dialkit::stitch::load_manifest(args.manifest).file_id;
  }
  std::vector<std::string> warnings;
  const auto timeline = dialkit::stitch::stitch_pipeline(chunks, config, &warnings);
  for (const auto& w : warnings) std::cerr << "stitch: " << w << "\n";
  write_file(args.out, dialkit::segio::emit_rttm(timeline));
  std::cout << "stitched " << chunks.size() << " chunks into " << timeline.size()
            << " segments -> " << args.out << "\n";
  return 0;
}

struct ScoreDerArgs {
  std::string ref;
  std::string hyp;
  double collar = 0.25;
  bool overlap = true;
  std::string json_path;
};

int cmd_score_der(const ScoreDerArgs& args) {
  const auto refs = dialkit::segio::parse_rttm_files(read_file(args.ref));
  const auto hyps = dialkit::segio::parse_rttm_files(read_file(args.hyp));
  if (refs.empty()) throw dialkit::ValidationError("reference RTTM is empty");
  std::map<std::string, const dialkit::segio::Timeline*> hyp_by_id;
  for (const auto& h : hyps) hyp_by_id[h.file_id()] = &h;

  dialkit::der::DerBreakdown total;
  total.collar = args.collar;
  total.score_overlap = args.overlap;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& ref : refs) {
    dialkit::segio::Timeline empty(ref.file_id());
    auto it = hyp_by_id.find(ref.file_id());
    const auto& hyp = it != hyp_by_id.end() ? *it->second : empty;
    const auto b = dialkit::der::compute_der(ref, hyp, args.collar, args.overlap);
    std::cout << dialkit::report::render_der_table(ref.file_id(), b);
    auto doc = dialkit::report::to_json(b);
    doc["file"] = ref.file_id();
    files.push_back(std::move(doc));
    total.miss += b.miss;
    total.false_alarm += b.false_alarm;
    total.confusion += b.confusion;
    total.total_ref += b.total_ref;
  }
  if (total.total_ref > 0) {
    total.der = total.error_seconds() / total.total_ref;
  } else {
    total.der = total.error_seconds() > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  if (refs.size() > 1) {
    std::cout << dialkit::report::render_der_table("TOTAL", total);
  }
  nlohmann::json doc{{"files", files}, {"total", dialkit::report::to_json(total)}};
  maybe_write_json(args.json_path, doc);
  return 0;
}

std::vector<dialkit::segio::SpeakerWordStream> load_streams(const fs::path& path) {
  const auto content = read_file(path);
  // Transcript records carry "text"; word records carry "word".
  const auto probe = content.find('\n');
  const std::string first_line = content.substr(0, probe == std::string::npos ? content.size()
                                                                              : probe);
  if (first_line.find("\"text\"") != std::string::npos) {
    return dialkit::tcpwer::streams_from_transcript(dialkit::segio::parse_transcript(content));
  }
  return dialkit::segio::parse_word_stream(content);
}

struct ScoreTcpArgs {
  std::string ref;
  std::string hyp;
  double collar = 5.0;
  bool normalize = false;
  std::string json_path;
};

int cmd_score_tcpwer(const ScoreTcpArgs& args) {
  auto ref = load_streams(args.ref);
  auto hyp = load_streams(args.hyp);
  if (args.normalize) {
    ref = dialkit::run::detail::normalize_streams(std::move(ref));
    hyp = dialkit::run::detail::normalize_streams(std::move(hyp));
  }
  const auto report = dialkit::tcpwer::compute_tcpwer(ref, hyp, args.collar);
  std::cout << dialkit::report::render_tcpwer_table("-", report);
  maybe_write_json(args.json_path, dialkit::report::to_json(report));
  return 0;
}

struct ScoreRougeArgs {
  std::string ref;
  std::string hyp;
  std::string measure = "f1";
  std::string json_path;
};

int cmd_score_rouge(const ScoreRougeArgs& args) {
  const auto refs = dialkit::segio::parse_conditions(read_file(args.ref));
  const auto hyps = dialkit::segio::parse_conditions(read_file(args.hyp));
  std::map<std::string, std::string> hyp_by_id;
  for (const auto& h : hyps) hyp_by_id[h.id] = h.text;

  dialkit::textmetrics::RougeScore mean1, meanL;
  nlohmann::json dialogues = nlohmann::json::array();
  std::size_t scored = 0;
  for (const auto& ref : refs) {
    auto it = hyp_by_id.find(ref.id);
    if (it == hyp_by_id.end()) {
      throw dialkit::ValidationError("no hypothesis conditions for dialogue " + ref.id);
    }
    const auto r1 = dialkit::textmetrics::rouge1(ref.text, it->second);
    const auto rl = dialkit::textmetrics::rougeL(ref.text, it->second);
    std::cout << dialkit::report::render_rouge_table(ref.id, r1, rl);
    dialogues.push_back({{"id", ref.id},
                         {"rouge1", dialkit::report::to_json(r1)},
                         {"rougeL", dialkit::report::to_json(rl)}});
    mean1.precision += r1.precision;
    mean1.recall += r1.recall;
    mean1.f1 += r1.f1;
    meanL.precision += rl.precision;
    meanL.recall += rl.recall;
    meanL.f1 += rl.f1;
    ++scored;
  }
  if (scored == 0) throw dialkit::ValidationError("no dialogues in reference conditions");
  const auto n = static_cast<double>(scored);
  mean1.precision /= n;
  mean1.recall /= n;
  mean1.f1 /= n;
  meanL.precision /= n;
  meanL.recall /= n;
  meanL.f1 /= n;
  if (scored > 1) {
    std::cout << dialkit::report::render_rouge_table("MEAN", mean1, meanL);
  }
  const bool recall_only = args.measure == "recall";
  std::cout << "headline rouge1 " << (recall_only ? "recall " : "f1 ")
            << dialkit::report::format_ratio(recall_only ? mean1.recall : mean1.f1)
            << ", rougeL "
            << dialkit::report::format_ratio(recall_only ? meanL.recall : meanL.f1) << "\n";
  nlohmann::json doc{{"dialogues", dialogues},
                     {"mean",
                      {{"rouge1", dialkit::report::to_json(mean1)},
                       {"rougeL", dialkit::report::to_json(meanL)}}},
                     {"measure", args.measure}};
  maybe_write_json(args.json_path, doc);
  return 0;
}

struct NormalizeArgs {
  std::string in;
  std::string out;
  std::string profile_path;
};

int cmd_normalize(const NormalizeArgs& args) {
  const auto profile = args.profile_path.empty()
                           ? dialkit::textprep::NormalizationProfile::defaults()
                           : dialkit::textprep::load_profile(args.profile_path);
  const auto content = read_file(args.in);
  std::string result;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    const bool last = eol == std::string::npos;
    if (last) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    result += dialkit::textprep::apply(line, profile);
    if (!last) result += '\n';
    if (last) break;
    pos = eol + 1;
  }
  write_file(args.out, result);
  return 0;
}

struct SnippetsArgs {
  std::string asr;
  std::string gt;
  int context = 2;
  std::string align = "index";
  std::string out;
  std::string profile_path;
};

int cmd_snippets(const SnippetsArgs& args) {
  const auto profile = args.profile_path.empty()
                           ? dialkit::textprep::NormalizationProfile::defaults()
                           : dialkit::textprep::load_profile(args.profile_path);
  auto asr = dialkit::segio::parse_transcript(read_file(args.asr));
  auto gt = dialkit::segio::parse_transcript(read_file(args.gt));
  if (args.align == "edit") {
    auto aligned = dialkit::snippets::align_by_text(asr, gt, profile);
    asr = std::move(aligned.first);
    gt = std::move(aligned.second);
  }
  const auto pairs = dialkit::snippets::extract_snippets(asr, gt, args.context, profile);
  write_file(args.out, dialkit::snippets::emit_snippets(pairs));
  std::cout << "extracted " << pairs.size() << " snippet windows -> " << args.out << "\n";
  return 0;
}

struct SynthGenArgs {
  std::string config;
  std::string out;
};

int cmd_synth_gen(const SynthGenArgs& args) {
  const auto request = dialkit::synth::load_gen_request(args.config);
  fs::create_directories(args.out);
  for (int i = 0; i < request.n_dialogues; ++i) {
    auto cfg = request.config;
    cfg.seed = request.config.seed + static_cast<uint64_t>(i);
    const std::string id = request.id_prefix + dialkit::synth::zero_padded(i, 3);
    const auto generated = dialkit::synth::gen_conversation(cfg, id);
    dialkit::synth::write_dialogue_files(args.out, generated.dialogue, generated.truth);
    dialkit::synth::write_chunk_bundle(args.out, generated);
    std::cout << "generated " << id << ": " << generated.truth.size() << " segments, "
              << generated.chunks.size() << " chunks\n";
  }
  return 0;
}

struct SynthPerturbArgs {
  std::string in;
  std::string config;
  std::string out;
};

int cmd_synth_perturb(const SynthPerturbArgs& args) {
  const auto cfg = dialkit::synth::load_perturb_config(args.config);
  fs::create_directories(args.out);
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(args.in)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const std::string suffix = ".transcript.jsonl";
    if (name.size() > suffix.size() &&
        name.substr(name.size() - suffix.size()) == suffix) {
      ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) {
    throw dialkit::IoError("no *.transcript.jsonl under " + args.in);
  }
  for (const auto& id : ids) {
    const auto truth = dialkit::synth::load_dialogue(args.in, id);
    const auto result = dialkit::synth::perturb(truth, cfg);
    dialkit::synth::write_dialogue_files(args.out, result.dialogue,
                                         dialkit::synth::timeline_of(result.dialogue));
    dialkit::synth::write_mask(fs::path(args.out) / (id + ".mask.json"), result.mask);
    std::cout << "perturbed " << id << ": " << result.mask.flipped_segments.size()
              << " flips, " << result.mask.substituted_words << "/"
              << result.mask.total_words << " word substitutions\n";
  }
  return 0;
}

struct RunArgs {
  std::string config;
  bool keep_going = false;
  int jobs = 0;
};

int cmd_run(const RunArgs& args) {
  auto config = dialkit::run::load_run_config(args.config);
  if (args.keep_going) config.keep_going = true;
  if (args.jobs > 0) config.jobs = args.jobs;
  return dialkit::run::run_pipeline(config, std::cout, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker-attributed dialogue toolkit: diarization stitching, "
               "scoring, normalization, and synthetic fixtures"};
  app.require_subcommand(1);

  StitchArgs stitch_args;
  auto* stitch_cmd = app.add_subcommand("stitch", "Stitch a chunk bundle into one RTTM");
  stitch_cmd->add_option("--manifest", stitch_args.manifest, "Chunk bundle manifest.json")
      ->required();
  stitch_cmd->add_option("--out", stitch_args.out, "Output RTTM path")->required();
  stitch_cmd->add_option("--k", stitch_args.config.k, "Number of global speakers");
  stitch_cmd->add_option("--seed", stitch_args.config.seed, "Clustering seed");
  stitch_cmd->add_option("--threshold", stitch_args.config.threshold,
                         "Activity binarization threshold");
  stitch_cmd->add_option("--min-duration", stitch_args.config.min_duration,
                         "Drop segments shorter than this many seconds");
  stitch_cmd->add_option("--max-gap", stitch_args.config.max_gap,
                         "Bridge same-speaker gaps shorter than this (0 = off)");
  stitch_cmd->add_option("--names", stitch_args.names, "Comma-separated speaker names");
  stitch_cmd->add_option("--file-id", stitch_args.config.file_id, "Recording id for RTTM");

  ScoreDerArgs der_args;
  auto* der_cmd = app.add_subcommand("score-der", "Diarization error rate");
  der_cmd->add_option("--ref", der_args.ref, "Reference RTTM")->required();
  der_cmd->add_option("--hyp", der_args.hyp, "Hypothesis RTTM")->required();
  der_cmd->add_option("--collar", der_args.collar, "Collar in seconds (+-collar/2 excluded)");
  der_cmd->add_flag("--overlap,!--no-overlap", der_args.overlap,
                    "Score reference overlap regions");
  der_cmd->add_option("--json", der_args.json_path, "Write machine-readable report here");

  ScoreTcpArgs tcp_args;
  auto* tcp_cmd = app.add_subcommand("score-tcpwer", "Time-constrained permutation WER");
  tcp_cmd->add_option("--ref", tcp_args.ref, "Reference words/transcript JSONL")->required();
  tcp_cmd->add_option("--hyp", tcp_args.hyp, "Hypothesis words/transcript JSONL")->required();
  tcp_cmd->add_option("--collar", tcp_args.collar, "Temporal collar in seconds");
  tcp_cmd->add_flag("--normalize", tcp_args.normalize, "Normalize tokens before scoring");
  tcp_cmd->add_option("--json", tcp_args.json_path, "Write machine-readable report here");

  ScoreRougeArgs rouge_args;
  auto* rouge_cmd = app.add_subcommand("score-rouge", "ROUGE-1 / ROUGE-L over conditions");
  rouge_cmd->add_option("--ref", rouge_args.ref, "Reference conditions JSONL")->required();
  rouge_cmd->add_option("--hyp", rouge_args.hyp, "Hypothesis conditions JSONL")->required();
  rouge_cmd->add_option("--measure", rouge_args.measure, "Headline measure: f1 or recall")
      ->check(CLI::IsMember({"f1", "recall"}));
  rouge_cmd->add_option("--json", rouge_args.json_path, "Write machine-readable report here");

  NormalizeArgs norm_args;
  auto* norm_cmd = app.add_subcommand("normalize", "Normalize text line by line");
  norm_cmd->add_option("--in", norm_args.in, "Input text file")->required();
  norm_cmd->add_option("--out", norm_args.out, "Output text file")->required();
  norm_cmd->add_option("--profile", norm_args.profile_path, "Normalization profile JSON");

  SnippetsArgs snip_args;
  auto* snip_cmd = app.add_subcommand("snippets", "Extract contrastive snippets via diff");
  snip_cmd->add_option("--asr", snip_args.asr, "ASR transcript JSONL")->required();
  snip_cmd->add_option("--gt", snip_args.gt, "Ground-truth transcript JSONL")->required();
  snip_cmd->add_option("--context", snip_args.context, "Context segments on each side");
  snip_cmd->add_option("--align", snip_args.align, "Alignment mode: index or edit")
      ->check(CLI::IsMember({"index", "edit"}));
  snip_cmd->add_option("--out", snip_args.out, "Output snippet records JSONL")->required();
  snip_cmd->add_option("--profile", snip_args.profile_path, "Normalization profile JSON");

  auto* synth_cmd = app.add_subcommand("synth", "Synthetic conversation fixtures");
  synth_cmd->require_subcommand(1);
  SynthGenArgs gen_args;
  auto* gen_cmd = synth_cmd->add_subcommand("gen", "Generate conversations");
  gen_cmd->add_option("--config", gen_args.config, "Generator config JSON")->required();
  gen_cmd->add_option("--out", gen_args.out, "Output directory")->required();
  SynthPerturbArgs perturb_args;
  auto* perturb_cmd = synth_cmd->add_subcommand("perturb", "Perturb generated truth");
  perturb_cmd->add_option("--in", perturb_args.in, "Truth directory")->required();
  perturb_cmd->add_option("--config", perturb_args.config, "Perturbation config JSON")
      ->required();
  perturb_cmd->add_option("--out", perturb_args.out, "Output directory")->required();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run the full cascade from a config file");
  run_cmd->add_option("--config", run_args.config, "Run config JSON")->required();
  run_cmd->add_flag("--keep-going", run_args.keep_going,
                    "Score what can be scored despite missing inputs");
  run_cmd->add_option("--jobs", run_args.jobs, "Dialogue-level parallelism");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stitch_cmd->parsed()) return cmd_stitch(stitch_args);
    if (der_cmd->parsed()) return cmd_score_der(der_args);
    if (tcp_cmd->parsed()) return cmd_score_tcpwer(tcp_args);
    if (rouge_cmd->parsed()) return cmd_score_rouge(rouge_args);
    if (norm_cmd->parsed()) return cmd_normalize(norm_args);
    if (snip_cmd->parsed()) return cmd_snippets(snip_args);
    if (synth_cmd->parsed()) {
      if (gen_cmd->parsed()) return cmd_synth_gen(gen_args);
      if (perturb_cmd->parsed()) return cmd_synth_perturb(perturb_args);
    }
    if (run_cmd->parsed()) return cmd_run(run_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
