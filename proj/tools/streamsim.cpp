// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 2 some segments failed, 1 fatal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamsim/streamsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

struct Text {
  ss_text* handle = nullptr;
  ~Text() { ss_text_free(handle); }
  std::string str() const { return std::string(ss_text_data(handle), ss_text_size(handle)); }
};

struct Config {
  ss_run_config* handle = nullptr;
  Config() {
    if (ss_run_config_new(&handle) != SS_OK) throw std::runtime_error(ss_last_error());
  }
  ~Config() { ss_run_config_free(handle); }
};

struct Failure {
  int exit_code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "streamsim: cannot read " << path << "\n";
    throw Failure{kExitFatal};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) {
    std::cerr << "streamsim: cannot write " << path << "\n";
    throw Failure{kExitFatal};
  }
}

// Turns a status into an exit code, printing the error for fatal ones.
int check(ss_status status) {
  if (status == SS_OK) return kExitOk;
  if (status == SS_PARTIAL_FAILURE) {
    std::cerr << "streamsim: some segments failed (see report)\n";
    return kExitPartial;
  }
  std::cerr << "streamsim: " << ss_status_name(status) << ": " << ss_last_error() << "\n";
  throw Failure{kExitFatal};
}

void set(Config& cfg, const char* key, const std::string& value) {
  check(ss_run_config_set(cfg.handle, key, value.c_str()));
}

struct RunOptions {
  std::string corpus;
  std::string model = "scripted";
  std::string policy;
  std::optional<std::string> k, n, lambda, alpha, f;
  std::optional<std::string> adjust_final_frame, frontier_guard;
  int chunk_ms = 500;
  std::string out;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string clock = "steady";
  std::string modes = "ideal,computation_aware";
  bool json = false;
  // sweep only
  std::string grid;
  bool svg = false;
  std::optional<double> al_threshold;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--corpus", o.corpus, "Corpus JSONL")->required();
  cmd->add_option("--model", o.model, "scripted[:PATH] | proto:HOST:PORT | proto:stdio:CMD");
  cmd->add_option("--policy", o.policy, "WaitK | LA | EDAtt | AlignAtt")->required();
  cmd->add_option("--k", o.k, "wait-k: chunks to wait");
  cmd->add_option("--n", o.n, "local agreement depth (default 2)");
  cmd->add_option("--lambda", o.lambda, "EDAtt: trailing frames");
  cmd->add_option("--alpha", o.alpha, "EDAtt: attention threshold");
  cmd->add_option("--f", o.f, "AlignAtt: trailing frames");
  cmd->add_option("--adjust-final-frame", o.adjust_final_frame, "EDAtt final-frame adjustment (true/false)");
  cmd->add_option("--frontier-guard", o.frontier_guard, "hold the last hypothesis token (true/false)");
  cmd->add_option("--chunk-ms", o.chunk_ms, "source chunk length")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--jobs", o.jobs, "parallel segments")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "recorded in the manifest");
  cmd->add_option("--clock", o.clock, "steady | fixed:MS (simulated cost per model call)");
  cmd->add_option("--modes", o.modes, "ideal,computation_aware");
  cmd->add_flag("--json", o.json, "print the full JSON report");
}

void configure(Config& cfg, const RunOptions& o) {
  set(cfg, "corpus", o.corpus);
  set(cfg, "model", o.model);
  set(cfg, "policy", o.policy);
  const std::pair<const char*, const std::optional<std::string>*> params[] = {
      {"k", &o.k},           {"n", &o.n},
      {"lambda", &o.lambda}, {"alpha", &o.alpha},
      {"f", &o.f},           {"adjust_final_frame", &o.adjust_final_frame},
      {"frontier_guard", &o.frontier_guard}};
  for (const auto& [key, value] : params) {
    if (*value) set(cfg, key, **value);
  }
  set(cfg, "chunk_ms", std::to_string(o.chunk_ms));
  if (!o.out.empty()) set(cfg, "out", o.out);
  set(cfg, "jobs", std::to_string(o.jobs));
  set(cfg, "seed", std::to_string(o.seed));
  set(cfg, "clock", o.clock);
  set(cfg, "modes", o.modes);
}

std::string seconds(const nlohmann::json& ms) {
  if (!ms.is_number()) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", ms.get<double>() / 1000.0);
  return buf;
}

void print_summary(const std::string& report_json) {
  const auto j = nlohmann::json::parse(report_json);
  std::cout << j["policy"].get<std::string>() << " " << j["params"].dump() << "\n";
  std::cout << "segments " << j["segments"] << ", failed " << j["failed"].size() << "\n";
  if (j["bleu"].is_object()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", j["bleu"]["score"].get<double>());
    std::cout << "BLEU " << buf << "\n";
  } else {
    std::cout << "BLEU absent (no references)\n";
  }
  for (const char* mode : {"ideal", "computation_aware"}) {
    const auto& m = j["latency"][mode];
    if (!m.is_object()) continue;
    const std::string suffix = std::string(mode) == "ideal" ? "" : "_CA";
    std::cout << "AL" << suffix << " " << seconds(m["AL"]) << "  LAAL" << suffix << " "
              << seconds(m["LAAL"]) << "  ATD" << suffix << " " << seconds(m["ATD"]) << "\n";
  }
}

std::vector<int> parse_alignment(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      std::cerr << "streamsim: alignment entry '" << tok << "' is not an integer\n";
      throw Failure{kExitFatal};
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous translation policy simulator and evaluator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ss_version());

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one policy over a corpus");
  add_run_options(run, run_opts);

  RunOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid and write a quality-latency curve");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--grid", sweep_opts.grid, "PARAM=V1,V2,... e.g. f=1,2,4,8")->required();
  sweep->add_flag("--svg", sweep_opts.svg, "also write curve.svg");
  sweep->add_option("--al-threshold", sweep_opts.al_threshold, "mark grid points with AL <= seconds");

  std::string hyp_path, ref_path;
  auto* score = app.add_subcommand("score", "Corpus BLEU (13a, exp smoothing) of line-aligned files");
  score->add_option("--hyp", hyp_path, "hypotheses, one per line")->required();
  score->add_option("--ref", ref_path, "references, one per line")->required();

  std::string tagged_path, align_path, srt_in, srt_out, conformity_out;
  std::int64_t frame_ms = 40;
  int total_frames = 0;
  auto* subtitle = app.add_subcommand("subtitle", "Tagged text to SRT, plus CPL/CPS conformity");
  auto* tagged_opt = subtitle->add_option("--tagged", tagged_path, "text with <eol>/<eob> markers");
  subtitle->add_option("--align", align_path, "per-token 1-based frame indices");
  subtitle->add_option("--frame-ms", frame_ms, "alignment frame length")->check(CLI::PositiveNumber);
  subtitle->add_option("--total-frames", total_frames, "frames in the source (optional)");
  subtitle->add_option("--srt-out", srt_out, "SRT destination (default stdout)");
  auto* srt_opt = subtitle->add_option("--srt", srt_in, "score an existing SRT file instead");
  subtitle->add_option("--conformity-out", conformity_out, "conformity JSON destination");
  tagged_opt->excludes(srt_opt);

  std::string logs_path, report_out;
  auto* report = app.add_subcommand("report", "Latency metrics from emission logs");
  report->add_option("--logs", logs_path, "emission logs, one JSON object per line")->required();
  report->add_option("--out", report_out, "write the JSON report here");

  int synth_segments = 100;
  std::uint64_t synth_seed = 0;
  std::int64_t synth_chunk_ms = 500;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a deterministic scripted corpus");
  synth->add_option("--segments", synth_segments, "segment count");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--chunk-ms", synth_chunk_ms, "chunk length the alignment refers to");
  synth->add_option("--out", synth_out, "destination (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version are reported as "errors" with a zero exit code.
    return app.exit(e) == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*run) {
      Config cfg;
      configure(cfg, run_opts);
      Text out;
      const int code = check(ss_run_eval(cfg.handle, &out.handle));
      if (run_opts.json) {
        std::cout << out.str() << "\n";
      } else {
        print_summary(out.str());
      }
      return code;
    }
    if (*sweep) {
      Config cfg;
      configure(cfg, sweep_opts);
      set(cfg, "grid", sweep_opts.grid);
      if (sweep_opts.svg) set(cfg, "svg", "true");
      if (sweep_opts.al_threshold) set(cfg, "al_threshold", std::to_string(*sweep_opts.al_threshold));
      Text csv;
      const int code = check(ss_sweep(cfg.handle, &csv.handle));
      std::cout << csv.str();
      return code;
    }
    if (*score) {
      Text out;
      check(ss_bleu(read_file(hyp_path).c_str(), read_file(ref_path).c_str(), &out.handle));
      std::cout << out.str() << "\n";
      return kExitOk;
    }
    if (*subtitle) {
      Text srt, conformity;
      if (!srt_in.empty()) {
        check(ss_srt_conformity(read_file(srt_in).c_str(), &conformity.handle));
      } else {
        if (tagged_path.empty() || align_path.empty()) {
          std::cerr << "streamsim: subtitle needs --tagged and --align (or --srt)\n";
          return kExitFatal;
        }
        const auto alignment = parse_alignment(read_file(align_path));
        check(ss_subtitle(read_file(tagged_path).c_str(), alignment.data(), alignment.size(),
                          frame_ms, total_frames, &srt.handle, &conformity.handle));
        if (srt_out.empty()) {
          std::cout << srt.str();
        } else {
          write_file(srt_out, srt.str());
        }
      }
      if (!conformity_out.empty()) {
        write_file(conformity_out, conformity.str() + "\n");
      } else {
        (srt_out.empty() && srt_in.empty() ? std::cerr : std::cout) << conformity.str() << "\n";
      }
      return kExitOk;
    }
    if (*report) {
      Text out;
      check(ss_latency_report(read_file(logs_path).c_str(), &out.handle));
      if (report_out.empty()) {
        std::cout << out.str() << "\n";
      } else {
        write_file(report_out, out.str() + "\n");
      }
      return kExitOk;
    }
    if (*synth) {
      Text out;
      check(ss_synthesize_corpus(synth_segments, synth_seed, synth_chunk_ms, &out.handle));
      if (synth_out.empty()) {
        std::cout << out.str();
      } else {
        write_file(synth_out, out.str());
      }
      return kExitOk;
    }
  } catch (const Failure& f) {
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "streamsim: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitOk;
}
