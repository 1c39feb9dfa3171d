// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_HARNESS_HPP_
#define STREAMSIM_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "streamsim/bleu.hpp"
#include "streamsim/latency.hpp"
#include "streamsim/policy.hpp"
#include "streamsim/runner.hpp"
#include "streamsim/scripted_model.hpp"

namespace streamsim {

// One corpus line. Scripted runs carry a script; external runs may point at
// a feature file instead.
struct CorpusEntry {
  std::string id;
  std::int64_t duration_ms = 0;
  std::optional<std::string> reference;
  std::optional<ScriptedModelConfig> script;
  std::optional<std::filesystem::path> audio_features;
};

// Optional model-level defaults for scripted runs (the PATH of
// "scripted:PATH"): instability_depth, attention_temperature,
// frames_per_chunk.
struct ScriptDefaults {
  std::optional<int> instability_depth;
  std::optional<double> attention_temperature;
  std::optional<int> frames_per_chunk;
};

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);
std::vector<CorpusEntry> parse_corpus(const std::string& jsonl,
                                      const std::filesystem::path& base_dir = {});
std::string corpus_jsonl(const std::vector<CorpusEntry>& corpus);

// Builds chunks for one entry; feature frames are attached as payloads when
// the entry names a feature file.
SegmentSource make_source(const CorpusEntry& entry, std::int64_t chunk_ms);

// Random but seed-determined scripted segments: 3-12 chunks, 1-3 tokens per
// chunk on average, occasional unstable tails, perturbed references.
std::vector<CorpusEntry> synthesize_corpus(int segments, std::uint64_t seed,
                                           std::int64_t chunk_ms = 500);

struct ModelSpec {
  enum class Kind { kScripted, kTcp, kStdio };
  Kind kind = Kind::kScripted;
  std::string path;     // scripted defaults file (may be empty)
  std::string host;
  int port = 0;
  std::string command;

  // "scripted", "scripted:PATH", "proto:HOST:PORT" or "proto:stdio:CMD".
  static ModelSpec parse(const std::string& text);
  std::string describe() const;
};

// "steady" (wall clock) or "fixed:MS" (every generate call costs MS of
// simulated time).
struct ClockSpec {
  std::optional<double> fixed_cost_ms;
  static ClockSpec parse(const std::string& text);
  std::string describe() const;
};

struct Grid {
  std::string param;
  std::vector<std::string> values;
  // "f=1,2,4,8"
  static Grid parse(const std::string& text);
};

struct RunConfig {
  std::filesystem::path corpus;
  std::vector<CorpusEntry> corpus_entries;  // used when `corpus` is empty
  ModelSpec model;
  std::string policy = "AlignAtt";
  std::map<std::string, std::string> policy_options;  // k, n, lambda, alpha, f, ...
  std::int64_t chunk_ms = 500;
  bool ideal = true;
  bool computation_aware = true;
  std::filesystem::path out;  // no artifacts when empty
  int jobs = 1;
  std::uint64_t seed = 0;
  ClockSpec clock;
  std::optional<Grid> grid;
  bool svg = false;
  std::optional<double> al_threshold_s;

  PolicyConfig make_policy() const;
  void validate() const;
};

// Builds a policy from option strings; options belonging to another policy
// kind are rejected.
PolicyConfig policy_from_options(const std::string& name,
                                 const std::map<std::string, std::string>& options);

struct RunReport {
  std::string policy;
  std::string params_json;
  std::vector<SegmentResult> results;
  std::vector<LatencyReport> ideal;
  std::vector<LatencyReport> computation_aware;
  std::optional<LatencyMeans> ideal_means;
  std::optional<LatencyMeans> ca_means;
  std::optional<BleuResult> bleu;
  std::vector<std::string> failed;

  bool partial_failure() const { return !failed.empty(); }
};

RunReport run_eval(const RunConfig& cfg);
std::string run_report_json(const RunReport& report);

struct CurveRow {
  std::string policy;
  std::string param;
  std::optional<double> bleu;
  double al = 0, laal = 0, atd = 0;           // seconds
  double al_ca = 0, laal_ca = 0, atd_ca = 0;  // seconds
};

inline constexpr const char* kCurveHeader = "policy,param,BLEU,AL,LAAL,ATD,AL_CA,LAAL_CA,ATD_CA";

CurveRow curve_row(const RunReport& report, const std::string& param_value);

struct SweepResult {
  std::vector<CurveRow> rows;  // sorted by AL
  int failed_segments = 0;
};

SweepResult sweep(const RunConfig& cfg);
std::string curve_csv(const std::vector<CurveRow>& rows);
std::string curve_svg(const std::vector<CurveRow>& rows);

}  // namespace streamsim

#endif  // STREAMSIM_HARNESS_HPP_
