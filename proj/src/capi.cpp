// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/streamsim.h"

#include <exception>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "streamsim/bleu.hpp"
#include "streamsim/error.hpp"
#include "streamsim/harness.hpp"
#include "streamsim/latency.hpp"
#include "streamsim/subtitles.hpp"

struct ss_text {
  std::string value;
};

struct ss_run_config {
  streamsim::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

ss_status status_for(streamsim::ErrorCode code) {
  using streamsim::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return SS_INVALID_ARGUMENT;
    case ErrorCode::kUndefinedMetric: return SS_UNDEFINED_METRIC;
    case ErrorCode::kParse: return SS_PARSE_ERROR;
    case ErrorCode::kIo: return SS_IO_ERROR;
    case ErrorCode::kModel: return SS_MODEL_ERROR;
    case ErrorCode::kContractViolation: return SS_CONTRACT_VIOLATION;
  }
  return SS_INTERNAL_ERROR;
}

template <class F>
ss_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const streamsim::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SS_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SS_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown exception";
    return SS_INTERNAL_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) streamsim::throw_invalid(std::string(what) + " must not be null");
}

ss_text* make_text(std::string value) { return new ss_text{std::move(value)}; }

std::vector<std::string> split_lines(const char* text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void set_option(streamsim::RunConfig& c, const std::string& key, const std::string& value) {
  using namespace streamsim;
  auto integer = [&](long long lo) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || v < lo) {
      throw_invalid(key + ": '" + value + "' is not a valid integer >= " + std::to_string(lo));
    }
    return v;
  };

  if (key == "corpus") {
    c.corpus = value;
  } else if (key == "model") {
    c.model = ModelSpec::parse(value);
  } else if (key == "policy") {
    parse_policy_kind(value);
    c.policy = value;
  } else if (key == "k" || key == "n" || key == "lambda" || key == "alpha" || key == "f" ||
             key == "adjust_final_frame" || key == "frontier_guard") {
    c.policy_options[key] = value;
  } else if (key == "chunk_ms") {
    c.chunk_ms = integer(1);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(integer(1));
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(integer(0));
  } else if (key == "grid") {
    c.grid = Grid::parse(value);
  } else if (key == "clock") {
    c.clock = ClockSpec::parse(value);
  } else if (key == "svg") {
    c.svg = value == "1" || value == "true";
  } else if (key == "modes") {
    bool ideal = false;
    bool computation_aware = false;
    std::istringstream in(value);
    std::string mode;
    while (std::getline(in, mode, ',')) {
      if (mode == "ideal") {
        ideal = true;
      } else if (mode == "computation_aware" || mode == "ca") {
        computation_aware = true;
      } else {
        throw_invalid("modes: unknown mode '" + mode + "'");
      }
    }
    if (!ideal && !computation_aware) throw_invalid("modes: select ideal and/or computation_aware");
    c.ideal = ideal;
    c.computation_aware = computation_aware;
  } else if (key == "al_threshold") {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw_invalid("al_threshold: not a number");
    c.al_threshold_s = v;
  } else {
    throw_invalid("unknown run option '" + key + "'");
  }
}

}  // namespace

extern "C" {

const char* ss_version(void) { return "0.1.0"; }

const char* ss_status_name(ss_status status) {
  switch (status) {
    case SS_OK: return "ok";
    case SS_INVALID_ARGUMENT: return "invalid_argument";
    case SS_UNDEFINED_METRIC: return "undefined_metric";
    case SS_PARSE_ERROR: return "parse_error";
    case SS_IO_ERROR: return "io_error";
    case SS_MODEL_ERROR: return "model_error";
    case SS_CONTRACT_VIOLATION: return "contract_violation";
    case SS_PARTIAL_FAILURE: return "partial_failure";
    case SS_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

const char* ss_last_error(void) { return g_last_error.c_str(); }

const char* ss_text_data(const ss_text* text) { return text ? text->value.c_str() : ""; }
size_t ss_text_size(const ss_text* text) { return text ? text->value.size() : 0; }
void ss_text_free(ss_text* text) { delete text; }

ss_status ss_run_config_new(ss_run_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ss_run_config{};
    return SS_OK;
  });
}

void ss_run_config_free(ss_run_config* config) { delete config; }

ss_status ss_run_config_set(ss_run_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    set_option(config->config, key, value);
    return SS_OK;
  });
}

ss_status ss_run_eval(const ss_run_config* config, ss_text** report_json) {
  return guarded([&] {
    require(config, "config");
    require(report_json, "report_json");
    *report_json = nullptr;
    const auto report = streamsim::run_eval(config->config);
    *report_json = make_text(streamsim::run_report_json(report));
    return report.partial_failure() ? SS_PARTIAL_FAILURE : SS_OK;
  });
}

ss_status ss_sweep(const ss_run_config* config, ss_text** csv) {
  return guarded([&] {
    require(config, "config");
    require(csv, "csv");
    *csv = nullptr;
    const auto result = streamsim::sweep(config->config);
    *csv = make_text(streamsim::curve_csv(result.rows));
    return result.failed_segments > 0 ? SS_PARTIAL_FAILURE : SS_OK;
  });
}

ss_status ss_synthesize_corpus(int segments, uint64_t seed, int64_t chunk_ms, ss_text** jsonl) {
  return guarded([&] {
    require(jsonl, "jsonl");
    *jsonl = make_text(streamsim::corpus_jsonl(streamsim::synthesize_corpus(segments, seed, chunk_ms)));
    return SS_OK;
  });
}

ss_status ss_latency_metrics(const double* delays_ms, size_t count, int64_t source_duration_ms,
                             int ref_len, int64_t chunk_ms, double output_token_ms,
                             ss_latency* out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) require(delays_ms, "delays_ms");
    streamsim::DelayProfile p;
    p.delays_ms.assign(delays_ms, delays_ms + count);
    p.source_duration_ms = source_duration_ms;
    p.ref_len = ref_len;
    p.chunk_ms = chunk_ms;
    p.output_token_ms = output_token_ms;
    out->al = streamsim::average_lagging(p);
    out->laal = streamsim::length_adaptive_al(p);
    out->atd = streamsim::average_token_delay(p);
    return SS_OK;
  });
}

ss_status ss_latency_report(const char* logs_jsonl, ss_text** report_json) {
  return guarded([&] {
    using namespace streamsim;
    require(logs_jsonl, "logs_jsonl");
    require(report_json, "report_json");
    *report_json = nullptr;
    std::vector<LatencyReport> ideal;
    std::vector<LatencyReport> ca;
    nlohmann::json per = nlohmann::json::array();
    nlohmann::json skipped = nlohmann::json::array();
    bool fallback = false;
    for (const auto& line : split_lines(logs_jsonl)) {
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const SegmentResult log = parse_emission_log(line);
      if (log.failed || log.emissions.empty()) {
        skipped.push_back(log.segment_id);
        continue;
      }
      const Tokens ref = log.reference ? split_whitespace(*log.reference) : Tokens{};
      for (auto mode : {LatencyMode::kIdeal, LatencyMode::kComputationAware}) {
        const LatencyReport r = compute_report(log, ref, mode);
        fallback = fallback || r.ref_len_fallback;
        per.push_back({{"segment_id", r.segment_id},
                       {"mode", latency_mode_name(mode)},
                       {"AL", r.al},
                       {"LAAL", r.laal},
                       {"ATD", r.atd}});
        (mode == LatencyMode::kIdeal ? ideal : ca).push_back(r);
      }
    }
    if (ideal.empty()) throw Error(ErrorCode::kUndefinedMetric, "no scorable emission logs");
    auto means = [](const std::vector<LatencyReport>& v) {
      const LatencyMeans m = mean_report(v);
      return nlohmann::json{{"AL", m.al}, {"LAAL", m.laal}, {"ATD", m.atd}, {"segments", m.segments}};
    };
    nlohmann::json j;
    j["per_segment"] = std::move(per);
    j["means"] = {{"ideal", means(ideal)}, {"computation_aware", means(ca)}};
    j["skipped"] = std::move(skipped);
    if (fallback) j["warning"] = "some logs lack a reference; |Y*| fell back to |Y|";
    *report_json = make_text(j.dump());
    return SS_OK;
  });
}

ss_status ss_bleu(const char* hyp_text, const char* ref_text, ss_text** result_json) {
  return guarded([&] {
    require(hyp_text, "hyp_text");
    require(ref_text, "ref_text");
    require(result_json, "result_json");
    const auto hyps = split_lines(hyp_text);
    const auto refs = split_lines(ref_text);
    *result_json = make_text(streamsim::bleu_json(streamsim::corpus_bleu(hyps, refs)));
    return SS_OK;
  });
}

ss_status ss_subtitle(const char* tagged_text, const int* alignment, size_t count, int64_t frame_ms,
                      int total_frames, ss_text** srt, ss_text** conformity_json) {
  return guarded([&] {
    require(tagged_text, "tagged_text");
    require(srt, "srt");
    if (count > 0) require(alignment, "alignment");
    const auto blocks = streamsim::parse_tagged(tagged_text);
    const auto timed = streamsim::assign_timestamps(
        blocks, std::span<const int>(alignment, count), frame_ms, total_frames);
    std::string srt_text = streamsim::write_srt(timed);
    std::string report;
    if (conformity_json != nullptr) {
      report = streamsim::conformity_json(streamsim::conformity(timed));
    }
    *srt = make_text(std::move(srt_text));
    if (conformity_json != nullptr) *conformity_json = make_text(std::move(report));
    return SS_OK;
  });
}

ss_status ss_srt_conformity(const char* srt_text, ss_text** conformity_json) {
  return guarded([&] {
    require(srt_text, "srt_text");
    require(conformity_json, "conformity_json");
    const auto blocks = streamsim::parse_srt(srt_text);
    *conformity_json = make_text(streamsim::conformity_json(streamsim::conformity(blocks)));
    return SS_OK;
  });
}

}  // extern "C"
