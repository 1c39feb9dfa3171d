/*
 * Copyright (C) 2026 The streamsim Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of libstreamsim. Every call returns an ss_status; on failure
 * ss_last_error() describes the problem for the calling thread. Objects are
 * opaque handles released with their matching *_free function. Text results
 * are returned as ss_text handles owned by the caller.
 */

#ifndef STREAMSIM_STREAMSIM_H_
#define STREAMSIM_STREAMSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SS_API __declspec(dllexport)
#else
#define SS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_INVALID_ARGUMENT = 1,
  SS_UNDEFINED_METRIC = 2,
  SS_PARSE_ERROR = 3,
  SS_IO_ERROR = 4,
  SS_MODEL_ERROR = 5,
  SS_CONTRACT_VIOLATION = 6,
  /* The run finished but some segments failed; results are still returned. */
  SS_PARTIAL_FAILURE = 7,
  SS_INTERNAL_ERROR = 8
} ss_status;

SS_API const char* ss_version(void);
SS_API const char* ss_status_name(ss_status status);
/* Message of the last failed call on this thread; "" if none. */
SS_API const char* ss_last_error(void);

typedef struct ss_text ss_text;
SS_API const char* ss_text_data(const ss_text* text);
SS_API size_t ss_text_size(const ss_text* text);
SS_API void ss_text_free(ss_text* text);

/* ---- runs and sweeps ---------------------------------------------------- */

typedef struct ss_run_config ss_run_config;

SS_API ss_status ss_run_config_new(ss_run_config** out);
SS_API void ss_run_config_free(ss_run_config* config);

/*
 * Keys: corpus, model, policy, k, n, lambda, alpha, f, adjust_final_frame,
 * frontier_guard, chunk_ms, out, jobs, seed, grid, clock, svg, modes,
 * al_threshold. Values use the CLI spelling ("proto:localhost:9000",
 * "f=1,2,4", "fixed:200", "ideal,computation_aware").
 */
SS_API ss_status ss_run_config_set(ss_run_config* config, const char* key, const char* value);

/* Report JSON. Returns SS_PARTIAL_FAILURE (with a report) if segments failed. */
SS_API ss_status ss_run_eval(const ss_run_config* config, ss_text** report_json);

/* Curve CSV. Requires the "grid" key. */
SS_API ss_status ss_sweep(const ss_run_config* config, ss_text** csv);

/* Scripted corpus as JSON lines. */
SS_API ss_status ss_synthesize_corpus(int segments, uint64_t seed, int64_t chunk_ms,
                                      ss_text** jsonl);

/* ---- metrics ------------------------------------------------------------ */

typedef struct ss_latency {
  double al;
  double laal;
  double atd;
} ss_latency;

SS_API ss_status ss_latency_metrics(const double* delays_ms, size_t count,
                                    int64_t source_duration_ms, int ref_len,
                                    int64_t chunk_ms, double output_token_ms,
                                    ss_latency* out);

/* Emission logs (one JSON object per line) to a latency report JSON. */
SS_API ss_status ss_latency_report(const char* logs_jsonl, ss_text** report_json);

/* Newline-separated corpora, one segment per line. */
SS_API ss_status ss_bleu(const char* hyp_text, const char* ref_text, ss_text** result_json);

/* ---- subtitles ---------------------------------------------------------- */

/* Tagged text plus per-token frame alignment to SRT and a conformity report.
 * total_frames may be 0 when unknown. */
SS_API ss_status ss_subtitle(const char* tagged_text, const int* alignment, size_t count,
                             int64_t frame_ms, int total_frames, ss_text** srt,
                             ss_text** conformity_json);

SS_API ss_status ss_srt_conformity(const char* srt_text, ss_text** conformity_json);

#ifdef __cplusplus
}
#endif

#endif /* STREAMSIM_STREAMSIM_H_ */
