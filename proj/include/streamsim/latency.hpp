// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_LATENCY_HPP_
#define STREAMSIM_LATENCY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "streamsim/runner.hpp"

namespace streamsim {

// Per-token delays of one segment together with the lengths the lagging
// metrics normalise by. All times are milliseconds.
struct DelayProfile {
  std::vector<double> delays_ms;
  std::int64_t source_duration_ms = 0;
  int ref_len = 0;
  std::int64_t chunk_ms = 0;
  double output_token_ms = 0.0;

  int hyp_len() const { return static_cast<int>(delays_ms.size()); }

  // kUndefinedMetric for empty delays or a zero-length source,
  // kInvalidArgument for the remaining invariants.
  void validate() const;
};

double average_lagging(const DelayProfile& p);

// Same as average_lagging but the oracle rate uses max(|Y|, |Y*|).
double length_adaptive_al(const DelayProfile& p);

// Emission end-times queue behind one another (each lasting output_token_ms)
// and token i is matched to input chunk min(i, chunks fully read at d_i).
double average_token_delay(const DelayProfile& p);

enum class LatencyMode { kIdeal, kComputationAware };

const char* latency_mode_name(LatencyMode mode);

struct LatencyReport {
  std::string segment_id;
  LatencyMode mode = LatencyMode::kIdeal;
  double al = 0.0;
  double laal = 0.0;
  double atd = 0.0;
  bool ref_len_fallback = false;  // reference missing, |Y*| := |Y|
};

DelayProfile make_profile(const SegmentResult& log, int ref_len, LatencyMode mode);

LatencyReport compute_report(const SegmentResult& log,
                             std::span<const std::string> reference,
                             LatencyMode mode);

struct LatencyMeans {
  double al = 0.0;
  double laal = 0.0;
  double atd = 0.0;
  int segments = 0;
};

LatencyMeans mean_report(std::span<const LatencyReport> reports);

}  // namespace streamsim

#endif  // STREAMSIM_LATENCY_HPP_
