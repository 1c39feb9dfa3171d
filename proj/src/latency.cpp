// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/latency.hpp"

#include <algorithm>

#include "log.hpp"
#include "streamsim/error.hpp"

namespace streamsim {
namespace {

// Lagging against an evenly paced oracle emitting one token every `rate` ms,
// averaged up to and including the first token emitted at or after source end.
double lagging(const DelayProfile& p, double rate) {
  const auto& d = p.delays_ms;
  const double source = static_cast<double>(p.source_duration_ms);
  std::size_t tau = d.size();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] >= source) {
      tau = i + 1;
      break;
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < tau; ++i) sum += d[i] - static_cast<double>(i) * rate;
  return sum / static_cast<double>(tau);
}

}  // namespace

void DelayProfile::validate() const {
  if (delays_ms.empty()) throw Error(ErrorCode::kUndefinedMetric, "latency: no emitted tokens");
  if (source_duration_ms <= 0) {
    throw Error(ErrorCode::kUndefinedMetric, "latency: source duration must be positive");
  }
  if (ref_len < 1) throw_invalid("latency: reference length must be >= 1");
  if (output_token_ms < 0.0) throw_invalid("latency: output token duration must be >= 0");
  for (std::size_t i = 1; i < delays_ms.size(); ++i) {
    if (delays_ms[i] < delays_ms[i - 1]) {
      throw_invalid("latency: delays must be non-decreasing (token " + std::to_string(i) + ")");
    }
  }
}

double average_lagging(const DelayProfile& p) {
  p.validate();
  return lagging(p, static_cast<double>(p.source_duration_ms) / p.ref_len);
}

double length_adaptive_al(const DelayProfile& p) {
  p.validate();
  return lagging(p, static_cast<double>(p.source_duration_ms) / std::max(p.hyp_len(), p.ref_len));
}

double average_token_delay(const DelayProfile& p) {
  p.validate();
  if (p.chunk_ms <= 0) throw_invalid("ATD: chunk_ms must be positive");

  const auto chunks = chunk_stream(p.source_duration_ms, p.chunk_ms);
  std::vector<double> chunk_end(chunks.size() + 1, 0.0);
  for (std::size_t j = 0; j < chunks.size(); ++j) {
    chunk_end[j + 1] = chunk_end[j] + static_cast<double>(chunks[j].duration_ms);
  }

  double emission_end = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.delays_ms.size(); ++i) {
    const double d = p.delays_ms[i];
    emission_end = std::max(d, emission_end) + p.output_token_ms;
    // chunk_end is sorted: count the chunks that ended by d.
    const auto fully_read = static_cast<std::size_t>(
        std::upper_bound(chunk_end.begin() + 1, chunk_end.end(), d) - (chunk_end.begin() + 1));
    const std::size_t matched = std::min(i + 1, fully_read);
    sum += emission_end - chunk_end[matched];
  }
  return sum / static_cast<double>(p.delays_ms.size());
}

const char* latency_mode_name(LatencyMode mode) {
  return mode == LatencyMode::kIdeal ? "ideal" : "computation_aware";
}

DelayProfile make_profile(const SegmentResult& log, int ref_len, LatencyMode mode) {
  DelayProfile p;
  p.source_duration_ms = log.total_source_ms;
  p.chunk_ms = log.chunk_ms;
  p.ref_len = ref_len;
  p.delays_ms.reserve(log.emissions.size());
  for (const auto& e : log.emissions) {
    p.delays_ms.push_back(mode == LatencyMode::kIdeal ? static_cast<double>(e.ideal_delay_ms)
                                                      : e.ca_delay_ms);
  }
  return p;
}

LatencyReport compute_report(const SegmentResult& log,
                             std::span<const std::string> reference,
                             LatencyMode mode) {
  if (log.failed) {
    throw Error(ErrorCode::kUndefinedMetric,
                "latency: segment '" + log.segment_id + "' failed: " + log.failure);
  }
  LatencyReport report;
  report.segment_id = log.segment_id;
  report.mode = mode;
  int ref_len = static_cast<int>(reference.size());
  if (ref_len == 0) {
    ref_len = static_cast<int>(log.emissions.size());
    report.ref_len_fallback = true;
    log::warn("segment '" + log.segment_id + "': no reference, using hypothesis length");
  }
  const DelayProfile p = make_profile(log, ref_len, mode);
  report.al = average_lagging(p);
  report.laal = length_adaptive_al(p);
  report.atd = average_token_delay(p);
  return report;
}

LatencyMeans mean_report(std::span<const LatencyReport> reports) {
  LatencyMeans m;
  for (const auto& r : reports) {
    m.al += r.al;
    m.laal += r.laal;
    m.atd += r.atd;
  }
  m.segments = static_cast<int>(reports.size());
  if (m.segments > 0) {
    m.al /= m.segments;
    m.laal /= m.segments;
    m.atd /= m.segments;
  }
  return m;
}

}  // namespace streamsim
