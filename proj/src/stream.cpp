// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/stream.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "streamsim/error.hpp"

namespace streamsim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kModel: return "model_error";
    case ErrorCode::kContractViolation: return "contract_violation";
  }
  return "unknown";
}

std::int64_t SegmentSource::total_duration_ms() const {
  return std::accumulate(chunks.begin(), chunks.end(), std::int64_t{0},
                         [](std::int64_t acc, const Chunk& c) {
                           return acc + c.duration_ms;
                         });
}

Hypothesis::Hypothesis(Tokens tokens, int frames, std::vector<double> attention)
    : tokens_(std::move(tokens)), frames_(frames), attention_(std::move(attention)) {
  if (frames_ < 0) throw_invalid("hypothesis frame count must be non-negative");
  if (attention_.size() != tokens_.size() * static_cast<std::size_t>(frames_)) {
    throw Error(ErrorCode::kContractViolation,
                "attention has " + std::to_string(attention_.size()) +
                    " entries, expected " + std::to_string(tokens_.size()) + "x" +
                    std::to_string(frames_));
  }
}

std::span<const double> Hypothesis::row(int token) const {
  return std::span<const double>(attention_).subspan(
      static_cast<std::size_t>(token) * frames_, frames_);
}

void Hypothesis::normalize_rows() {
  for (int t = 0; t < size(); ++t) {
    auto begin = attention_.begin() + static_cast<std::ptrdiff_t>(t) * frames_;
    auto end = begin + frames_;
    double mass = 0.0;
    for (auto it = begin; it != end; ++it) {
      if (!(*it >= 0.0)) {
        throw Error(ErrorCode::kContractViolation, "negative attention entry");
      }
      mass += *it;
    }
    if (mass <= 0.0) {
      throw Error(ErrorCode::kContractViolation,
                  "attention row " + std::to_string(t) + " has no mass");
    }
    for (auto it = begin; it != end; ++it) *it /= mass;
  }
}

void Hypothesis::validate(double tolerance) const {
  if (attention_.size() != tokens_.size() * static_cast<std::size_t>(frames_)) {
    throw Error(ErrorCode::kContractViolation, "attention shape mismatch");
  }
  for (int t = 0; t < size(); ++t) {
    double mass = 0.0;
    for (double v : row(t)) {
      if (!(v >= 0.0)) {
        throw Error(ErrorCode::kContractViolation, "negative attention entry");
      }
      mass += v;
    }
    if (std::abs(mass - 1.0) > tolerance) {
      throw Error(ErrorCode::kContractViolation,
                  "attention row " + std::to_string(t) + " sums to " +
                      std::to_string(mass));
    }
  }
}

std::vector<Chunk> chunk_stream(std::int64_t total_duration_ms,
                                std::int64_t chunk_ms) {
  if (total_duration_ms <= 0 || chunk_ms <= 0) {
    throw_invalid("chunk_stream: durations must be positive (total=" +
                  std::to_string(total_duration_ms) +
                  ", chunk=" + std::to_string(chunk_ms) + ")");
  }
  std::vector<Chunk> chunks;
  chunks.reserve(static_cast<std::size_t>((total_duration_ms + chunk_ms - 1) / chunk_ms));
  std::int64_t remaining = total_duration_ms;
  int index = 1;
  while (remaining > 0) {
    const std::int64_t d = std::min(remaining, chunk_ms);
    chunks.push_back(Chunk{index++, d, {}});
    remaining -= d;
  }
  return chunks;
}

SegmentSource make_segment(std::string id, std::int64_t total_duration_ms,
                           std::int64_t chunk_ms,
                           std::optional<std::string> reference) {
  return SegmentSource{std::move(id), chunk_stream(total_duration_ms, chunk_ms),
                       std::move(reference)};
}

std::int64_t elapsed_source_ms(const SegmentSource& segment, int chunks_read) {
  if (chunks_read < 0 || chunks_read > segment.chunk_count()) {
    throw_invalid("elapsed_source_ms: chunks_read " + std::to_string(chunks_read) +
                  " outside [0, " + std::to_string(segment.chunk_count()) + "]");
  }
  std::int64_t total = 0;
  for (int i = 0; i < chunks_read; ++i) total += segment.chunks[i].duration_ms;
  return total;
}

Tokens split_whitespace(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace streamsim
