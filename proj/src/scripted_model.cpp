// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/scripted_model.hpp"

#include <cmath>
#include <cstdlib>

#include "streamsim/error.hpp"

namespace streamsim {

void ScriptedModelConfig::validate(int chunk_count) const {
  if (alignment.size() != script_tokens.size()) {
    throw_invalid("scripted model: alignment length " + std::to_string(alignment.size()) +
                  " differs from script length " +
                  std::to_string(script_tokens.size()));
  }
  int prev = 1;
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    if (alignment[i] < prev) {
      throw_invalid("scripted model: alignment must be non-decreasing and >= 1 (token " +
                    std::to_string(i) + ")");
    }
    prev = alignment[i];
  }
  if (chunk_count > 0 && !alignment.empty() && alignment.back() > chunk_count) {
    throw_invalid("scripted model: token aligned to chunk " +
                  std::to_string(alignment.back()) + " but segment has " +
                  std::to_string(chunk_count) + " chunks");
  }
  if (instability_depth < 0) throw_invalid("scripted model: instability_depth < 0");
  if (!(attention_temperature > 0.0)) {
    throw_invalid("scripted model: attention_temperature must be positive");
  }
  if (frames_per_chunk <= 0) throw_invalid("scripted model: frames_per_chunk must be positive");
}

std::string placeholder_token(const std::string& token, int position,
                              int chunks_read) {
  std::string out = "unk" + std::to_string(position) + "_" + std::to_string(chunks_read);
  if (out == token) out += "x";
  return out;
}

int peak_frame(int chunk, int frames_per_chunk) {
  return (chunk - 1) * frames_per_chunk + (frames_per_chunk + 1) / 2;
}

Hypothesis scripted_generate(const ScriptedModelConfig& cfg, int total_chunks,
                             int chunks_read,
                             std::span<const std::string> forced_prefix) {
  if (chunks_read < 1 || chunks_read > total_chunks) {
    throw_invalid("scripted_generate: chunks_read " + std::to_string(chunks_read) +
                  " outside [1, " + std::to_string(total_chunks) + "]");
  }

  std::size_t visible = 0;
  while (visible < cfg.alignment.size() && cfg.alignment[visible] <= chunks_read) ++visible;

  if (forced_prefix.size() > visible) {
    throw Error(ErrorCode::kContractViolation,
                "scripted_generate: forced prefix of " + std::to_string(forced_prefix.size()) +
                    " tokens exceeds the " + std::to_string(visible) + " visible tokens");
  }

  Tokens tokens(cfg.script_tokens.begin(), cfg.script_tokens.begin() + visible);
  if (chunks_read < total_chunks) {
    const std::size_t unstable =
        std::min(visible, static_cast<std::size_t>(cfg.instability_depth));
    for (std::size_t i = visible - unstable; i < visible; ++i) {
      tokens[i] = placeholder_token(tokens[i], static_cast<int>(i), chunks_read);
    }
  }
  std::copy(forced_prefix.begin(), forced_prefix.end(), tokens.begin());

  const int frames = chunks_read * cfg.frames_per_chunk;
  std::vector<double> attention(visible * frames);
  for (std::size_t i = 0; i < visible; ++i) {
    const int peak = peak_frame(cfg.alignment[i], cfg.frames_per_chunk);
    double* row = attention.data() + i * frames;
    double mass = 0.0;
    for (int j = 0; j < frames; ++j) {
      row[j] = std::exp(-std::abs(j + 1 - peak) / cfg.attention_temperature);
      mass += row[j];
    }
    for (int j = 0; j < frames; ++j) row[j] /= mass;
  }
  return Hypothesis(std::move(tokens), frames, std::move(attention));
}

ScriptedModel::ScriptedModel(ScriptedModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

void ScriptedModel::reset(const SegmentSource& segment) {
  cfg_.validate(segment.chunk_count());
  total_chunks_ = segment.chunk_count();
}

Hypothesis ScriptedModel::generate(std::span<const Chunk> read,
                                   std::span<const std::string> forced_prefix) {
  if (total_chunks_ == 0) {
    throw Error(ErrorCode::kContractViolation, "scripted model used before reset");
  }
  return scripted_generate(cfg_, total_chunks_, static_cast<int>(read.size()),
                           forced_prefix);
}

}  // namespace streamsim
