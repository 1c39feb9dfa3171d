// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_SCRIPTED_MODEL_HPP_
#define STREAMSIM_SCRIPTED_MODEL_HPP_

#include <span>
#include <string>
#include <vector>

#include "streamsim/stream.hpp"

namespace streamsim {

// Deterministic stand-in for an offline translation model. Each target token
// becomes visible once the chunk it is aligned to has been read; the last
// `instability_depth` visible tokens are garbled until the source ends.
struct ScriptedModelConfig {
  Tokens script_tokens;
  std::vector<int> alignment;     // 1-based chunk per token, non-decreasing
  int instability_depth = 0;
  double attention_temperature = 1.0;
  int frames_per_chunk = 1;

  // Throws kInvalidArgument; pass chunk_count > 0 to also bound the alignment.
  void validate(int chunk_count = 0) const;
};

// Placeholder substituted for an unstable token at 0-based `position`.
std::string placeholder_token(const std::string& token, int position,
                              int chunks_read);

// 1-based frame where a token aligned to `chunk` peaks: the middle frame of
// the chunk (lower middle for even frames_per_chunk).
int peak_frame(int chunk, int frames_per_chunk);

Hypothesis scripted_generate(const ScriptedModelConfig& cfg, int total_chunks,
                             int chunks_read,
                             std::span<const std::string> forced_prefix);

class ScriptedModel final : public IncrementalModel {
 public:
  explicit ScriptedModel(ScriptedModelConfig cfg);

  void reset(const SegmentSource& segment) override;
  Hypothesis generate(std::span<const Chunk> read,
                      std::span<const std::string> forced_prefix) override;

  const ScriptedModelConfig& config() const { return cfg_; }

 private:
  ScriptedModelConfig cfg_;
  int total_chunks_ = 0;
};

}  // namespace streamsim

#endif  // STREAMSIM_SCRIPTED_MODEL_HPP_
