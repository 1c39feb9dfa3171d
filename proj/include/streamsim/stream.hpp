// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_STREAM_HPP_
#define STREAMSIM_STREAM_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace streamsim {

using Tokens = std::vector<std::string>;

struct Chunk {
  int index = 0;                // 1-based within the segment
  std::int64_t duration_ms = 0;
  std::vector<float> payload;   // empty for scripted runs
};

struct SegmentSource {
  std::string id;
  std::vector<Chunk> chunks;
  std::optional<std::string> reference;

  std::int64_t total_duration_ms() const;
  int chunk_count() const { return static_cast<int>(chunks.size()); }
};

// Partial translation plus its token x frame cross-attention. Rows are
// stored contiguously, one per token.
class Hypothesis {
 public:
  Hypothesis() = default;
  Hypothesis(Tokens tokens, int frames, std::vector<double> attention);

  const Tokens& tokens() const { return tokens_; }
  int size() const { return static_cast<int>(tokens_.size()); }
  int frames() const { return frames_; }
  std::span<const double> row(int token) const;

  // Rescales every row to unit mass. Throws if a row is negative or empty.
  void normalize_rows();

  // Checks row count, column count, non-negativity and unit row mass.
  void validate(double tolerance = 1e-6) const;

  bool operator==(const Hypothesis&) const = default;

 private:
  Tokens tokens_;
  int frames_ = 0;
  std::vector<double> attention_;
};

// Partitions a source into chunk_ms pieces; the last one may be shorter.
std::vector<Chunk> chunk_stream(std::int64_t total_duration_ms,
                                std::int64_t chunk_ms);

SegmentSource make_segment(std::string id, std::int64_t total_duration_ms,
                           std::int64_t chunk_ms,
                           std::optional<std::string> reference = {});

// Source time covered by the first chunks_read chunks.
std::int64_t elapsed_source_ms(const SegmentSource& segment, int chunks_read);

// Incremental generator contract. An instance serves one segment at a time
// and is not safe for concurrent use.
class IncrementalModel {
 public:
  virtual ~IncrementalModel() = default;

  virtual void reset(const SegmentSource& segment) = 0;

  // `read` is the prefix of chunks received so far. The returned tokens must
  // start with `forced_prefix` verbatim.
  virtual Hypothesis generate(std::span<const Chunk> read,
                              std::span<const std::string> forced_prefix) = 0;
};

Tokens split_whitespace(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);

}  // namespace streamsim

#endif  // STREAMSIM_STREAM_HPP_
