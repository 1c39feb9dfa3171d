// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_SUBTITLES_HPP_
#define STREAMSIM_SUBTITLES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace streamsim {

inline constexpr std::string_view kEndOfLine = "<eol>";
inline constexpr std::string_view kEndOfBlock = "<eob>";
inline constexpr int kMaxCharsPerLine = 42;
inline constexpr int kMaxCharsPerSecond = 21;

// One subtitle block before timing; each line holds space-joined tokens.
struct TaggedBlock {
  std::vector<std::string> lines;
  bool operator==(const TaggedBlock&) const = default;
};

struct SubtitleBlock {
  std::vector<std::string> lines;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  bool operator==(const SubtitleBlock&) const = default;
};

// Splits on <eob> and <eol>. Unterminated trailing text becomes the last
// block; empty lines and blocks are dropped. More than two lines in a block
// is an error.
std::vector<TaggedBlock> parse_tagged(std::string_view text);
std::string render_tagged(std::span<const TaggedBlock> blocks);

// `alignment` gives a 1-based frame for every token of every block, in
// order. A block spans from its first token's frame start to its last
// token's frame end, starting no earlier than the previous block's end. A
// block left without duration by that clamp is stretched by one frame, up to
// `total_frames` when given.
std::vector<SubtitleBlock> assign_timestamps(std::span<const TaggedBlock> blocks,
                                             std::span<const int> alignment,
                                             std::int64_t frame_ms, int total_frames = 0);

std::string format_timecode(std::int64_t ms);
std::string write_srt(std::span<const SubtitleBlock> blocks);
std::vector<SubtitleBlock> parse_srt(std::string_view text);

// Characters as seen by a reader: UTF-8 code points, spaces and punctuation
// included.
int count_characters(std::string_view line);

double cpl_conformity(std::span<const SubtitleBlock> blocks);
double cps_conformity(std::span<const SubtitleBlock> blocks);

struct ConformityReport {
  double cpl_pct = 0.0;
  double cps_pct = 0.0;
  int line_count = 0;
  int block_count = 0;
};

ConformityReport conformity(std::span<const SubtitleBlock> blocks);
std::string conformity_json(const ConformityReport& report);

}  // namespace streamsim

#endif  // STREAMSIM_SUBTITLES_HPP_
