// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/subtitles.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "streamsim/error.hpp"
#include "streamsim/stream.hpp"

namespace streamsim {
namespace {

void flush_line(std::vector<std::string>& lines, Tokens& current) {
  if (!current.empty()) lines.push_back(join_tokens(current));
  current.clear();
}

void check_line_count(const TaggedBlock& block, std::size_t index) {
  if (block.lines.size() > 2) {
    std::string shown;
    for (const auto& l : block.lines) shown += (shown.empty() ? "" : " | ") + l;
    throw_invalid("subtitle block " + std::to_string(index + 1) + " has " +
                  std::to_string(block.lines.size()) + " lines (max 2): " + shown);
  }
}

[[noreturn]] void srt_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse, "SRT line " + std::to_string(line_no) + ": " + what);
}

bool parse_digits(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  out = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + (c - '0');
  }
  return true;
}

// HH:MM:SS,mmm with at least two hour digits.
bool parse_timecode(std::string_view s, std::int64_t& ms) {
  if (s.size() < 12) return false;
  const std::size_t h_end = s.size() - 10;
  if (s[h_end] != ':' || s[h_end + 3] != ':' || s[h_end + 6] != ',') return false;
  std::int64_t h, m, sec, milli;
  if (h_end < 2 || !parse_digits(s.substr(0, h_end), h) ||
      !parse_digits(s.substr(h_end + 1, 2), m) || !parse_digits(s.substr(h_end + 4, 2), sec) ||
      !parse_digits(s.substr(h_end + 7, 3), milli)) {
    return false;
  }
  if (m >= 60 || sec >= 60) return false;
  ms = ((h * 60 + m) * 60 + sec) * 1000 + milli;
  return true;
}

void validate_timed(std::span<const SubtitleBlock> blocks) {
  std::int64_t prev_end = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.lines.empty() || b.lines.size() > 2) {
      throw_invalid("subtitle block " + std::to_string(i + 1) + " must have 1 or 2 lines");
    }
    if (b.start_ms < 0 || b.end_ms <= b.start_ms) {
      throw_invalid("subtitle block " + std::to_string(i + 1) + " has no positive duration");
    }
    if (b.start_ms < prev_end) {
      throw_invalid("subtitle block " + std::to_string(i + 1) + " overlaps its predecessor");
    }
    prev_end = b.end_ms;
  }
}

}  // namespace

std::vector<TaggedBlock> parse_tagged(std::string_view text) {
  std::vector<TaggedBlock> blocks;
  TaggedBlock block;
  Tokens line;
  auto close_block = [&] {
    flush_line(block.lines, line);
    if (!block.lines.empty()) {
      check_line_count(block, blocks.size());
      blocks.push_back(std::move(block));
    }
    block = TaggedBlock{};
  };
  for (auto& token : split_whitespace(text)) {
    if (token == kEndOfLine) {
      flush_line(block.lines, line);
    } else if (token == kEndOfBlock) {
      close_block();
    } else {
      line.push_back(std::move(token));
    }
  }
  close_block();
  return blocks;
}

std::string render_tagged(std::span<const TaggedBlock> blocks) {
  std::string out;
  for (const auto& block : blocks) {
    for (std::size_t i = 0; i < block.lines.size(); ++i) {
      if (!out.empty()) out += ' ';
      out += block.lines[i];
      if (i + 1 < block.lines.size()) {
        out += ' ';
        out += kEndOfLine;
      }
    }
    out += ' ';
    out += kEndOfBlock;
  }
  return out;
}

std::vector<SubtitleBlock> assign_timestamps(std::span<const TaggedBlock> blocks,
                                             std::span<const int> alignment,
                                             std::int64_t frame_ms, int total_frames) {
  if (frame_ms <= 0) throw_invalid("assign_timestamps: frame_ms must be positive");
  std::size_t token_count = 0;
  for (const auto& b : blocks) {
    for (const auto& l : b.lines) token_count += split_whitespace(l).size();
  }
  if (alignment.size() != token_count) {
    throw_invalid("assign_timestamps: " + std::to_string(alignment.size()) +
                  " aligned frames for " + std::to_string(token_count) + " tokens");
  }
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    if (alignment[i] < 1 || (i > 0 && alignment[i] < alignment[i - 1])) {
      throw_invalid("assign_timestamps: alignment must be non-decreasing and >= 1 (token " +
                    std::to_string(i + 1) + ")");
    }
    if (total_frames > 0 && alignment[i] > total_frames) {
      throw_invalid("assign_timestamps: token " + std::to_string(i + 1) +
                    " aligned past the last frame");
    }
  }

  std::vector<SubtitleBlock> out;
  out.reserve(blocks.size());
  std::size_t next = 0;
  std::int64_t prev_end = 0;
  for (const auto& b : blocks) {
    std::size_t n = 0;
    for (const auto& l : b.lines) n += split_whitespace(l).size();
    if (n == 0) continue;
    const int first = alignment[next];
    const int last = alignment[next + n - 1];
    next += n;

    SubtitleBlock timed{b.lines, (first - 1) * frame_ms, last * frame_ms};
    timed.start_ms = std::max(timed.start_ms, prev_end);
    if (timed.end_ms <= timed.start_ms) {
      timed.end_ms = timed.start_ms + frame_ms;
      if (total_frames > 0 && timed.end_ms > total_frames * frame_ms) {
        throw_invalid("assign_timestamps: block " + std::to_string(out.size() + 1) +
                      " has no room before the end of the source");
      }
    }
    prev_end = timed.end_ms;
    out.push_back(std::move(timed));
  }
  return out;
}

std::string format_timecode(std::int64_t ms) {
  if (ms < 0) throw_invalid("negative timecode");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(ms / 3600000), static_cast<long long>(ms / 60000 % 60),
                static_cast<long long>(ms / 1000 % 60), static_cast<long long>(ms % 1000));
  return buf;
}

std::string write_srt(std::span<const SubtitleBlock> blocks) {
  validate_timed(blocks);
  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out += std::to_string(i + 1) + "\n";
    out += format_timecode(blocks[i].start_ms) + " --> " + format_timecode(blocks[i].end_ms) + "\n";
    for (const auto& line : blocks[i].lines) out += line + "\n";
    out += "\n";
  }
  return out;
}

std::vector<SubtitleBlock> parse_srt(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = eol + 1;
  }

  std::vector<SubtitleBlock> blocks;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    std::int64_t index;
    if (!parse_digits(lines[i], index)) srt_error(i + 1, "expected block index, got '" + lines[i] + "'");
    ++i;
    if (i >= lines.size()) srt_error(i, "missing timecode line");
    const std::string& tc = lines[i];
    const std::size_t arrow = tc.find(" --> ");
    SubtitleBlock block;
    if (arrow == std::string::npos ||
        !parse_timecode(std::string_view(tc).substr(0, arrow), block.start_ms) ||
        !parse_timecode(std::string_view(tc).substr(arrow + 5), block.end_ms)) {
      srt_error(i + 1, "malformed timecode '" + tc + "'");
    }
    ++i;
    while (i < lines.size() && !lines[i].empty()) block.lines.push_back(lines[i++]);
    if (block.lines.empty()) srt_error(i, "block without text");
    if (block.lines.size() > 2) srt_error(i, "block with more than two lines");
    if (block.end_ms <= block.start_ms) srt_error(i, "block end does not follow its start");
    blocks.push_back(std::move(block));
  }
  return blocks;
}

int count_characters(std::string_view line) {
  int n = 0;
  for (char c : line) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

double cpl_conformity(std::span<const SubtitleBlock> blocks) {
  int total = 0;
  int conform = 0;
  for (const auto& b : blocks) {
    for (const auto& line : b.lines) {
      ++total;
      if (count_characters(line) <= kMaxCharsPerLine) ++conform;
    }
  }
  if (total == 0) throw Error(ErrorCode::kUndefinedMetric, "CPL: no subtitle lines");
  return 100.0 * conform / total;
}

double cps_conformity(std::span<const SubtitleBlock> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::kUndefinedMetric, "CPS: no subtitle blocks");
  int conform = 0;
  for (const auto& b : blocks) {
    const std::int64_t duration = b.end_ms - b.start_ms;
    if (duration <= 0) throw_invalid("CPS: block with non-positive duration");
    std::int64_t chars = 0;
    for (const auto& line : b.lines) chars += count_characters(line);
    // chars / seconds <= 21, kept in integers
    if (chars * 1000 <= std::int64_t{kMaxCharsPerSecond} * duration) ++conform;
  }
  return 100.0 * conform / static_cast<double>(blocks.size());
}

ConformityReport conformity(std::span<const SubtitleBlock> blocks) {
  ConformityReport r;
  r.cpl_pct = cpl_conformity(blocks);
  r.cps_pct = cps_conformity(blocks);
  r.block_count = static_cast<int>(blocks.size());
  for (const auto& b : blocks) r.line_count += static_cast<int>(b.lines.size());
  return r;
}

std::string conformity_json(const ConformityReport& r) {
  nlohmann::json j;
  j["cpl_pct"] = r.cpl_pct;
  j["cps_pct"] = r.cps_pct;
  j["line_count"] = r.line_count;
  j["block_count"] = r.block_count;
  return j.dump();
}

}  // namespace streamsim
