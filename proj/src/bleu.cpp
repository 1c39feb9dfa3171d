// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "log.hpp"
#include "streamsim/error.hpp"

namespace streamsim {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_period_or_comma(char c) { return c == '.' || c == ','; }

// Symbols that are always split off: { | } ~ [ \ ] ^ _ ` space ! " # $ % &
// ( ) * + : ; < = > ? @ /
bool is_split_symbol(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '{' && u <= '~') || (u >= '[' && u <= '`') || (u >= ' ' && u <= '&') ||
         (u >= '(' && u <= '+') || (u >= ':' && u <= '@') || u == '/';
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// The passes below reproduce left-to-right, non-overlapping regex
// substitution over two-character patterns.
template <class Match, class Emit>
std::string substitute_pairs(const std::string& in, Match match, Emit emit) {
  std::string out;
  out.reserve(in.size() * 2);
  std::size_t i = 0;
  while (i < in.size()) {
    if (i + 1 < in.size() && match(in[i], in[i + 1])) {
      emit(out, in[i], in[i + 1]);
      i += 2;
    } else {
      out += in[i++];
    }
  }
  return out;
}

using NgramCounts = std::unordered_map<std::string, std::int64_t>;

NgramCounts count_ngrams(const Tokens& tokens, int n) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

Tokens tokenize_13a(std::string_view text) {
  std::string line(text);
  replace_all(line, "<skipped>", "");
  replace_all(line, "-\n", "");
  std::replace(line.begin(), line.end(), '\n', ' ');
  if (line.find('&') != std::string::npos) {
    replace_all(line, "&quot;", "\"");
    replace_all(line, "&amp;", "&");
    replace_all(line, "&lt;", "<");
    replace_all(line, "&gt;", ">");
  }
  line = " " + line + " ";

  std::string spaced;
  spaced.reserve(line.size() * 2);
  for (char c : line) {
    if (is_split_symbol(c)) {
      spaced += ' ';
      spaced += c;
      spaced += ' ';
    } else {
      spaced += c;
    }
  }
  // Period and comma unless preceded by a digit.
  spaced = substitute_pairs(
      spaced, [](char a, char b) { return !is_digit(a) && is_period_or_comma(b); },
      [](std::string& o, char a, char b) { o += a; o += ' '; o += b; o += ' '; });
  // Period and comma unless followed by a digit.
  spaced = substitute_pairs(
      spaced, [](char a, char b) { return is_period_or_comma(a) && !is_digit(b); },
      [](std::string& o, char a, char b) { o += ' '; o += a; o += ' '; o += b; });
  // Dash preceded by a digit.
  spaced = substitute_pairs(
      spaced, [](char a, char b) { return is_digit(a) && b == '-'; },
      [](std::string& o, char a, char b) { o += a; o += ' '; o += b; o += ' '; });
  return split_whitespace(spaced);
}

BleuResult corpus_bleu(std::span<const std::string> hyps, std::span<const std::string> refs) {
  if (hyps.size() != refs.size()) {
    throw_invalid("BLEU: " + std::to_string(hyps.size()) + " hypotheses but " +
                  std::to_string(refs.size()) + " references");
  }
  if (hyps.empty()) throw_invalid("BLEU: empty corpus");

  BleuResult r;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const Tokens hyp = tokenize_13a(hyps[s]);
    const Tokens ref = tokenize_13a(refs[s]);
    r.hyp_len += static_cast<std::int64_t>(hyp.size());
    r.ref_len += static_cast<std::int64_t>(ref.size());
    for (int n = 1; n <= kBleuMaxOrder; ++n) {
      const NgramCounts hyp_counts = count_ngrams(hyp, n);
      const NgramCounts ref_counts = count_ngrams(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        r.totals[n - 1] += count;
        if (auto it = ref_counts.find(gram); it != ref_counts.end()) {
          r.matches[n - 1] += std::min(count, it->second);
        }
      }
    }
  }

  if (r.hyp_len == 0) {
    r.empty_hypothesis = true;
    r.brevity_penalty = 0.0;
    log::warn("BLEU: hypothesis corpus is empty, score is 0");
    return r;
  }

  double smooth = 1.0;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    if (r.totals[n] == 0) break;  // remaining precisions stay 0
    if (r.matches[n] == 0) {
      smooth *= 2.0;
      r.precisions[n] = 100.0 / (smooth * static_cast<double>(r.totals[n]));
    } else {
      r.precisions[n] = 100.0 * static_cast<double>(r.matches[n]) / static_cast<double>(r.totals[n]);
    }
  }

  if (r.hyp_len < r.ref_len) {
    r.brevity_penalty = std::exp(1.0 - static_cast<double>(r.ref_len) / static_cast<double>(r.hyp_len));
  }
  if (std::any_of(r.precisions.begin(), r.precisions.end(), [](double p) { return p <= 0.0; })) {
    r.score = 0.0;
    return r;
  }
  double log_sum = 0.0;
  for (double p : r.precisions) log_sum += std::log(p / 100.0);
  r.score = std::min(100.0, 100.0 * r.brevity_penalty * std::exp(log_sum / kBleuMaxOrder));
  return r;
}

std::string bleu_json(const BleuResult& r) {
  nlohmann::json j;
  j["score"] = r.score;
  j["precisions"] = r.precisions;
  j["matches"] = r.matches;
  j["totals"] = r.totals;
  j["bp"] = r.brevity_penalty;
  j["hyp_len"] = r.hyp_len;
  j["ref_len"] = r.ref_len;
  if (r.empty_hypothesis) j["warning"] = "empty hypothesis corpus";
  return j.dump();
}

}  // namespace streamsim
