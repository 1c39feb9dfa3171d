// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_BLEU_HPP_
#define STREAMSIM_BLEU_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "streamsim/stream.hpp"

namespace streamsim {

// Only one configuration exists: mixed case, 13a tokenisation, 4-gram,
// exponential smoothing, no effective order.
inline constexpr int kBleuMaxOrder = 4;

// mteval-v13a style tokenisation.
Tokens tokenize_13a(std::string_view text);

struct BleuResult {
  double score = 0.0;                              // [0, 100]
  std::array<double, kBleuMaxOrder> precisions{};  // percent, after smoothing
  std::array<std::int64_t, kBleuMaxOrder> matches{};
  std::array<std::int64_t, kBleuMaxOrder> totals{};
  double brevity_penalty = 1.0;
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
  bool empty_hypothesis = false;  // score forced to 0
};

BleuResult corpus_bleu(std::span<const std::string> hyps, std::span<const std::string> refs);

// {"score":..,"precisions":[..],"bp":..,"hyp_len":..,"ref_len":..}
std::string bleu_json(const BleuResult& result);

}  // namespace streamsim

#endif  // STREAMSIM_BLEU_HPP_
