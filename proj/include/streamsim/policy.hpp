// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_POLICY_HPP_
#define STREAMSIM_POLICY_HPP_

#include <deque>
#include <string>
#include <variant>

#include "streamsim/stream.hpp"

namespace streamsim {

struct WaitKParams {
  int k = 1;  // chunks to wait before the first emission
};

struct LocalAgreementParams {
  int n = 2;  // number of consecutive hypotheses that must agree
};

struct EdAttParams {
  int lambda = 1;       // trailing frames whose attention mass is summed
  double alpha = 0.5;   // hold the token when that mass exceeds alpha
  bool adjust_final_frame = true;
  bool frontier_guard = true;
};

struct AlignAttParams {
  int f = 1;  // hold tokens aligned to one of the last f frames
  bool frontier_guard = true;
};

enum class PolicyKind { kWaitK, kLocalAgreement, kEdAtt, kAlignAtt };

class PolicyConfig {
 public:
  using Params = std::variant<WaitKParams, LocalAgreementParams, EdAttParams, AlignAttParams>;

  PolicyConfig(Params params);  // NOLINT: implicit from any parameter set

  PolicyKind kind() const { return static_cast<PolicyKind>(params_.index()); }
  const Params& params() const { return params_; }
  template <class T> const T& get() const { return std::get<T>(params_); }

  // "WaitK", "LocalAgreement", "EDAtt" or "AlignAtt".
  std::string name() const;

 private:
  Params params_;
};

// Accepts the canonical names case-insensitively plus "la" and "waitk".
PolicyKind parse_policy_kind(const std::string& name);
const char* policy_kind_name(PolicyKind kind);

// Each *_decide returns how many tokens past `committed` may be committed.

int waitk_decide(int chunks_read, int total_chunks, int k, const Hypothesis& hyp,
                 int committed);

// `history` is ordered oldest to newest and holds the most recent
// hypotheses' tokens; only the last n are consulted.
int local_agreement_decide(const std::deque<Tokens>& history, int n, int committed);

int edatt_decide(const Hypothesis& hyp, int committed, const EdAttParams& params);

// Attention mass over the last `lambda` frames of one row after the optional
// final-frame adjustment. Exposed for tests.
double edatt_tail_mass(std::span<const double> row, int lambda, bool adjust_final_frame);

int alignatt_decide(const Hypothesis& hyp, int committed, const AlignAttParams& params);

// 1-based frame holding the row's maximum; ties resolve to the lowest frame.
int argmax_frame(std::span<const double> row);

}  // namespace streamsim

#endif  // STREAMSIM_POLICY_HPP_
