// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/policy.hpp"

#include <algorithm>
#include <cctype>

#include "streamsim/error.hpp"

namespace streamsim {
namespace {

void check_committed(int committed, int hyp_len, const char* who) {
  if (committed < 0 || committed > hyp_len) {
    throw Error(ErrorCode::kContractViolation,
                std::string(who) + ": committed " + std::to_string(committed) +
                    " exceeds hypothesis length " + std::to_string(hyp_len));
  }
}

struct ParamCheck {
  void operator()(const WaitKParams& p) const {
    if (p.k <= 0) throw_invalid("wait-k: k must be positive");
  }
  void operator()(const LocalAgreementParams& p) const {
    if (p.n < 2) throw_invalid("local agreement: n must be >= 2");
  }
  void operator()(const EdAttParams& p) const {
    if (p.lambda <= 0) throw_invalid("EDAtt: lambda must be positive");
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw_invalid("EDAtt: alpha must lie in (0, 1]");
  }
  void operator()(const AlignAttParams& p) const {
    if (p.f <= 0) throw_invalid("AlignAtt: f must be positive");
  }
};

}  // namespace

PolicyConfig::PolicyConfig(Params params) : params_(std::move(params)) {
  std::visit(ParamCheck{}, params_);
}

std::string PolicyConfig::name() const { return policy_kind_name(kind()); }

const char* policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kWaitK: return "WaitK";
    case PolicyKind::kLocalAgreement: return "LocalAgreement";
    case PolicyKind::kEdAtt: return "EDAtt";
    case PolicyKind::kAlignAtt: return "AlignAtt";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
  std::string lower;
  for (char c : name) {
    if (c != '-' && c != '_') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (lower == "waitk") return PolicyKind::kWaitK;
  if (lower == "la" || lower == "localagreement") return PolicyKind::kLocalAgreement;
  if (lower == "edatt") return PolicyKind::kEdAtt;
  if (lower == "alignatt") return PolicyKind::kAlignAtt;
  throw_invalid("unknown policy '" + name + "'");
}

int waitk_decide(int chunks_read, int total_chunks, int k, const Hypothesis& hyp,
                 int committed) {
  if (k <= 0) throw_invalid("wait-k: k must be positive");
  if (chunks_read < 0 || chunks_read > total_chunks) {
    throw_invalid("wait-k: chunks_read outside [0, total_chunks]");
  }
  check_committed(committed, hyp.size(), "wait-k");
  if (chunks_read < k) return 0;
  const int allowance = chunks_read - k + 1;
  return std::max(0, std::min(hyp.size() - committed, allowance - committed));
}

int local_agreement_decide(const std::deque<Tokens>& history, int n, int committed) {
  if (history.empty()) {
    throw Error(ErrorCode::kContractViolation, "local agreement: empty history");
  }
  if (n < 2) throw_invalid("local agreement: n must be >= 2");
  check_committed(committed, static_cast<int>(history.back().size()), "local agreement");
  if (static_cast<int>(history.size()) < n) return 0;

  const auto window = history.end() - n;
  std::size_t prefix = history.back().size();
  for (auto it = window; it != history.end(); ++it) {
    const Tokens& newest = history.back();
    std::size_t i = 0;
    while (i < prefix && i < it->size() && (*it)[i] == newest[i]) ++i;
    prefix = i;
  }
  return std::max(0, static_cast<int>(prefix) - committed);
}

double edatt_tail_mass(std::span<const double> row, int lambda, bool adjust_final_frame) {
  const int frames = static_cast<int>(row.size());
  if (frames == 0) throw Error(ErrorCode::kContractViolation, "EDAtt: hypothesis has no frames");
  // A single frame is both the newest and the whole source: it is the tail.
  if (frames == 1) return row[0];

  const int window = std::clamp(lambda, 1, frames - 1);
  double tail = 0.0;
  if (adjust_final_frame) {
    double rest = 0.0;
    for (int j = 0; j < frames - 1; ++j) rest += row[j];
    if (rest <= 0.0) return 1.0;  // all mass sits on the final frame
    for (int j = frames - window; j < frames - 1; ++j) tail += row[j];
    return tail / rest;
  }
  for (int j = frames - window; j < frames; ++j) tail += row[j];
  return tail;
}

int edatt_decide(const Hypothesis& hyp, int committed, const EdAttParams& params) {
  check_committed(committed, hyp.size(), "EDAtt");
  const int scan_end = params.frontier_guard ? hyp.size() - 1 : hyp.size();
  if (scan_end <= committed) return 0;
  if (hyp.frames() < 1) throw Error(ErrorCode::kContractViolation, "EDAtt: hypothesis has no frames");
  int emitted = 0;
  for (int i = committed; i < scan_end; ++i) {
    if (edatt_tail_mass(hyp.row(i), params.lambda, params.adjust_final_frame) > params.alpha) break;
    ++emitted;
  }
  return emitted;
}

int argmax_frame(std::span<const double> row) {
  if (row.empty()) throw Error(ErrorCode::kContractViolation, "argmax of an empty row");
  return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()) + 1;
}

int alignatt_decide(const Hypothesis& hyp, int committed, const AlignAttParams& params) {
  check_committed(committed, hyp.size(), "AlignAtt");
  // Every frame counts as recent once f reaches the frame count.
  if (params.f >= hyp.frames()) return 0;
  const int boundary = hyp.frames() - params.f;
  const int scan_end = params.frontier_guard ? hyp.size() - 1 : hyp.size();
  int emitted = 0;
  for (int i = committed; i < scan_end; ++i) {
    if (argmax_frame(hyp.row(i)) > boundary) break;
    ++emitted;
  }
  return emitted;
}

}  // namespace streamsim
