// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_RUNNER_HPP_
#define STREAMSIM_RUNNER_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "streamsim/policy.hpp"
#include "streamsim/stream.hpp"

namespace streamsim {

// Monotone millisecond clock. Computation-aware delays are read from it.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_ms() = 0;
};

class SteadyClock final : public Clock {
 public:
  double now_ms() override {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
  }
};

// Only moves when told to.
class ManualClock final : public Clock {
 public:
  double now_ms() override { return now_; }
  void advance(double ms) { now_ += ms; }

 private:
  double now_ = 0.0;
};

// Wraps a model so that every generate call costs a fixed amount of
// simulated time on a ManualClock.
class FixedCostModel final : public IncrementalModel {
 public:
  FixedCostModel(IncrementalModel& inner, ManualClock& clock, double cost_ms)
      : inner_(inner), clock_(clock), cost_ms_(cost_ms) {}

  void reset(const SegmentSource& segment) override { inner_.reset(segment); }
  Hypothesis generate(std::span<const Chunk> read,
                      std::span<const std::string> forced_prefix) override {
    clock_.advance(cost_ms_);
    return inner_.generate(read, forced_prefix);
  }

 private:
  IncrementalModel& inner_;
  ManualClock& clock_;
  double cost_ms_;
};

struct EmissionRecord {
  std::string token;
  std::int64_t ideal_delay_ms = 0;  // source time consumed at commit
  double ca_delay_ms = 0.0;         // ideal delay plus elapsed computation
  int step = 0;                     // chunks read at commit

  bool operator==(const EmissionRecord&) const = default;
};

struct SegmentResult {
  std::string segment_id;
  std::string policy;
  std::string params_json;
  std::vector<EmissionRecord> emissions;
  std::string final_text;
  std::optional<std::string> reference;
  std::int64_t total_source_ms = 0;
  std::int64_t chunk_ms = 0;
  bool failed = false;
  std::string failure;

  Tokens tokens() const;
};

std::string policy_params_json(const PolicyConfig& policy);

// Runs the read/decide/commit loop over one segment. Model failures mark the
// result failed instead of throwing.
SegmentResult run_policy(IncrementalModel& model, const SegmentSource& segment,
                         const PolicyConfig& policy, Clock& clock);

// One compact JSON object, no trailing newline.
std::string emission_log_json(const SegmentResult& result);
SegmentResult parse_emission_log(std::string_view json);

}  // namespace streamsim

#endif  // STREAMSIM_RUNNER_HPP_
