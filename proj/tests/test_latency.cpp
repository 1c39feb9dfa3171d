// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "oracles.hpp"
#include "streamsim/error.hpp"
#include "streamsim/latency.hpp"
#include "streamsim/runner.hpp"
#include "streamsim/scripted_model.hpp"

using namespace streamsim;

namespace {

DelayProfile profile(std::vector<double> d, std::int64_t source, int ref_len,
                     std::int64_t chunk_ms = 500, double out_ms = 0.0) {
  DelayProfile p;
  p.delays_ms = std::move(d);
  p.source_duration_ms = source;
  p.ref_len = ref_len;
  p.chunk_ms = chunk_ms;
  p.output_token_ms = out_ms;
  return p;
}

SegmentResult analytic_log() {
  ScriptedModelConfig cfg;
  cfg.script_tokens = {"a", "b", "c"};
  cfg.alignment = {1, 2, 3};
  ScriptedModel model(cfg);
  ManualClock clock;
  return run_policy(model, make_segment("s", 1500, 500, std::string("a b c")),
                    PolicyConfig(AlignAttParams{1}), clock);
}

}  // namespace

TEST_SUITE("latency") {

TEST_CASE("average lagging") {
  CHECK(average_lagging(profile({500, 1000, 1500}, 1500, 3)) == 500.0);
  CHECK(average_lagging(profile({1000}, 1000, 1)) == 1000.0);
  CHECK(average_lagging(profile({1500, 1500, 1500}, 1500, 3)) == 1500.0);
}

TEST_CASE("length-adaptive average lagging") {
  const auto p = profile({500, 1000, 1500}, 1500, 2);
  CHECK(length_adaptive_al(p) == 500.0);
  CHECK(average_lagging(p) == 250.0);
  const auto shorter = profile({500, 1400}, 1500, 5);
  CHECK(length_adaptive_al(shorter) == average_lagging(shorter));
}

TEST_CASE("average token delay") {
  CHECK(average_token_delay(profile({1000, 1500, 1500}, 1500, 3)) == doctest::Approx(1000.0 / 3.0));
  CHECK(average_token_delay(profile({500, 1000, 1500}, 1500, 3)) == 0.0);
  CHECK(average_token_delay(profile({500}, 500, 1, 500, 100.0)) == 100.0);
}

TEST_CASE("degenerate profiles") {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kContractViolation;
  };
  CHECK(code([] { average_lagging(profile({}, 1500, 3)); }) == ErrorCode::kUndefinedMetric);
  CHECK(code([] { length_adaptive_al(profile({0}, 0, 1)); }) == ErrorCode::kUndefinedMetric);
  CHECK(code([] { average_token_delay(profile({1000, 500}, 1500, 2)); }) == ErrorCode::kInvalidArgument);
  CHECK(code([] { average_lagging(profile({500}, 1500, 0)); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("matches the brute-force oracle") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = oracle::random_profile(rng);
    CAPTURE(trial);
    CHECK(oracle::close_rel(average_lagging(p), oracle::al(p), 1e-9));
    CHECK(oracle::close_rel(length_adaptive_al(p), oracle::laal(p), 1e-9));
    CHECK(oracle::close_rel(average_token_delay(p), oracle::atd(p), 1e-9));
  }
}

TEST_CASE("LAAL dominates AL for over-generation") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = oracle::random_profile(rng);
    if (p.hyp_len() <= p.ref_len) {
      CHECK(length_adaptive_al(p) == average_lagging(p));
    } else {
      CHECK(length_adaptive_al(p) >= average_lagging(p));
    }
  }
}

TEST_CASE("reports from logs") {
  auto log = analytic_log();
  const Tokens ref{"a", "b", "c"};
  const auto ideal = compute_report(log, ref, LatencyMode::kIdeal);
  CHECK(ideal.al == 1000.0);
  CHECK_FALSE(ideal.ref_len_fallback);
  // The clock did not move: both modes agree.
  const auto ca = compute_report(log, ref, LatencyMode::kComputationAware);
  CHECK(ca.al == ideal.al);
  CHECK(ca.laal == ideal.laal);
  CHECK(ca.atd == ideal.atd);

  const auto fallback = compute_report(log, {}, LatencyMode::kIdeal);
  CHECK(fallback.ref_len_fallback);
  CHECK(fallback.al == ideal.al);

  log.failed = true;
  CHECK_THROWS_AS(compute_report(log, ref, LatencyMode::kIdeal), Error);
}

TEST_CASE("uniform computation shift") {
  // Shifting every delay by 500 ms keeps tau when the source end is already
  // reached by the first token, so every summand grows by exactly 500.
  auto log = analytic_log();
  for (auto& e : log.emissions) e.ca_delay_ms = e.ideal_delay_ms + 500.0;
  const Tokens ref{"a", "b", "c"};
  const auto ideal = compute_report(log, ref, LatencyMode::kIdeal);
  const auto ca = compute_report(log, ref, LatencyMode::kComputationAware);
  // Ideal tau is 2 (d2 = 1500); shifted delays reach 1500 at token 1.
  CHECK(ideal.al == 1000.0);
  CHECK(ca.al == 1500.0);

  const auto p = profile({500, 700, 900}, 5000, 3);
  auto q = p;
  for (auto& d : q.delays_ms) d += 500;
  CHECK(average_lagging(q) == doctest::Approx(average_lagging(p) + 500));
}

TEST_CASE("means") {
  std::vector<LatencyReport> reports(2);
  reports[0].al = 1000;
  reports[1].al = 2000;
  reports[0].atd = 10;
  const auto m = mean_report(reports);
  CHECK(m.al == 1500.0);
  CHECK(m.atd == 5.0);
  CHECK(m.segments == 2);
}

}  // TEST_SUITE
