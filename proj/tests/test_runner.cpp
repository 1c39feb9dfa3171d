// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "streamsim/error.hpp"
#include "streamsim/runner.hpp"
#include "streamsim/scripted_model.hpp"

using namespace streamsim;

namespace {

ScriptedModelConfig abc() {
  ScriptedModelConfig cfg;
  cfg.script_tokens = {"a", "b", "c"};
  cfg.alignment = {1, 2, 3};
  return cfg;
}

std::vector<std::int64_t> ideal_delays(const SegmentResult& r) {
  std::vector<std::int64_t> out;
  for (const auto& e : r.emissions) out.push_back(e.ideal_delay_ms);
  return out;
}

// Model that fails on a given step.
class FailingModel final : public IncrementalModel {
 public:
  explicit FailingModel(int fail_at) : fail_at_(fail_at) {}
  void reset(const SegmentSource&) override {}
  Hypothesis generate(std::span<const Chunk> read, std::span<const std::string> forced) override {
    if (static_cast<int>(read.size()) == fail_at_) throw Error(ErrorCode::kModel, "bridge went away");
    Tokens t(forced.begin(), forced.end());
    t.push_back("x" + std::to_string(read.size()));
    const int frames = static_cast<int>(read.size());
    std::vector<double> att(t.size() * frames, 1.0 / frames);
    return Hypothesis(t, frames, att);
  }

 private:
  int fail_at_;
};

// Model that ignores the forced prefix.
class RebelModel final : public IncrementalModel {
 public:
  void reset(const SegmentSource&) override {}
  Hypothesis generate(std::span<const Chunk> read, std::span<const std::string>) override {
    Tokens t{"r" + std::to_string(read.size()), "s"};
    return Hypothesis(t, 1, {1.0, 1.0});
  }
};

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("AlignAtt f=1 analytic run") {
  ScriptedModel model(abc());
  ManualClock clock;
  const auto seg = make_segment("s", 1500, 500);
  const auto r = run_policy(model, seg, PolicyConfig(AlignAttParams{1}), clock);
  REQUIRE_FALSE(r.failed);
  CHECK(ideal_delays(r) == std::vector<std::int64_t>{1000, 1500, 1500});
  CHECK(r.tokens() == Tokens{"a", "b", "c"});
  CHECK(r.final_text == "a b c");
  CHECK(r.emissions[0].step == 2);
  CHECK(r.emissions[2].step == 3);
  // The clock never moved, so computation-aware equals ideal.
  for (const auto& e : r.emissions) CHECK(e.ca_delay_ms == static_cast<double>(e.ideal_delay_ms));
}

TEST_CASE("wait-k with k = N waits for everything") {
  ScriptedModel model(abc());
  ManualClock clock;
  const auto r = run_policy(model, make_segment("s", 1500, 500), PolicyConfig(WaitKParams{3}), clock);
  CHECK(ideal_delays(r) == std::vector<std::int64_t>{1500, 1500, 1500});
  CHECK(r.tokens() == abc().script_tokens);
}

TEST_CASE("wait-k k=1 on one token per chunk emits as it reads") {
  ScriptedModel model(abc());
  ManualClock clock;
  const auto r = run_policy(model, make_segment("s", 1500, 500), PolicyConfig(WaitKParams{1}), clock);
  CHECK(ideal_delays(r) == std::vector<std::int64_t>{500, 1000, 1500});
}

TEST_CASE("local agreement confirms one chunk later") {
  ScriptedModelConfig cfg;
  cfg.script_tokens = {"a", "b", "c", "d", "e"};
  cfg.alignment = {1, 2, 3, 4, 5};
  ScriptedModel model(cfg);
  ManualClock clock;
  const auto r = run_policy(model, make_segment("s", 2500, 500), PolicyConfig(LocalAgreementParams{2}), clock);
  // Token aligned to chunk c is agreed upon at chunk c + 1; the last one at
  // finalization.
  CHECK(ideal_delays(r) == std::vector<std::int64_t>{1000, 1500, 2000, 2500, 2500});
  CHECK(r.tokens() == cfg.script_tokens);
}

TEST_CASE("local agreement ignores unstable tails") {
  ScriptedModelConfig cfg;
  cfg.script_tokens = {"a", "b", "c", "d"};
  cfg.alignment = {1, 1, 2, 3};
  cfg.instability_depth = 1;
  ScriptedModel model(cfg);
  ManualClock clock;
  const auto r = run_policy(model, make_segment("s", 2000, 500), PolicyConfig(LocalAgreementParams{2}), clock);
  CHECK(r.tokens() == cfg.script_tokens);
  for (const auto& e : r.emissions) CHECK(e.token.rfind("unk", 0) != 0);
}

TEST_CASE("fixed cost clock inflates computation-aware delays") {
  ScriptedModel inner(abc());
  ManualClock clock;
  FixedCostModel model(inner, clock, 200.0);
  const auto r = run_policy(model, make_segment("s", 1500, 500), PolicyConfig(AlignAttParams{1}), clock);
  REQUIRE(r.emissions.size() == 3);
  // Two generate calls before the first commit, three before finalization.
  CHECK(r.emissions[0].ca_delay_ms == doctest::Approx(1400));
  CHECK(r.emissions[1].ca_delay_ms == doctest::Approx(2100));
  CHECK(r.emissions[2].ca_delay_ms == doctest::Approx(2100));
}

TEST_CASE("model errors mark the segment failed") {
  FailingModel model(2);
  ManualClock clock;
  const auto r = run_policy(model, make_segment("s", 1500, 500), PolicyConfig(WaitKParams{1}), clock);
  CHECK(r.failed);
  CHECK(r.failure.find("bridge went away") != std::string::npos);
  CHECK(r.emissions.size() == 1);
}

TEST_CASE("forced prefix violations are contract errors") {
  RebelModel model;
  ManualClock clock;
  const auto r = run_policy(model, make_segment("s", 1500, 500), PolicyConfig(WaitKParams{1}), clock);
  CHECK(r.failed);
  CHECK(r.failure.find("forced prefix") != std::string::npos);
}

TEST_CASE("emitted delays are non-decreasing and bounded") {
  std::mt19937_64 rng(21);
  const PolicyConfig policies[] = {PolicyConfig(WaitKParams{2}), PolicyConfig(LocalAgreementParams{2}),
                                   PolicyConfig(EdAttParams{2, 0.2}), PolicyConfig(AlignAttParams{2})};
  for (int trial = 0; trial < 100; ++trial) {
    const int chunks = std::uniform_int_distribution<int>(1, 10)(rng);
    ScriptedModelConfig cfg;
    const int len = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int i = 0; i < len; ++i) {
      cfg.script_tokens.push_back("t" + std::to_string(i));
      cfg.alignment.push_back(std::uniform_int_distribution<int>(1, chunks)(rng));
    }
    std::sort(cfg.alignment.begin(), cfg.alignment.end());
    cfg.instability_depth = std::uniform_int_distribution<int>(0, 2)(rng);
    cfg.frames_per_chunk = std::uniform_int_distribution<int>(1, 3)(rng);
    const auto seg = make_segment("s", chunks * 500 - 100, 500);
    for (const auto& policy : policies) {
      ScriptedModel model(cfg);
      ManualClock clock;
      const auto r = run_policy(model, seg, policy, clock);
      REQUIRE_FALSE(r.failed);
      // Forced policies may lock in placeholder tokens from an unstable tail.
      if (cfg.instability_depth == 0 || policy.kind() == PolicyKind::kLocalAgreement) {
        CHECK(r.tokens() == cfg.script_tokens);
      }
      for (std::size_t i = 0; i < r.emissions.size(); ++i) {
        CHECK(r.emissions[i].ideal_delay_ms <= seg.total_duration_ms());
        if (i > 0) CHECK(r.emissions[i].ideal_delay_ms >= r.emissions[i - 1].ideal_delay_ms);
      }
    }
  }
}

TEST_CASE("emission log round trip") {
  ScriptedModel inner(abc());
  ManualClock clock;
  FixedCostModel model(inner, clock, 37.5);
  auto seg = make_segment("seg \"7\"", 1500, 500, std::string("a b c"));
  const auto r = run_policy(model, seg, PolicyConfig(EdAttParams{2, 0.1}), clock);
  const std::string line = emission_log_json(r);
  CHECK(line.find('\n') == std::string::npos);
  const auto back = parse_emission_log(line);
  CHECK(back.segment_id == r.segment_id);
  CHECK(back.policy == "EDAtt");
  CHECK(back.emissions == r.emissions);
  CHECK(back.final_text == r.final_text);
  CHECK(back.reference == r.reference);
  CHECK(back.total_source_ms == 1500);
  CHECK(back.chunk_ms == 500);
  CHECK(emission_log_json(back) == line);
  CHECK_THROWS_AS(parse_emission_log("{not json"), Error);
  CHECK_THROWS_AS(parse_emission_log("{}"), Error);
}

}  // TEST_SUITE
