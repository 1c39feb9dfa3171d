// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/runner.hpp"

#include <algorithm>
#include <deque>

#include <json.hpp>

#include "log.hpp"
#include "streamsim/error.hpp"

namespace streamsim {

using nlohmann::json;

namespace {

json params_object(const PolicyConfig& policy) {
  json j = json::object();
  switch (policy.kind()) {
    case PolicyKind::kWaitK:
      j["k"] = policy.get<WaitKParams>().k;
      break;
    case PolicyKind::kLocalAgreement:
      j["n"] = policy.get<LocalAgreementParams>().n;
      break;
    case PolicyKind::kEdAtt: {
      const auto& p = policy.get<EdAttParams>();
      j["lambda"] = p.lambda;
      j["alpha"] = p.alpha;
      j["adjust_final_frame"] = p.adjust_final_frame;
      j["frontier_guard"] = p.frontier_guard;
      break;
    }
    case PolicyKind::kAlignAtt: {
      const auto& p = policy.get<AlignAttParams>();
      j["f"] = p.f;
      j["frontier_guard"] = p.frontier_guard;
      break;
    }
  }
  return j;
}

bool starts_with(const Tokens& tokens, std::span<const std::string> prefix) {
  return tokens.size() >= prefix.size() &&
         std::equal(prefix.begin(), prefix.end(), tokens.begin());
}

}  // namespace

Tokens SegmentResult::tokens() const {
  Tokens out;
  out.reserve(emissions.size());
  for (const auto& e : emissions) out.push_back(e.token);
  return out;
}

std::string policy_params_json(const PolicyConfig& policy) {
  return params_object(policy).dump();
}

SegmentResult run_policy(IncrementalModel& model, const SegmentSource& segment,
                         const PolicyConfig& policy, Clock& clock) {
  SegmentResult result;
  result.segment_id = segment.id;
  result.policy = policy.name();
  result.params_json = policy_params_json(policy);
  result.reference = segment.reference;
  result.total_source_ms = segment.total_duration_ms();
  result.chunk_ms = segment.chunks.empty() ? 0 : segment.chunks.front().duration_ms;

  const int total_chunks = segment.chunk_count();
  if (total_chunks == 0) throw_invalid("segment '" + segment.id + "' has no chunks");

  const bool forced = policy.kind() != PolicyKind::kLocalAgreement;
  Tokens committed;
  std::deque<Tokens> history;
  double last_ca = 0.0;

  try {
    model.reset(segment);
    const double start = clock.now_ms();
    for (int step = 1; step <= total_chunks; ++step) {
      const std::span<const Chunk> read(segment.chunks.data(), step);
      std::span<const std::string> prefix;
      if (forced) prefix = committed;
      Hypothesis hyp = model.generate(read, prefix);
      hyp.validate();
      if (!starts_with(hyp.tokens(), prefix)) {
        throw Error(ErrorCode::kContractViolation,
                    "model output does not begin with the forced prefix at chunk " +
                        std::to_string(step));
      }

      const bool source_done = step == total_chunks;
      int take = 0;
      if (source_done) {
        take = std::max(0, hyp.size() - static_cast<int>(committed.size()));
      } else {
        const int done = static_cast<int>(committed.size());
        switch (policy.kind()) {
          case PolicyKind::kWaitK:
            take = waitk_decide(step, total_chunks, policy.get<WaitKParams>().k, hyp, done);
            break;
          case PolicyKind::kLocalAgreement: {
            const int n = policy.get<LocalAgreementParams>().n;
            history.push_back(hyp.tokens());
            if (static_cast<int>(history.size()) > n) history.pop_front();
            // An unforced regeneration may be shorter than what is committed.
            take = static_cast<int>(committed.size()) <= hyp.size()
                       ? local_agreement_decide(history, n, done)
                       : 0;
            break;
          }
          case PolicyKind::kEdAtt:
            take = edatt_decide(hyp, done, policy.get<EdAttParams>());
            break;
          case PolicyKind::kAlignAtt:
            take = alignatt_decide(hyp, done, policy.get<AlignAttParams>());
            break;
        }
      }
      if (take == 0) continue;

      const std::int64_t ideal = elapsed_source_ms(segment, step);
      const double ca = std::max(last_ca, static_cast<double>(ideal) + (clock.now_ms() - start));
      last_ca = ca;
      for (int i = 0; i < take; ++i) {
        const std::string& token = hyp.tokens()[committed.size()];
        result.emissions.push_back(EmissionRecord{token, ideal, ca, step});
        committed.push_back(token);
      }
    }
  } catch (const Error& e) {
    result.failed = true;
    result.failure = std::string(to_string(e.code())) + ": " + e.what();
    log::warn("segment '" + segment.id + "' failed: " + result.failure);
  }
  result.final_text = join_tokens(committed);
  return result;
}

std::string emission_log_json(const SegmentResult& r) {
  json j;
  j["segment_id"] = r.segment_id;
  j["policy"] = r.policy;
  j["params"] = r.params_json.empty() ? json::object() : json::parse(r.params_json);
  j["status"] = r.failed ? "failed" : "ok";
  if (r.failed) j["error"] = r.failure;
  j["source_duration_ms"] = r.total_source_ms;
  j["chunk_ms"] = r.chunk_ms;
  json emissions = json::array();
  for (const auto& e : r.emissions) {
    emissions.push_back({{"token", e.token},
                         {"ideal_delay_ms", e.ideal_delay_ms},
                         {"ca_delay_ms", e.ca_delay_ms},
                         {"step", e.step}});
  }
  j["emissions"] = std::move(emissions);
  j["final_text"] = r.final_text;
  if (r.reference) j["reference"] = *r.reference;
  return j.dump();
}

SegmentResult parse_emission_log(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("emission log: ") + e.what());
  }
  try {
    SegmentResult r;
    r.segment_id = j.at("segment_id").get<std::string>();
    r.policy = j.value("policy", "");
    r.params_json = j.contains("params") ? j["params"].dump() : "{}";
    r.failed = j.value("status", "ok") == "failed";
    r.failure = j.value("error", "");
    r.total_source_ms = j.at("source_duration_ms").get<std::int64_t>();
    r.chunk_ms = j.value("chunk_ms", std::int64_t{0});
    for (const auto& e : j.at("emissions")) {
      r.emissions.push_back(EmissionRecord{e.at("token").get<std::string>(),
                                           e.at("ideal_delay_ms").get<std::int64_t>(),
                                           e.at("ca_delay_ms").get<double>(),
                                           e.value("step", 0)});
    }
    r.final_text = j.value("final_text", join_tokens(r.tokens()));
    if (j.contains("reference") && j["reference"].is_string()) {
      r.reference = j["reference"].get<std::string>();
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("emission log: ") + e.what());
  }
}

}  // namespace streamsim
