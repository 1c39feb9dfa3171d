// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include "streamsim/error.hpp"
#include "streamsim/harness.hpp"
#include "test_util.hpp"

using namespace streamsim;
using nlohmann::json;

namespace {

RunConfig memory_run(int segments, std::uint64_t seed, const std::string& policy,
                     std::map<std::string, std::string> options) {
  RunConfig cfg;
  cfg.corpus_entries = synthesize_corpus(segments, seed);
  cfg.policy = policy;
  cfg.policy_options = std::move(options);
  cfg.clock = ClockSpec::parse("fixed:50");
  return cfg;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("model, clock and grid parsing") {
  CHECK(ModelSpec::parse("scripted").kind == ModelSpec::Kind::kScripted);
  CHECK(ModelSpec::parse("scripted:/tmp/d.json").path == "/tmp/d.json");
  const auto tcp = ModelSpec::parse("proto:localhost:9000");
  CHECK(tcp.kind == ModelSpec::Kind::kTcp);
  CHECK(tcp.host == "localhost");
  CHECK(tcp.port == 9000);
  const auto stdio = ModelSpec::parse("proto:stdio:python3 -m bridge --x 1");
  CHECK(stdio.kind == ModelSpec::Kind::kStdio);
  CHECK(stdio.command == "python3 -m bridge --x 1");
  CHECK_THROWS_AS(ModelSpec::parse("proto:host:99999"), Error);
  CHECK_THROWS_AS(ModelSpec::parse("onnx"), Error);

  CHECK_FALSE(ClockSpec::parse("steady").fixed_cost_ms);
  CHECK(*ClockSpec::parse("fixed:200").fixed_cost_ms == 200.0);
  CHECK_THROWS_AS(ClockSpec::parse("fixed:-1"), Error);

  const auto g = Grid::parse("f=1,2,4,8");
  CHECK(g.param == "f");
  CHECK(g.values == std::vector<std::string>{"1", "2", "4", "8"});
  CHECK_THROWS_AS(Grid::parse("f="), Error);
  CHECK_THROWS_AS(Grid::parse("=1"), Error);
}

TEST_CASE("policy options") {
  const auto p = policy_from_options("EDAtt", {{"lambda", "2"}, {"alpha", "0.1"}, {"adjust_final_frame", "false"}});
  CHECK(p.get<EdAttParams>().lambda == 2);
  CHECK(p.get<EdAttParams>().alpha == 0.1);
  CHECK_FALSE(p.get<EdAttParams>().adjust_final_frame);
  CHECK(policy_from_options("LA", {}).get<LocalAgreementParams>().n == 2);
  CHECK(code_of([] { policy_from_options("AlignAtt", {{"k", "2"}}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { policy_from_options("WaitK", {}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { policy_from_options("WaitK", {{"k", "two"}}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { policy_from_options("WaitK", {{"k", "0"}}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("corpus parsing") {
  const auto corpus = parse_corpus(
      R"({"id":"a","duration_ms":1500,"reference":"x y","script":{"script_tokens":["x","y"],"alignment":[1,3]}})"
      "\n\n"
      R"({"id":"b","duration_ms":1000})"
      "\n");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].script->alignment == std::vector<int>{1, 3});
  CHECK(*corpus[0].reference == "x y");
  CHECK_FALSE(corpus[1].script);

  CHECK(code_of([] { parse_corpus("{\"id\":\"a\",\"duration_ms\":1}\n{\"id\":\"a\",\"duration_ms\":1}"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { parse_corpus("{\"id\":\"a\"}"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { parse_corpus("not json"); }) == ErrorCode::kParse);
  CHECK(code_of([] { load_corpus("/nonexistent/corpus.jsonl"); }) == ErrorCode::kIo);
}

TEST_CASE("synthetic corpora are seed-determined") {
  const auto a = corpus_jsonl(synthesize_corpus(30, 42));
  CHECK(a == corpus_jsonl(synthesize_corpus(30, 42)));
  CHECK(a != corpus_jsonl(synthesize_corpus(30, 43)));
  CHECK(corpus_jsonl(parse_corpus(a)) == a);
  for (const auto& e : synthesize_corpus(50, 1)) {
    const auto src = make_source(e, 500);
    CHECK(src.chunk_count() >= 3);
    CHECK(src.chunk_count() <= 12);
    REQUIRE(e.script);
    CHECK_NOTHROW(e.script->validate(src.chunk_count()));
    CHECK(e.reference);
  }
}

TEST_CASE("feature files become chunk payloads") {
  test_util::TempDir dir;
  test_util::write_text(dir / "f.json", R"({"frame_ms":250,"frames":[[1],[2],[3],[4],[5]]})");
  const auto corpus = parse_corpus(R"({"id":"a","audio_features":"f.json"})", dir.path());
  const auto src = make_source(corpus.at(0), 500);
  CHECK(src.total_duration_ms() == 1250);
  REQUIRE(src.chunk_count() == 3);
  CHECK(src.chunks[0].payload == std::vector<float>{1, 2});
  CHECK(src.chunks[2].payload == std::vector<float>{5});
}

TEST_CASE("run_eval report and artifacts") {
  test_util::TempDir dir;
  auto cfg = memory_run(8, 3, "AlignAtt", {{"f", "2"}});
  cfg.out = dir / "run";
  const auto report = run_eval(cfg);
  CHECK_FALSE(report.partial_failure());
  CHECK(report.bleu);
  CHECK(report.ideal.size() == 8);
  CHECK(report.computation_aware.size() == 8);
  for (std::size_t i = 0; i < report.ideal.size(); ++i) {
    CHECK(report.computation_aware[i].al >= report.ideal[i].al);
  }

  const auto j = json::parse(run_report_json(report));
  CHECK(j["policy"] == "AlignAtt");
  CHECK(j["params"]["f"] == 2);
  CHECK(j["latency"]["ideal"]["AL"].is_number());
  CHECK(j["latency"]["computation_aware"]["AL"].is_number());

  for (const char* f : {"manifest.json", "report.json", "emissions.jsonl", "logs/seg000.json"}) {
    CHECK(std::filesystem::exists(cfg.out / f));
  }
  const auto manifest = json::parse(test_util::read_text(cfg.out / "manifest.json"));
  CHECK(manifest["segments"] == 8);
  CHECK(manifest["clock"].get<std::string>().find("fixed") == 0);
  const auto logs = test_util::read_text(cfg.out / "emissions.jsonl");
  CHECK(std::count(logs.begin(), logs.end(), '\n') == 8);
}

TEST_CASE("parallel runs match sequential runs") {
  auto cfg = memory_run(16, 9, "LA", {});
  const auto seq = run_eval(cfg);
  cfg.jobs = 4;
  const auto par = run_eval(cfg);
  REQUIRE(seq.results.size() == par.results.size());
  for (std::size_t i = 0; i < seq.results.size(); ++i) {
    CHECK(emission_log_json(seq.results[i]) == emission_log_json(par.results[i]));
  }
}

TEST_CASE("segments without scripts fail without stopping the run") {
  RunConfig cfg;
  cfg.corpus_entries = synthesize_corpus(3, 1);
  cfg.corpus_entries[1].script.reset();
  cfg.policy = "WaitK";
  cfg.policy_options = {{"k", "1"}};
  const auto report = run_eval(cfg);
  CHECK(report.partial_failure());
  CHECK(report.failed == std::vector<std::string>{"seg001"});
  CHECK(report.ideal.size() == 2);
  // BLEU covers the surviving segments.
  CHECK(report.bleu);
}

TEST_CASE("missing references drop BLEU") {
  auto cfg = memory_run(3, 2, "WaitK", {{"k", "2"}});
  cfg.corpus_entries[0].reference.reset();
  const auto report = run_eval(cfg);
  CHECK_FALSE(report.bleu);
  CHECK(json::parse(run_report_json(report))["bleu"].is_null());
}

TEST_CASE("sweep writes the curve") {
  test_util::TempDir dir;
  auto cfg = memory_run(10, 4, "AlignAtt", {});
  cfg.grid = Grid::parse("f=1,2,4");
  cfg.out = dir / "sweep";
  cfg.svg = true;
  cfg.al_threshold_s = 2.0;
  const auto result = sweep(cfg);
  REQUIRE(result.rows.size() == 3);
  for (std::size_t i = 1; i < result.rows.size(); ++i) CHECK(result.rows[i].al >= result.rows[i - 1].al);

  const auto csv = test_util::read_text(cfg.out / "curve.csv");
  CHECK(csv.substr(0, csv.find('\n')) == kCurveHeader);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv == curve_csv(result.rows));
  CHECK(test_util::read_text(cfg.out / "curve.svg").find("<svg") != std::string::npos);
  const auto manifest = json::parse(test_util::read_text(cfg.out / "manifest.json"));
  CHECK(manifest["points"].size() == 3);
  CHECK(manifest["points"][0].contains("within_al_threshold"));
  CHECK(std::filesystem::exists(cfg.out / "f=1" / "report.json"));
}

TEST_CASE("single-point grid equals the run aggregate") {
  auto cfg = memory_run(10, 12, "AlignAtt", {{"f", "1"}});
  const auto report = run_eval(cfg);
  cfg.grid = Grid::parse("f=1");
  const auto result = sweep(cfg);
  REQUIRE(result.rows.size() == 1);
  const auto direct = curve_row(report, "1");
  CHECK(curve_csv(result.rows) == curve_csv({direct}));
}

TEST_CASE("EDAtt alpha ordering on a small grid") {
  auto cfg = memory_run(40, 13, "EDAtt", {{"lambda", "2"}});
  cfg.grid = Grid::parse("alpha=0.4,0.1");
  std::map<std::string, double> al;
  for (const auto& r : sweep(cfg).rows) al[r.param] = r.al;
  CHECK(al.at("0.1") >= al.at("0.4"));
}

TEST_CASE("ideal-only sweeps mark computation-aware columns absent") {
  auto cfg = memory_run(4, 4, "WaitK", {});
  cfg.grid = Grid::parse("k=1,3");
  cfg.computation_aware = false;
  const auto csv = curve_csv(sweep(cfg).rows);
  CHECK(csv.find(",NA,NA,NA\n") != std::string::npos);
}

TEST_CASE("config validation") {
  auto cfg = memory_run(2, 1, "WaitK", {{"k", "1"}});
  cfg.chunk_ms = 0;
  CHECK_THROWS_AS(run_eval(cfg), Error);
  cfg = memory_run(2, 1, "WaitK", {{"k", "1"}});
  cfg.corpus_entries.clear();
  CHECK_THROWS_AS(run_eval(cfg), Error);
  cfg = memory_run(2, 1, "WaitK", {{"k", "1"}});
  CHECK_THROWS_AS(sweep(cfg), Error);
}

}  // TEST_SUITE
