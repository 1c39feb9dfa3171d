// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "log.hpp"
#include "streamsim/error.hpp"
#include "streamsim/protocol.hpp"

namespace streamsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw_invalid("option " + key + ": '" + text + "' is not a valid number");
  }
  return value;
}

// std::from_chars for double is missing from older libstdc++.
template <>
double parse_number<double>(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw_invalid("option " + key + ": '" + text + "' is not a valid number");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "on") return true;
  if (text == "0" || text == "false" || text == "off") return false;
  throw_invalid("option " + key + ": expected true/false, got '" + text + "'");
}

ScriptedModelConfig parse_script(const json& j, const ScriptDefaults& defaults) {
  ScriptedModelConfig cfg;
  cfg.script_tokens = j.at("script_tokens").get<Tokens>();
  cfg.alignment = j.at("alignment").get<std::vector<int>>();
  cfg.instability_depth = j.contains("instability_depth")
                              ? j["instability_depth"].get<int>()
                              : defaults.instability_depth.value_or(0);
  cfg.attention_temperature = j.contains("attention_temperature")
                                  ? j["attention_temperature"].get<double>()
                                  : defaults.attention_temperature.value_or(1.0);
  cfg.frames_per_chunk = j.contains("frames_per_chunk")
                             ? j["frames_per_chunk"].get<int>()
                             : defaults.frames_per_chunk.value_or(1);
  cfg.validate();
  return cfg;
}

json script_json(const ScriptedModelConfig& cfg) {
  return json{{"script_tokens", cfg.script_tokens},
              {"alignment", cfg.alignment},
              {"instability_depth", cfg.instability_depth},
              {"attention_temperature", cfg.attention_temperature},
              {"frames_per_chunk", cfg.frames_per_chunk}};
}

ScriptDefaults load_script_defaults(const std::string& path) {
  ScriptDefaults d;
  if (path.empty()) return d;
  try {
    const json j = json::parse(read_file(path));
    if (j.contains("instability_depth")) d.instability_depth = j["instability_depth"].get<int>();
    if (j.contains("attention_temperature")) {
      d.attention_temperature = j["attention_temperature"].get<double>();
    }
    if (j.contains("frames_per_chunk")) d.frames_per_chunk = j["frames_per_chunk"].get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "scripted model defaults " + path + ": " + e.what());
  }
  return d;
}

std::vector<CorpusEntry> parse_corpus_impl(const std::string& jsonl, const fs::path& base_dir,
                                           const ScriptDefaults& defaults) {
  std::vector<CorpusEntry> corpus;
  std::set<std::string> seen;
  std::istringstream in(jsonl);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      CorpusEntry e;
      e.id = j.at("id").get<std::string>();
      e.duration_ms = j.value("duration_ms", std::int64_t{0});
      if (j.contains("reference") && j["reference"].is_string()) {
        e.reference = j["reference"].get<std::string>();
      }
      if (j.contains("script")) e.script = parse_script(j["script"], defaults);
      if (j.contains("audio_features")) {
        fs::path p = j["audio_features"].get<std::string>();
        e.audio_features = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      }
      if (e.duration_ms <= 0 && !e.audio_features) {
        throw_invalid("segment '" + e.id + "' needs a positive duration_ms");
      }
      if (!seen.insert(e.id).second) throw_invalid("duplicate segment id '" + e.id + "'");
      corpus.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kParse, "corpus line " + std::to_string(line_no) + ": " + ex.what());
    } catch (const Error& ex) {
      throw Error(ex.code(), "corpus line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return corpus;
}

std::string safe_name(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '=';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

std::string fixed(double v, int decimals) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

json latency_json(const LatencyReport& r) {
  return json{{"segment_id", r.segment_id},
              {"mode", latency_mode_name(r.mode)},
              {"AL", r.al},
              {"LAAL", r.laal},
              {"ATD", r.atd}};
}

json means_json(const std::optional<LatencyMeans>& m) {
  if (!m) return nullptr;
  return json{{"AL", m->al}, {"LAAL", m->laal}, {"ATD", m->atd}, {"segments", m->segments}};
}

// Simple deterministic word list for synthetic corpora.
std::vector<std::string> synthetic_vocabulary() {
  static const char* const kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"};
  static const char* const kNuclei[] = {"a", "e", "i", "o", "u"};
  std::vector<std::string> words;
  for (const char* o : kOnsets) {
    for (const char* n : kNuclei) words.push_back(std::string(o) + n + (words.size() % 3 == 0 ? "n" : ""));
  }
  return words;
}

}  // namespace

std::vector<CorpusEntry> parse_corpus(const std::string& jsonl, const fs::path& base_dir) {
  return parse_corpus_impl(jsonl, base_dir, {});
}

std::vector<CorpusEntry> load_corpus(const fs::path& path) {
  return parse_corpus_impl(read_file(path), path.parent_path(), {});
}

std::string corpus_jsonl(const std::vector<CorpusEntry>& corpus) {
  std::string out;
  for (const auto& e : corpus) {
    json j;
    j["id"] = e.id;
    j["duration_ms"] = e.duration_ms;
    if (e.reference) j["reference"] = *e.reference;
    if (e.script) j["script"] = script_json(*e.script);
    if (e.audio_features) j["audio_features"] = e.audio_features->string();
    out += j.dump() + "\n";
  }
  return out;
}

SegmentSource make_source(const CorpusEntry& entry, std::int64_t chunk_ms) {
  if (!entry.audio_features) {
    return make_segment(entry.id, entry.duration_ms, chunk_ms, entry.reference);
  }
  std::int64_t frame_ms = 0;
  std::vector<std::vector<float>> frames;
  try {
    const json j = json::parse(read_file(*entry.audio_features));
    frame_ms = j.at("frame_ms").get<std::int64_t>();
    frames = j.at("frames").get<std::vector<std::vector<float>>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, entry.audio_features->string() + ": " + e.what());
  }
  if (frame_ms <= 0) throw_invalid(entry.audio_features->string() + ": frame_ms must be positive");
  const std::int64_t duration =
      entry.duration_ms > 0 ? entry.duration_ms : frame_ms * static_cast<std::int64_t>(frames.size());
  SegmentSource source = make_segment(entry.id, duration, chunk_ms, entry.reference);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto chunk = static_cast<std::size_t>(static_cast<std::int64_t>(k) * frame_ms / chunk_ms);
    if (chunk >= source.chunks.size()) break;
    auto& payload = source.chunks[chunk].payload;
    payload.insert(payload.end(), frames[k].begin(), frames[k].end());
  }
  return source;
}

std::vector<CorpusEntry> synthesize_corpus(int segments, std::uint64_t seed, std::int64_t chunk_ms) {
  if (segments < 0) throw_invalid("synthesize_corpus: negative segment count");
  if (chunk_ms <= 1) throw_invalid("synthesize_corpus: chunk_ms must exceed 1");
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t n) { return static_cast<int>(rng() % n); };
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const auto vocab = synthetic_vocabulary();

  std::vector<CorpusEntry> corpus;
  for (int s = 0; s < segments; ++s) {
    const int chunks = 3 + pick(10);
    const std::int64_t last = chunk_ms - pick(static_cast<std::uint64_t>(chunk_ms / 2));
    const int tokens = std::max(1, chunks / 2 + pick(static_cast<std::uint64_t>(chunks * 3 / 2 + 1)));

    ScriptedModelConfig script;
    for (int t = 0; t < tokens; ++t) {
      script.script_tokens.push_back(vocab[pick(vocab.size())]);
      script.alignment.push_back(1 + pick(static_cast<std::uint64_t>(chunks)));
    }
    std::sort(script.alignment.begin(), script.alignment.end());
    script.instability_depth = pick(3);
    script.attention_temperature = 0.5 + 1.5 * unit();
    script.frames_per_chunk = 1 + pick(4);

    Tokens reference = script.script_tokens;
    for (auto& word : reference) {
      if (unit() < 0.1) word = vocab[pick(vocab.size())];
    }

    char id[32];
    std::snprintf(id, sizeof id, "seg%03d", s);
    corpus.push_back(CorpusEntry{id, (chunks - 1) * chunk_ms + last, join_tokens(reference),
                                 std::move(script), std::nullopt});
  }
  return corpus;
}

ModelSpec ModelSpec::parse(const std::string& text) {
  ModelSpec spec;
  if (text == "scripted") return spec;
  if (text.rfind("scripted:", 0) == 0) {
    spec.path = text.substr(9);
    return spec;
  }
  if (text.rfind("proto:stdio:", 0) == 0) {
    spec.kind = Kind::kStdio;
    spec.command = text.substr(12);
    if (spec.command.empty()) throw_invalid("model spec '" + text + "': empty command");
    return spec;
  }
  if (text.rfind("proto:", 0) == 0) {
    const std::string rest = text.substr(6);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw_invalid("model spec '" + text + "': expected proto:HOST:PORT");
    }
    spec.kind = Kind::kTcp;
    spec.host = rest.substr(0, colon);
    spec.port = parse_number<int>("--model port", rest.substr(colon + 1));
    if (spec.port <= 0 || spec.port > 65535) throw_invalid("model spec '" + text + "': bad port");
    return spec;
  }
  throw_invalid("model spec '" + text + "': expected scripted[:PATH] or proto:...");
}

std::string ModelSpec::describe() const {
  switch (kind) {
    case Kind::kScripted: return path.empty() ? "scripted" : "scripted:" + path;
    case Kind::kTcp: return "proto:" + host + ":" + std::to_string(port);
    case Kind::kStdio: return "proto:stdio:" + command;
  }
  return "?";
}

ClockSpec ClockSpec::parse(const std::string& text) {
  ClockSpec spec;
  if (text == "steady" || text.empty()) return spec;
  if (text.rfind("fixed:", 0) == 0) {
    spec.fixed_cost_ms = parse_number<double>("--clock", text.substr(6));
    if (*spec.fixed_cost_ms < 0) throw_invalid("--clock: cost must be >= 0");
    return spec;
  }
  throw_invalid("clock '" + text + "': expected steady or fixed:MS");
}

std::string ClockSpec::describe() const {
  return fixed_cost_ms ? "fixed:" + fixed(*fixed_cost_ms, 3) : "steady";
}

Grid Grid::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw_invalid("grid '" + text + "': expected PARAM=V1,V2,...");
  Grid g;
  g.param = text.substr(0, eq);
  std::istringstream values(text.substr(eq + 1));
  std::string v;
  while (std::getline(values, v, ',')) {
    if (!v.empty()) g.values.push_back(v);
  }
  if (g.values.empty()) throw_invalid("grid '" + text + "' has no values");
  return g;
}

PolicyConfig policy_from_options(const std::string& name,
                                 const std::map<std::string, std::string>& options) {
  const PolicyKind kind = parse_policy_kind(name);
  std::set<std::string> allowed;
  switch (kind) {
    case PolicyKind::kWaitK: allowed = {"k"}; break;
    case PolicyKind::kLocalAgreement: allowed = {"n"}; break;
    case PolicyKind::kEdAtt: allowed = {"lambda", "alpha", "adjust_final_frame", "frontier_guard"}; break;
    case PolicyKind::kAlignAtt: allowed = {"f", "frontier_guard"}; break;
  }
  for (const auto& [key, value] : options) {
    if (!allowed.count(key)) {
      throw_invalid("option '" + key + "' does not apply to policy " + policy_kind_name(kind));
    }
  }
  auto required = [&](const std::string& key) -> const std::string& {
    auto it = options.find(key);
    if (it == options.end()) {
      throw_invalid(std::string("policy ") + policy_kind_name(kind) + " requires --" + key);
    }
    return it->second;
  };
  auto flag = [&](const std::string& key, bool fallback) {
    auto it = options.find(key);
    return it == options.end() ? fallback : parse_bool(key, it->second);
  };

  switch (kind) {
    case PolicyKind::kWaitK:
      return PolicyConfig(WaitKParams{parse_number<int>("k", required("k"))});
    case PolicyKind::kLocalAgreement: {
      auto it = options.find("n");
      return PolicyConfig(LocalAgreementParams{it == options.end() ? 2 : parse_number<int>("n", it->second)});
    }
    case PolicyKind::kEdAtt: {
      EdAttParams p;
      p.lambda = parse_number<int>("lambda", required("lambda"));
      p.alpha = parse_number<double>("alpha", required("alpha"));
      p.adjust_final_frame = flag("adjust_final_frame", true);
      p.frontier_guard = flag("frontier_guard", true);
      return PolicyConfig(p);
    }
    case PolicyKind::kAlignAtt: {
      AlignAttParams p;
      p.f = parse_number<int>("f", required("f"));
      p.frontier_guard = flag("frontier_guard", true);
      return PolicyConfig(p);
    }
  }
  throw_invalid("unreachable policy kind");
}

PolicyConfig RunConfig::make_policy() const { return policy_from_options(policy, policy_options); }

void RunConfig::validate() const {
  if (chunk_ms <= 0) throw_invalid("chunk_ms must be positive");
  if (jobs < 1) throw_invalid("jobs must be >= 1");
  if (grid && grid->values.empty()) throw_invalid("grid must not be empty");
}

RunReport run_eval(const RunConfig& cfg) {
  cfg.validate();
  const PolicyConfig policy = cfg.make_policy();
  const ScriptDefaults defaults = load_script_defaults(cfg.model.path);
  std::vector<CorpusEntry> corpus =
      cfg.corpus.empty() ? cfg.corpus_entries
                         : parse_corpus_impl(read_file(cfg.corpus), cfg.corpus.parent_path(), defaults);
  if (corpus.empty()) throw_invalid("corpus is empty");

  std::vector<SegmentSource> sources;
  sources.reserve(corpus.size());
  for (const auto& e : corpus) sources.push_back(make_source(e, cfg.chunk_ms));

  const int workers = std::min<int>(cfg.jobs, static_cast<int>(corpus.size()));
  // External models are connected up front so that an unreachable endpoint
  // fails the run before any segment is processed.
  std::vector<std::unique_ptr<IncrementalModel>> remote(workers);
  if (cfg.model.kind != ModelSpec::Kind::kScripted) {
    for (auto& m : remote) {
      try {
        m = std::make_unique<ProtocolModel>(cfg.model.kind == ModelSpec::Kind::kTcp
                                                ? connect_tcp(cfg.model.host, cfg.model.port)
                                                : spawn_stdio(cfg.model.command));
      } catch (const Error& e) {
        throw Error(ErrorCode::kModel, "model " + cfg.model.describe() + " unreachable: " + e.what());
      }
    }
  }

  RunReport report;
  report.policy = policy.name();
  report.params_json = policy_params_json(policy);
  report.results.resize(corpus.size());
  log::info("running " + report.policy + " " + report.params_json + " on " +
            std::to_string(corpus.size()) + " segments with " + std::to_string(workers) + " worker(s)");

  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto work = [&](int w) {
    try {
      for (std::size_t i = next++; i < corpus.size(); i = next++) {
        std::unique_ptr<IncrementalModel> local;
        IncrementalModel* model = remote[w].get();
        if (model == nullptr) {
          if (!corpus[i].script) {
            SegmentResult failed;
            failed.segment_id = corpus[i].id;
            failed.policy = report.policy;
            failed.params_json = report.params_json;
            failed.reference = corpus[i].reference;
            failed.total_source_ms = sources[i].total_duration_ms();
            failed.chunk_ms = cfg.chunk_ms;
            failed.failed = true;
            failed.failure = "invalid_argument: segment has no script for the scripted model";
            report.results[i] = std::move(failed);
            continue;
          }
          local = std::make_unique<ScriptedModel>(*corpus[i].script);
          model = local.get();
        }
        if (cfg.clock.fixed_cost_ms) {
          ManualClock clock;
          FixedCostModel costed(*model, clock, *cfg.clock.fixed_cost_ms);
          report.results[i] = run_policy(costed, sources[i], policy, clock);
        } else {
          SteadyClock clock;
          report.results[i] = run_policy(*model, sources[i], policy, clock);
        }
        log::debug("segment '" + corpus[i].id + "': " +
                   std::to_string(report.results[i].emissions.size()) + " tokens" +
                   (report.results[i].failed ? " (failed)" : ""));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(fatal_mu);
      if (!fatal) fatal = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (fatal) std::rethrow_exception(fatal);

  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  bool all_refs = true;
  for (auto& r : report.results) {
    if (r.chunk_ms == 0) r.chunk_ms = cfg.chunk_ms;
    if (r.failed) {
      report.failed.push_back(r.segment_id);
      continue;
    }
    if (r.reference) {
      hyps.push_back(r.final_text);
      refs.push_back(*r.reference);
    } else {
      all_refs = false;
    }
    if (r.emissions.empty()) {
      log::warn("segment '" + r.segment_id + "' emitted nothing; excluded from latency");
      continue;
    }
    const Tokens ref = r.reference ? split_whitespace(*r.reference) : Tokens{};
    if (cfg.ideal) report.ideal.push_back(compute_report(r, ref, LatencyMode::kIdeal));
    if (cfg.computation_aware) {
      report.computation_aware.push_back(compute_report(r, ref, LatencyMode::kComputationAware));
    }
  }
  if (cfg.ideal) report.ideal_means = mean_report(report.ideal);
  if (cfg.computation_aware) report.ca_means = mean_report(report.computation_aware);
  if (all_refs && !hyps.empty()) {
    report.bleu = corpus_bleu(hyps, refs);
  } else if (!all_refs) {
    log::info("corpus lacks references; BLEU not computed");
  }

  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out / "logs");
    std::string all_logs;
    json files = json::array();
    for (const auto& r : report.results) {
      const std::string line = emission_log_json(r);
      all_logs += line + "\n";
      const std::string rel = "logs/" + safe_name(r.segment_id) + ".json";
      write_file(cfg.out / rel, line + "\n");
      files.push_back(rel);
    }
    write_file(cfg.out / "emissions.jsonl", all_logs);
    write_file(cfg.out / "report.json", run_report_json(report) + "\n");
    json manifest;
    manifest["tool"] = "streamsim";
    manifest["corpus"] = cfg.corpus.empty() ? "<in-memory>" : cfg.corpus.string();
    manifest["model"] = cfg.model.describe();
    manifest["policy"] = report.policy;
    manifest["params"] = json::parse(report.params_json);
    manifest["chunk_ms"] = cfg.chunk_ms;
    manifest["clock"] = cfg.clock.describe();
    manifest["seed"] = cfg.seed;
    manifest["segments"] = report.results.size();
    manifest["failed"] = report.failed;
    manifest["logs"] = std::move(files);
    manifest["emissions"] = "emissions.jsonl";
    manifest["report"] = "report.json";
    write_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");
  }
  return report;
}

std::string run_report_json(const RunReport& report) {
  json j;
  j["policy"] = report.policy;
  j["params"] = json::parse(report.params_json.empty() ? "{}" : report.params_json);
  j["segments"] = report.results.size();
  j["failed"] = report.failed;
  if (report.bleu) {
    j["bleu"] = json::parse(bleu_json(*report.bleu));
  } else {
    j["bleu"] = nullptr;
  }
  j["latency"] = {{"ideal", means_json(report.ideal_means)},
                  {"computation_aware", means_json(report.ca_means)}};
  json per = json::array();
  for (const auto& r : report.ideal) per.push_back(latency_json(r));
  for (const auto& r : report.computation_aware) per.push_back(latency_json(r));
  j["per_segment"] = std::move(per);
  return j.dump();
}

CurveRow curve_row(const RunReport& report, const std::string& param_value) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  CurveRow row;
  row.policy = report.policy;
  row.param = param_value;
  if (report.bleu) row.bleu = report.bleu->score;
  const auto& i = report.ideal_means;
  const auto& c = report.ca_means;
  row.al = i ? i->al / 1000.0 : kNaN;
  row.laal = i ? i->laal / 1000.0 : kNaN;
  row.atd = i ? i->atd / 1000.0 : kNaN;
  row.al_ca = c ? c->al / 1000.0 : kNaN;
  row.laal_ca = c ? c->laal / 1000.0 : kNaN;
  row.atd_ca = c ? c->atd / 1000.0 : kNaN;
  return row;
}

SweepResult sweep(const RunConfig& cfg) {
  if (!cfg.grid) throw_invalid("sweep requires a grid");
  cfg.validate();
  // Reject bad grid values before any point runs.
  for (const auto& value : cfg.grid->values) {
    auto options = cfg.policy_options;
    options[cfg.grid->param] = value;
    policy_from_options(cfg.policy, options);
  }
  SweepResult result;
  json points = json::array();
  for (const auto& value : cfg.grid->values) {
    RunConfig point = cfg;
    point.grid.reset();
    point.policy_options[cfg.grid->param] = value;
    const std::string dir = safe_name(cfg.grid->param + "=" + value);
    if (!cfg.out.empty()) point.out = cfg.out / dir;
    log::info("sweep point " + cfg.grid->param + "=" + value);
    const RunReport report = run_eval(point);
    result.failed_segments += static_cast<int>(report.failed.size());
    CurveRow row = curve_row(report, value);
    json p{{"param", cfg.grid->param}, {"value", value}, {"dir", dir}, {"AL_s", row.al}};
    if (cfg.al_threshold_s) p["within_al_threshold"] = row.al <= *cfg.al_threshold_s;
    points.push_back(std::move(p));
    result.rows.push_back(std::move(row));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const CurveRow& a, const CurveRow& b) { return a.al < b.al; });

  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    write_file(cfg.out / "curve.csv", curve_csv(result.rows));
    if (cfg.svg) write_file(cfg.out / "curve.svg", curve_svg(result.rows));
    json manifest;
    manifest["tool"] = "streamsim";
    manifest["policy"] = policy_kind_name(parse_policy_kind(cfg.policy));
    manifest["grid"] = {{"param", cfg.grid->param}, {"values", cfg.grid->values}};
    manifest["points"] = std::move(points);
    manifest["seed"] = cfg.seed;
    manifest["csv"] = "curve.csv";
    if (cfg.svg) manifest["svg"] = "curve.svg";
    if (cfg.al_threshold_s) manifest["al_threshold_s"] = *cfg.al_threshold_s;
    write_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");
  }
  return result;
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = std::string(kCurveHeader) + "\n";
  for (const auto& r : rows) {
    out += r.policy + "," + r.param + "," + (r.bleu ? fixed(*r.bleu, 2) : "NA") + "," +
           fixed(r.al, 3) + "," + fixed(r.laal, 3) + "," + fixed(r.atd, 3) + "," +
           fixed(r.al_ca, 3) + "," + fixed(r.laal_ca, 3) + "," + fixed(r.atd_ca, 3) + "\n";
  }
  return out;
}

std::string curve_svg(const std::vector<CurveRow>& rows) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
  double x_max = 0.5;
  double y_min = 100, y_max = 0;
  for (const auto& r : rows) {
    if (std::isfinite(r.al)) x_max = std::max(x_max, r.al);
    if (std::isfinite(r.al_ca)) x_max = std::max(x_max, r.al_ca);
    if (r.bleu) {
      y_min = std::min(y_min, *r.bleu);
      y_max = std::max(y_max, *r.bleu);
    }
  }
  if (y_max < y_min) y_min = 0, y_max = 100;
  y_min = std::max(0.0, std::floor(y_min - 1));
  y_max = std::min(100.0, std::ceil(y_max + 1));
  x_max = std::ceil(x_max * 2) / 2;
  auto px = [&](double x) { return kLeft + x / x_max * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - (y - y_min) / (y_max - y_min) * (kH - kTop - kBottom); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
    << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (double x = 0; x <= x_max + 1e-9; x += 0.5) {
    s << "<text x=\"" << px(x) << "\" y=\"" << kH - kBottom + 16
      << "\" font-size=\"11\" text-anchor=\"middle\">" << fixed(x, 1) << "</text>\n";
  }
  s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
    << "\" font-size=\"12\" text-anchor=\"middle\">AL / AL_CA (s)</text>\n";
  s << "<text x=\"15\" y=\"" << kH / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 " << kH / 2
    << ")\" text-anchor=\"middle\">BLEU</text>\n";
  s << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y_min) << "\" font-size=\"11\" text-anchor=\"end\">"
    << fixed(y_min, 0) << "</text>\n";
  s << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y_max) << "\" font-size=\"11\" text-anchor=\"end\">"
    << fixed(y_max, 0) << "</text>\n";

  auto series = [&](bool ca) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
      const double x = ca ? r.al_ca : r.al;
      if (r.bleu && std::isfinite(x)) pts.emplace_back(x, *r.bleu);
    }
    std::sort(pts.begin(), pts.end());
    s << "<polyline fill=\"none\" stroke=\"#b0306a\"" << (ca ? " stroke-dasharray=\"6,4\"" : "")
      << " points=\"";
    for (const auto& [x, y] : pts) s << px(x) << "," << py(y) << " ";
    s << "\"/>\n";
    for (const auto& [x, y] : pts) {
      s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"#b0306a\"/>\n";
    }
  };
  series(false);
  series(true);
  s << "</svg>\n";
  return s.str();
}

}  // namespace streamsim
