// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

// Test double for an external model: speaks the line protocol and answers
// from the scripts of a scripted corpus.
//
//   fake_bridge CORPUS CHUNK_MS [--tcp PORT_FILE] [--mode MODE]
//
// Modes: normal, error (every generate fails), garbage (unparseable
// replies), hangup (exit on the second generate), rebel (ignore the forced
// prefix), slow (never reply to generate).

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <json.hpp>

#include "streamsim/harness.hpp"
#include "streamsim/scripted_model.hpp"

using nlohmann::ordered_json;

namespace {

struct Server {
  std::map<std::string, streamsim::CorpusEntry> corpus;
  std::int64_t chunk_ms = 500;
  std::string mode = "normal";
  int generates = 0;

  // Returns the reply line, empty for none, or nullopt to hang up.
  std::optional<std::string> handle(const std::string& line) {
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception&) {
      return error("bad_request", "unparseable line");
    }
    const std::string type = j.value("type", "");
    if (type == "hello") return ordered_json{{"type", "hello_ack"}, {"version", 1}}.dump();
    if (type == "reset") return std::string();
    if (type != "generate") return error("unsupported", "unknown type");

    ++generates;
    if (mode == "error") return error("model_failure", "scripted failure");
    if (mode == "garbage") return std::string("{this is not json");
    if (mode == "hangup" && generates >= 2) return std::nullopt;
    if (mode == "slow") {
      std::this_thread::sleep_for(std::chrono::seconds(60));
      return std::nullopt;
    }

    const std::string id = j.value("segment_id", "");
    auto it = corpus.find(id);
    if (it == corpus.end() || !it->second.script) return error("unknown_segment", id);
    const auto chunks = streamsim::chunk_stream(it->second.duration_ms, chunk_ms);
    auto forced = j.at("forced_prefix").get<std::vector<std::string>>();
    if (mode == "rebel") forced.clear();
    streamsim::Hypothesis h;
    try {
      h = streamsim::scripted_generate(*it->second.script, static_cast<int>(chunks.size()),
                                       j.at("chunks_read").get<int>(), forced);
    } catch (const std::exception& e) {
      return error("bad_request", e.what());
    }
    if (mode == "rebel" && !h.tokens().empty()) {
      auto tokens = h.tokens();
      tokens[0] = "rebel" + std::to_string(generates);
      std::vector<double> att;
      for (int i = 0; i < h.size(); ++i) att.insert(att.end(), h.row(i).begin(), h.row(i).end());
      h = streamsim::Hypothesis(tokens, h.frames(), att);
    }
    ordered_json reply;
    reply["type"] = "hypothesis";
    reply["segment_id"] = id;
    reply["tokens"] = h.tokens();
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < h.size(); ++i) {
      rows.push_back(std::vector<double>(h.row(i).begin(), h.row(i).end()));
    }
    reply["attention"] = std::move(rows);
    return reply.dump();
  }

  static std::string error(const std::string& code, const std::string& message) {
    return ordered_json{{"type", "error"}, {"code", code}, {"message", message}}.dump();
  }
};

// Serves one connection. Returns when the peer closes or the mode hangs up.
void serve(Server& server, std::FILE* in, std::FILE* out) {
  char* buf = nullptr;
  std::size_t cap = 0;
  ssize_t n;
  while ((n = getline(&buf, &cap, in)) > 0) {
    std::string line(buf, static_cast<std::size_t>(n));
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    const auto reply = server.handle(line);
    if (!reply) break;
    if (!reply->empty()) {
      std::fputs(reply->c_str(), out);
      std::fputc('\n', out);
      std::fflush(out);
    }
  }
  std::free(buf);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: fake_bridge CORPUS CHUNK_MS [--tcp PORT_FILE] [--mode MODE]\n";
    return 1;
  }
  Server server;
  for (auto& e : streamsim::load_corpus(argv[1])) server.corpus.emplace(e.id, e);
  server.chunk_ms = std::stoll(argv[2]);
  std::string port_file;
  for (int i = 3; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--tcp") port_file = argv[i + 1];
    if (flag == "--mode") server.mode = argv[i + 1];
  }

  if (port_file.empty()) {
    serve(server, stdin, stdout);
    return 0;
  }

  const int listener = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof addr;
  if (bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || listen(listener, 8) != 0 ||
      getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    std::perror("fake_bridge");
    return 1;
  }
  {
    const std::string tmp = port_file + ".tmp";
    std::ofstream(tmp) << ntohs(addr.sin_port) << "\n";
    std::rename(tmp.c_str(), port_file.c_str());
  }
  // One thread per connection; runs until killed.
  for (;;) {
    const int fd = accept(listener, nullptr, nullptr);
    if (fd < 0) break;
    std::thread([server, fd]() mutable {
      std::FILE* in = fdopen(fd, "r");
      std::FILE* out = fdopen(dup(fd), "w");
      serve(server, in, out);
      std::fclose(in);
      std::fclose(out);
    }).detach();
  }
  return 0;
}
