// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "streamsim/protocol.hpp"

#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

#include "log.hpp"
#include "streamsim/error.hpp"

extern char** environ;

namespace streamsim {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void model_error(const std::string& message) {
  throw Error(ErrorCode::kModel, message);
}

std::string errno_text() { return std::strerror(errno); }

class ProcessChannel final : public SocketChannel {
 public:
  ProcessChannel(int fd, pid_t pid, const std::string& command)
      : SocketChannel(fd, "stdio:" + command), pid_(pid) {}

  ~ProcessChannel() override {
    close_fd();
    ::kill(pid_, SIGTERM);
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
  }

 private:
  pid_t pid_;
};

}  // namespace

SocketChannel::SocketChannel(int fd, std::string description, std::chrono::milliseconds timeout)
    : fd_(fd), description_(std::move(description)), timeout_(timeout) {}

SocketChannel::~SocketChannel() { close_fd(); }

void SocketChannel::close_fd() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void SocketChannel::write_line(std::string_view line) {
  std::string data(line);
  data += '\n';
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      model_error(description_ + ": write failed: " + errno_text());
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> SocketChannel::read_line() {
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      model_error(description_ + ": poll failed: " + errno_text());
    }
    if (ready == 0) model_error(description_ + ": timed out waiting for a reply");
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      model_error(description_ + ": read failed: " + errno_text());
    }
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      std::string rest = std::move(buffer_);
      buffer_.clear();
      return rest;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::unique_ptr<LineChannel> connect_tcp(const std::string& host, int port) {
  const std::string where = host + ":" + std::to_string(port);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found); rc != 0) {
    model_error("cannot resolve " + where + ": " + ::gai_strerror(rc));
  }
  std::string last_error = "no usable address";
  int fd = -1;
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_error = errno_text();
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_error = errno_text();
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) model_error("cannot connect to " + where + ": " + last_error);
  return std::make_unique<SocketChannel>(fd, "tcp:" + where);
}

std::unique_ptr<LineChannel> spawn_stdio(const std::string& command) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    model_error("socketpair failed: " + errno_text());
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr,
                               const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    model_error("cannot start '" + command + "': " + std::strerror(rc));
  }
  return std::make_unique<ProcessChannel>(fds[0], pid, command);
}

std::string hello_message() {
  ordered_json j;
  j["type"] = "hello";
  j["version"] = kProtocolVersion;
  return j.dump();
}

std::string reset_message(const std::string& segment_id) {
  ordered_json j;
  j["type"] = "reset";
  j["segment_id"] = segment_id;
  return j.dump();
}

std::string generate_message(const std::string& segment_id, int chunks_read,
                             std::span<const Chunk> new_chunks,
                             std::span<const std::string> forced_prefix) {
  ordered_json j;
  j["type"] = "generate";
  j["segment_id"] = segment_id;
  j["chunks_read"] = chunks_read;
  ordered_json chunks = ordered_json::array();
  for (const auto& c : new_chunks) chunks.push_back(c.payload);
  j["chunks"] = std::move(chunks);
  j["forced_prefix"] = std::vector<std::string>(forced_prefix.begin(), forced_prefix.end());
  return j.dump();
}

Hypothesis decode_hypothesis(std::string_view line, const std::string& segment_id) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::exception& e) {
    model_error(std::string("unparseable reply: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "error") {
      model_error("model error [" + j.value("code", std::string("?")) +
                  "]: " + j.value("message", std::string()));
    }
    if (type != "hypothesis") model_error("unexpected reply type '" + type + "'");
    if (j.contains("segment_id") && j["segment_id"].get<std::string>() != segment_id) {
      model_error("reply for segment '" + j["segment_id"].get<std::string>() +
                  "' while serving '" + segment_id + "'");
    }
    auto tokens = j.at("tokens").get<Tokens>();
    const auto& rows = j.at("attention");
    if (rows.size() != tokens.size()) {
      model_error("attention has " + std::to_string(rows.size()) + " rows for " +
                  std::to_string(tokens.size()) + " tokens");
    }
    const int frames = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    std::vector<double> attention;
    attention.reserve(tokens.size() * frames);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != frames) model_error("ragged attention matrix");
      for (const auto& v : row) attention.push_back(v.get<double>());
    }
    return Hypothesis(std::move(tokens), frames, std::move(attention));
  } catch (const ordered_json::exception& e) {
    model_error(std::string("malformed hypothesis: ") + e.what());
  }
}

ProtocolModel::ProtocolModel(std::unique_ptr<LineChannel> channel) : channel_(std::move(channel)) {
  const std::string reply = request(hello_message());
  try {
    const auto j = ordered_json::parse(reply);
    if (j.at("type") != "hello_ack") model_error("handshake: expected hello_ack, got " + reply);
    if (j.at("version") != kProtocolVersion) {
      model_error("handshake: unsupported protocol version " + j.at("version").dump());
    }
  } catch (const ordered_json::exception& e) {
    model_error(channel_->describe() + ": bad handshake reply: " + e.what());
  }
  log::debug("connected to " + channel_->describe());
}

std::string ProtocolModel::request(const std::string& line) {
  channel_->write_line(line);
  auto reply = channel_->read_line();
  if (!reply) model_error(channel_->describe() + ": connection closed by model");
  return *reply;
}

void ProtocolModel::reset(const SegmentSource& segment) {
  segment_id_ = segment.id;
  chunks_sent_ = 0;
  channel_->write_line(reset_message(segment_id_));
}

Hypothesis ProtocolModel::generate(std::span<const Chunk> read,
                                   std::span<const std::string> forced_prefix) {
  if (read.size() < chunks_sent_) {
    throw Error(ErrorCode::kContractViolation, "generate called with fewer chunks than before");
  }
  const std::string line = generate_message(segment_id_, static_cast<int>(read.size()),
                                            read.subspan(chunks_sent_), forced_prefix);
  chunks_sent_ = read.size();
  return decode_hypothesis(request(line), segment_id_);
}

}  // namespace streamsim
