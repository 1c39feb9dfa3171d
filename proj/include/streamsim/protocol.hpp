// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

// Client side of the external-model protocol: newline-delimited JSON, one
// object per line, over a TCP connection or a child process's stdio.
//
//   -> {"type":"hello","version":1}            <- {"type":"hello_ack","version":1}
//   -> {"type":"reset","segment_id":S}
//   -> {"type":"generate","segment_id":S,"chunks_read":N,"chunks":[[..]..],"forced_prefix":[..]}
//   <- {"type":"hypothesis","segment_id":S,"tokens":[..],"attention":[[..]..]}
//   <- {"type":"error","code":C,"message":M}
//
// "chunks" carries only the chunks not yet sent for the current segment;
// chunks_read is the running total.

#ifndef STREAMSIM_PROTOCOL_HPP_
#define STREAMSIM_PROTOCOL_HPP_

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "streamsim/stream.hpp"

namespace streamsim {

inline constexpr int kProtocolVersion = 1;

// Bidirectional line transport. Failures throw Error(kModel).
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void write_line(std::string_view line) = 0;
  // nullopt on orderly end of stream.
  virtual std::optional<std::string> read_line() = 0;
  virtual std::string describe() const = 0;
};

// Owns a connected stream socket.
class SocketChannel : public LineChannel {
 public:
  SocketChannel(int fd, std::string description,
                std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~SocketChannel() override;
  SocketChannel(const SocketChannel&) = delete;
  SocketChannel& operator=(const SocketChannel&) = delete;

  void write_line(std::string_view line) override;
  std::optional<std::string> read_line() override;
  std::string describe() const override { return description_; }

 protected:
  void close_fd();

 private:
  int fd_;
  std::string description_;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
};

std::unique_ptr<LineChannel> connect_tcp(const std::string& host, int port);

// Runs `command` through /bin/sh with its stdin and stdout joined to the
// returned channel. The child is terminated when the channel is destroyed.
std::unique_ptr<LineChannel> spawn_stdio(const std::string& command);

// Protocol messages, compact and in documented field order.
std::string hello_message();
std::string reset_message(const std::string& segment_id);
std::string generate_message(const std::string& segment_id, int chunks_read,
                             std::span<const Chunk> new_chunks,
                             std::span<const std::string> forced_prefix);

// Decodes a hypothesis reply; error replies and malformed lines throw
// Error(kModel).
Hypothesis decode_hypothesis(std::string_view line, const std::string& segment_id);

class ProtocolModel final : public IncrementalModel {
 public:
  // Performs the hello handshake.
  explicit ProtocolModel(std::unique_ptr<LineChannel> channel);

  void reset(const SegmentSource& segment) override;
  Hypothesis generate(std::span<const Chunk> read,
                      std::span<const std::string> forced_prefix) override;

 private:
  std::string request(const std::string& line);

  std::unique_ptr<LineChannel> channel_;
  std::string segment_id_;
  std::size_t chunks_sent_ = 0;
};

}  // namespace streamsim

#endif  // STREAMSIM_PROTOCOL_HPP_
