// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace streamsim::log {

Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("STREAMSIM_LOG");
    if (env == nullptr) return Level::kWarn;
    const std::string_view v(env);
    if (v == "error") return Level::kError;
    if (v == "info") return Level::kInfo;
    if (v == "debug") return Level::kDebug;
    return Level::kWarn;
  }();
  return level;
}

void write(Level level, const std::string& message) {
  if (level > threshold()) return;
  static std::mutex mu;
  static constexpr const char* kNames[] = {"ERROR", "WARN", "INFO", "DEBUG"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "streamsim " << kNames[static_cast<int>(level)] << ": " << message << '\n';
}

}  // namespace streamsim::log
