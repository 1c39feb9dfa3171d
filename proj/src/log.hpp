// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal stderr logger. Verbosity comes from STREAMSIM_LOG
// (error, warn, info, debug; default warn).

#ifndef STREAMSIM_SRC_LOG_HPP_
#define STREAMSIM_SRC_LOG_HPP_

#include <string>

namespace streamsim::log {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

Level threshold();
void write(Level level, const std::string& message);

inline void error(const std::string& m) { write(Level::kError, m); }
inline void warn(const std::string& m) { write(Level::kWarn, m); }
inline void info(const std::string& m) { write(Level::kInfo, m); }
inline void debug(const std::string& m) { write(Level::kDebug, m); }

}  // namespace streamsim::log

#endif  // STREAMSIM_SRC_LOG_HPP_
