// Copyright (C) 2026 The streamsim Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef STREAMSIM_ERROR_HPP_
#define STREAMSIM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace streamsim {

enum class ErrorCode {
  kInvalidArgument,
  kUndefinedMetric,
  kParse,
  kIo,
  kModel,
  kContractViolation,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this exception; the C API maps
// the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace streamsim

#endif  // STREAMSIM_ERROR_HPP_
