// Copyright 2026 The MEntA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MENTA_ERROR_H_
#define MENTA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace menta {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kDuplicateId,
  kInsufficientData,
  kConfiguration,
  kTransport,  // retryable: connection failures and exhausted 429/5xx retries
  kBackend,    // non-retryable HTTP status from a model backend
  kShortfall,
  kDivergence,
  kIndexing,
  kRunInvalid,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the library. The code drives CLI exit statuses;
// transport errors additionally carry the attempt count and last HTTP status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  static Error Transport(const std::string& message, int attempts,
                         int last_status = 0) {
    Error e(ErrorCode::kTransport, message);
    e.attempts_ = attempts;
    e.status_ = last_status;
    return e;
  }

  static Error Backend(int status, const std::string& body_excerpt) {
    Error e(ErrorCode::kBackend, "backend returned HTTP " +
                                     std::to_string(status) + ": " +
                                     body_excerpt);
    e.status_ = status;
    return e;
  }

  ErrorCode code() const { return code_; }
  bool retryable() const { return code_ == ErrorCode::kTransport; }
  int attempts() const { return attempts_; }
  int status() const { return status_; }

  // Prefixes the message with a stage or location, keeping the code.
  Error WithContext(std::string_view context) const {
    Error e(code_, std::string(context) + ": " + what());
    e.attempts_ = attempts_;
    e.status_ = status_;
    return e;
  }

 private:
  ErrorCode code_;
  int attempts_ = 0;
  int status_ = 0;
};

inline Error InvalidArgument(const std::string& message) {
  return Error(ErrorCode::kInvalidArgument, message);
}

// CLI exit status: 2 usage/validation, 3 backend/transport, 4 run-invalidated.
int ExitCodeFor(ErrorCode code);

}  // namespace menta

#endif  // MENTA_ERROR_H_
