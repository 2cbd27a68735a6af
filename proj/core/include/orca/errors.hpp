// Copyright 2025 The Orca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace orca {

// Stable error taxonomy. Codes map 1:1 onto CLI exit codes so callers can
// dispatch on failures without parsing messages.
enum class ErrorCode {
  Internal = 1,
  InvalidConfig = 2,
  FileNotReadable = 3,
  SchemaMismatch = 4,
  EmptyWindow = 5,
  NoEvidence = 6,
  BackendTimeout = 7,
  BackendHTTPError = 8,
  MalformedOutput = 9,
  SchemaViolation = 10,
  ManifestError = 11,
  InvalidSpec = 12,
  AmbiguousUnit = 13,
  MisalignedSeries = 14,
  SeriesTooShort = 15,
  MinAccuracyFailed = 16,
};

std::string_view error_code_name(ErrorCode code);
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Minimal expected-like return for operations whose contract is "typed error,
// never a throw" (std::expected is C++23; the toolchain is C++20).
template <typename T>
class Result {
 public:
  Result(T value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(ErrorCode code, std::string message)
      : error_code_(code), error_message_(std::move(message)) {}

  bool ok() const { return value_.has_value(); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return *value_; }
  T& value() & { return *value_; }
  T&& value() && { return std::move(*value_); }

  ErrorCode error_code() const { return error_code_; }
  const std::string& error_message() const { return error_message_; }

  T value_or_throw() && {
    if (!ok()) throw Error(error_code_, error_message_);
    return std::move(*value_);
  }

 private:
  std::optional<T> value_;
  ErrorCode error_code_ = ErrorCode::Internal;
  std::string error_message_;
};

}  // namespace orca
