// Copyright 2026 The Phenorag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHENORAG_ERROR_HPP_
#define PHENORAG_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace phenorag {

// Error categories double as the CLI's exit-code classes.
enum class ErrorKind {
  kConfig,
  kIo,
  kBackend,
  kData,
  kInvalidArgument,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::kConfig, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::kIo, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorKind::kData, message) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorKind::kInvalidArgument, message) {}
};

// Raised by completion backends. `retryable` marks transient failures
// (connection errors, 408/429/5xx); `attempts` is filled in by the client
// once its retry policy gives up.
class BackendError : public Error {
 public:
  BackendError(const std::string& message, bool retryable, int attempts = 1)
      : Error(ErrorKind::kBackend, message),
        retryable_(retryable),
        attempts_(attempts) {}

  bool retryable() const noexcept { return retryable_; }
  int attempts() const noexcept { return attempts_; }

 private:
  bool retryable_;
  int attempts_;
};

}  // namespace phenorag

#endif  // PHENORAG_ERROR_HPP_
