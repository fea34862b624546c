// Copyright 2026 The cgm Authors.
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

#include <stdexcept>
#include <string>

namespace cgm {

// Errors are reported through exceptions. The category decides the CLI exit
// code (config -> 2, io -> 3, numerical -> 4); invalid arguments are treated
// as configuration errors at the CLI boundary.
enum class ErrorKind { kInvalidArgument, kConfig, kIo, kNumerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

// Graph file ingestion failures carry a distinct code per failure mode.
enum class IoErrorCode {
  kOpenFailed,
  kMalformedHeader,
  kMalformedRow,
  kBadValue,
  kAsymmetric,
  kNonHollow,
  kIndexOutOfRange,
  kDuplicateEdge,
  kWriteFailed,
};

class IoError : public Error {
 public:
  IoError(IoErrorCode code, const std::string& what)
      : Error(ErrorKind::kIo, what), code_(code) {}
  IoErrorCode code() const noexcept { return code_; }

 private:
  IoErrorCode code_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace cgm
