// Copyright 2026 The hashcf Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace hashcf {

// Exit codes used by the command line tool. Every exception below maps to one.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNumeric = 3,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ExitCode code = ExitCode::kData)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class EmptyAfterFilterError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what)
      : Error(what, ExitCode::kData) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what)
      : Error(what, ExitCode::kData) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(what, ExitCode::kUsage) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(what, ExitCode::kData) {}
};

// Raised when a loss or gradient turns non-finite. Carries the batch index.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long batch_index)
      : Error(what + " (batch " + std::to_string(batch_index) + ")",
              ExitCode::kNumeric),
        batch_index_(batch_index) {}
  long batch_index() const { return batch_index_; }

 private:
  long batch_index_;
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what)
      : Error(what, ExitCode::kUsage) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(what, ExitCode::kUsage) {}
};

// A pipeline stage found an upstream artifact missing.
class StageError : public Error {
 public:
  explicit StageError(const std::string& what)
      : Error(what, ExitCode::kData) {}
};

}  // namespace hashcf
