// Copyright 2026 The littertrack Authors. All Rights Reserved.
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

namespace littertrack {

// Broad failure classes. The C API and the CLI map these one-to-one onto
// status / exit codes, so the numeric values are part of the public contract.
enum class ErrorKind {
  kInput = 2,       // malformed files, invalid values, bad sequencing
  kNumerical = 3,   // factorization failures, singular systems
  kConfig = 4,      // invalid or inconsistent configuration
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

// Frame indices passed to the tracker went backwards or repeated.
class SequencingError : public InputError {
 public:
  explicit SequencingError(const std::string& what) : InputError(what) {}
};

// A box operation would produce non-positive width or height.
class DegenerateBoxError : public InputError {
 public:
  explicit DegenerateBoxError(const std::string& what) : InputError(what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

}  // namespace littertrack
