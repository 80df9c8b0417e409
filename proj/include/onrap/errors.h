// Copyright 2026 The ONRAP Authors
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

#ifndef ONRAP_ERRORS_H_
#define ONRAP_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onrap {

/// Raised when heading + slip leaves the open interval where the spatial
/// bicycle model is defined. `step_index` is the horizon step that failed,
/// or npos for a single isolated step.
class DomainError : public std::domain_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  DomainError(const std::string& what, std::size_t step_index = npos)
      : std::domain_error(what), step_index_(step_index) {}

  std::size_t step_index() const { return step_index_; }

 private:
  std::size_t step_index_;
};

/// Raised for malformed configuration or input files. `key` names the
/// offending configuration key (or is empty), `line` is 1-based or 0.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace onrap

#endif  // ONRAP_ERRORS_H_
