// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The propsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace propsense {

// Base of every error raised by the library. The CLI maps each subclass to a
// distinct exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid numeric configuration: wrong sizes, non-power-of-two lengths,
// channel-count mismatches, out-of-domain parameters.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Coincident points where a direction is required.
class GeometryError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

// Argument outside the valid domain of a function (e.g. time past a profile end).
class RangeError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

enum class ParseErrc {
  malformed_header,
  unsupported_format,
  truncated_data,
  syntax,
  missing_key,
  unknown_key,
  out_of_range,
  bad_value,
};

const char *to_string(ParseErrc code) noexcept;

// Structured-input failure. `key()` names the offending configuration key
// when there is one.
class ParseError : public Error {
public:
  ParseError(ParseErrc code, std::string key, const std::string &what)
      : Error(what), code_(code), key_(std::move(key)) {}

  ParseErrc code() const noexcept { return code_; }
  const std::string &key() const noexcept { return key_; }

private:
  ParseErrc code_;
  std::string key_;
};

// Closed-loop harness could not make progress (e.g. no audio for the estimator).
class HarnessError : public Error {
public:
  using Error::Error;
};

} // namespace propsense
