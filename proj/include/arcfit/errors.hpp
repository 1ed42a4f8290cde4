// Copyright 2026 The arcfit Authors.
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

namespace arcfit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite, out-of-domain or otherwise malformed argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Requested time or temperature lies outside the covered range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Stage partition cannot be applied to a trace.
class StagingError : public Error {
 public:
  using Error::Error;
};

/// Too few usable samples for a regression.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Configuration file rejected by the loader. `where` is a JSON-pointer path.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, std::string detail)
      : Error(where.empty() ? detail : where + ": " + detail),
        where_(std::move(where)),
        detail_(std::move(detail)) {}

  const std::string& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string where_;
  std::string detail_;
};

}  // namespace arcfit
