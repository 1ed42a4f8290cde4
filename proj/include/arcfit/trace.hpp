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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace arcfit {

struct ExperimentalSource {
  std::string path;
  std::string sha256;  // of the file bytes
};
struct SyntheticSource {
  std::uint64_t seed = 0;
  /// Generator settings as ordered key/value text.
  std::vector<std::pair<std::string, std::string>> generator;
};
using Provenance = std::variant<ExperimentalSource, SyntheticSource>;

/// Calorimeter record in SI units: times in s, temperatures in K, rates in K/s.
struct ArcTrace {
  std::vector<double> times;
  std::vector<double> temperatures;
  std::optional<std::vector<double>> rates;
  Provenance provenance;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  /// Throws InvalidInput naming the first offending sample.
  void validate() const;
  /// Samples [begin, end).
  ArcTrace slice(std::size_t begin, std::size_t end) const;
};

}  // namespace arcfit
