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

#include "arcfit/trace.hpp"

#include <cmath>

#include "arcfit/errors.hpp"

namespace arcfit {

void ArcTrace::validate() const {
  if (temperatures.size() != times.size())
    throw InvalidInput("trace: " + std::to_string(times.size()) + " times but " +
                       std::to_string(temperatures.size()) + " temperatures");
  if (rates && rates->size() != times.size())
    throw InvalidInput("trace: rate column length does not match time column");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(temperatures[i]))
      throw InvalidInput("trace: non-finite value at sample " + std::to_string(i));
    if (temperatures[i] <= 0.0)
      throw InvalidInput("trace: non-positive temperature at sample " + std::to_string(i));
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvalidInput("trace: times not strictly increasing at sample " + std::to_string(i));
  }
}

ArcTrace ArcTrace::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw RangeError("trace: slice out of range");
  ArcTrace out;
  out.provenance = provenance;
  out.times.assign(times.begin() + begin, times.begin() + end);
  out.temperatures.assign(temperatures.begin() + begin, temperatures.begin() + end);
  if (rates) out.rates.emplace(rates->begin() + begin, rates->begin() + end);
  return out;
}

}  // namespace arcfit
