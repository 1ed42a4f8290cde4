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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcfit/kinetics.hpp"
#include "arcfit/trace.hpp"

namespace arcfit {

/// Stage boundaries [T_start, T_1, ..., T_end] in K.
struct StagePartition {
  std::vector<double> boundaries;

  static StagePartition from_celsius(std::span<const double> boundaries_C);
  std::size_t stage_count() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }
  double t_start() const { return boundaries.front(); }
  double t_end() const { return boundaries.back(); }
  void validate() const;
};

/// ln(dT/dt) against 1/T.
struct LinearFitResult {
  double slope = 0.0;      // K
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::size_t n_excluded = 0;  // samples dropped for a non-positive rate
};

struct StageFit {
  double freq_factor = 0.0;        // 1/s
  double activation_energy = 0.0;  // J
  LinearFitResult diagnostics;
};

/// Reaction orders and starting state of a stage; inputs to the initializer, never fitted there.
struct StageOrders {
  double m = 0.0;
  double n = 1.0;
  double c0 = 1.0;
  Direction direction = Direction::Consuming;
};

struct InitOptions {
  std::size_t rate_window = 11;
  /// Fits below this r^2 take the previous stage's A and Ea.
  double min_r_squared = 0.5;
  /// Temperature dips up to this size are tolerated when staging noisy records.
  double monotone_slack = 0.0;
};

struct StageInit {
  StageFit fit;
  std::size_t segment_size = 0;
  bool substituted = false;
  std::string note;
};

struct Initialization {
  ReactionSystem system;
  std::vector<StageInit> stages;
};

/// Centered moving least-squares slope of T(t) over an odd window; one-sided at the ends.
ArcTrace estimate_rate(const ArcTrace& trace, std::size_t window = 11);

/// Samples between the first reaching T_start and the first exceeding T_end. No monotonicity
/// requirement.
ArcTrace temperature_window(const ArcTrace& trace, double T_start, double T_end);

/// Left-closed segments, the last one right-closed. A segment starts at the first sample
/// reaching its lower boundary. Non-monotone temperature inside the window is a StagingError.
std::vector<ArcTrace> partition(const ArcTrace& trace, const StagePartition& part,
                                double monotone_slack = 0.0);

/// m c_p (T_end - T_start).
double stage_enthalpy(const CellProperties& cell, double T_start, double T_end);

/// Fits ln(dT/dt) = ln[A (T_end - T_start)] - Ea / (k_b T) using the segment's rates.
StageFit linearized_fit(const ArcTrace& segment, double T_start, double T_end);

Initialization initialize(const ArcTrace& trace, const StagePartition& part,
                          const CellProperties& cell, std::span<const StageOrders> orders,
                          const InitOptions& options = {});

}  // namespace arcfit
