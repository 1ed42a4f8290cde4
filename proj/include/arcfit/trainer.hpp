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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcfit/errors.hpp"
#include "arcfit/kinetics.hpp"
#include "arcfit/sensitivity.hpp"
#include "arcfit/trace.hpp"

namespace arcfit {

struct TrainConfig {
  std::size_t steps = 10000;
  double lr0 = 1e-3;
  double decay_factor = 0.9;
  std::size_t decay_every = 300;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  LossSettings loss;
  std::uint64_t seed = 0;
  /// Learning-rate halvings tried after an integration failure before giving up; 0 disables rollback.
  std::size_t max_halvings = 5;
  /// Plateau stop: no improvement larger than early_stop_delta over this many steps.
  std::optional<std::size_t> early_stop_window;
  double early_stop_delta = 1e-8;

  void validate() const;
};

struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;

  static AdamMoments zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }
};

struct TrainHistory {
  std::vector<double> loss;           // K^2 at the parameters entering each step
  std::vector<double> learning_rate;  // rate used by the step's update
  std::vector<double> wall_time;      // s per step
  std::size_t rejected_steps = 0;
  bool early_stopped = false;

  ParamVector best;
  double best_loss = 0.0;
  std::size_t best_step = 0;  // index into loss; loss.size() when the final update was best
};

struct FitResult {
  ReactionSystem system;  // best-so-far parameters
  TrainHistory history;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

class DivergedTraining : public Error {
 public:
  DivergedTraining(const std::string& what, ParamVector best)
      : Error(what), best_(std::move(best)) {}
  const ParamVector& best() const { return best_; }

 private:
  ParamVector best_;
};

/// lr0 * decay_factor^floor(step / decay_every).
double lr_schedule(const TrainConfig& config, std::size_t step);

/// One bias-corrected Adam update; `step` counts from 1. Masked entries are untouched and
/// reaction orders are clamped at 0.
void adam_step(ParamVector& params, std::span<const double> grad, AdamMoments& moments,
               std::size_t step, double lr, const TrainConfig& config);

using StepObserver = std::function<void(std::size_t step, double loss, double lr)>;

FitResult fit(const ArcTrace& data, const ReactionSystem& init, std::span<const std::uint8_t> mask,
              const TrainConfig& config, const StepObserver& observer = {});

}  // namespace arcfit
