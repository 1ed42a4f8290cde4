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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arcfit/io.hpp"
#include "arcfit/kinetics.hpp"
#include "arcfit/linfit.hpp"
#include "arcfit/simkit.hpp"
#include "arcfit/trainer.hpp"

namespace arcfit {

/// One stage as configured. A, Ea and h are needed for simulation and for `given` initialization.
struct StageConfig {
  std::optional<double> freq_factor;        // 1/s
  std::optional<double> activation_energy;  // J
  std::optional<double> enthalpy;           // J
  double order_m = 0.0;
  double order_n = 1.0;
  double c0 = 1.0;
  /// Trainable entries by name (A, Ea, h, m, n); empty means the default mask.
  std::optional<std::vector<std::string>> train;
};

enum class InitMethod : std::uint8_t { Linear, Given };
enum class LossWindow : std::uint8_t { Partition, Full };

struct RunConfig {
  CellProperties cell;
  std::vector<StageConfig> stages;
  std::vector<double> boundaries_C;
  InitMethod init_method = InitMethod::Linear;
  InitOptions init;
  LossWindow loss_window = LossWindow::Partition;
  TrainConfig train;  // train.loss.tol carries the integrator tolerances
  std::optional<double> oven_temperature;  // K
  double T0 = 397.15;                      // K, simulation start
  double t_end = 20000.0;                  // s
  HwsProtocol hws;
  SynthOptions synth;
  RadialOptions radial;
  double radial_conductivity = 0.3;
  std::size_t jellyroll_nodes = 40;
  std::size_t can_nodes = 2;
  double gradcheck_h_rel = 1e-5;
  double gradcheck_rtol = 1e-8;
  double gradcheck_tolerance = 1e-4;
  double gradcheck_floor = 1e-8;
  std::filesystem::path output_dir = ".";

  /// Stages with A, Ea and h filled in; ConfigError naming the first missing field.
  ReactionSystem system() const;
  std::vector<StageOrders> orders() const;
  std::vector<std::uint8_t> mask() const;
  StagePartition partition() const;
  Tolerances tolerances() const;
};

/// Strict JSON loader: unknown keys and bad values raise ConfigError with the key path.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace arcfit
