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
#include <vector>

#include "arcfit/kinetics.hpp"
#include "arcfit/ode.hpp"
#include "arcfit/trace.hpp"

namespace arcfit {

/// Completion threshold for the runaway-complete event.
inline constexpr double kCompletionTolerance = 1e-6;

/// Adiabatic run from every stage's c0 at T0; stops once all stages are within
/// kCompletionTolerance of completion, or at t_end.
Trajectory simulate_exotherm(const ReactionSystem& system, double T0, double t_end,
                             const std::optional<Tolerances>& tol = std::nullopt);

enum class HwsPhase : std::uint8_t { Heat, Wait, Seek, Exotherm };
const char* to_string(HwsPhase phase);

struct HwsProtocol {
  double step_increment = 5.0;            // K
  double wait_duration = 2400.0;          // s
  double seek_duration = 600.0;           // s
  double exotherm_threshold = 0.02 / 60;  // K/s, 0 enters exotherm at the first seek
  double start_temperature = 323.15;      // K
  double heating_rate = 2.0 / 60;         // K/s imposed during heat steps

  void validate() const;
};

struct HwsResult {
  Trajectory trajectory;
  std::vector<HwsPhase> phases;  // one label per trajectory point
  std::optional<double> exotherm_time;
  std::optional<double> exotherm_temperature;  // K at the start of exotherm mode
};

/// Cycles wait, seek and heat steps from the start temperature. Wait and seek are adiabatic
/// (the chamber tracks the cell); exotherm mode is entered when the mean seek-window rate
/// reaches the threshold and then runs adiabatically to completion or t_end.
HwsResult simulate_hws(const ReactionSystem& system, const HwsProtocol& protocol, double t_end,
                       const std::optional<Tolerances>& tol = std::nullopt);

/// Temperature at which the adiabatic self-heating rate at the initial concentrations
/// first reaches `rate` (K/s); bisection on stage_rate between lo and hi.
double self_heating_onset(const ReactionSystem& system, double rate, double lo = 250.0,
                          double hi = 1000.0);

/// Which heating rate the onset threshold is applied to.
enum class OnsetSignal : std::uint8_t {
  SelfHeating,  // reaction heat only, sum(h r) / (m c_p)
  Total,        // full dT/dt including heat drawn from the oven
};

struct OvenResult {
  Trajectory trajectory;
  std::optional<double> onset_time;  // first upward crossing of the onset rate
  double peak_temperature = 0.0;
  double peak_time = 0.0;
};

/// Lumped cell in an oven at T_oven with convection and radiation (cell properties).
OvenResult simulate_oven(const ReactionSystem& system, double T_oven, double T0, double t_end,
                         const std::optional<Tolerances>& tol = std::nullopt,
                         double onset_rate = 10.0 / 60,
                         OnsetSignal signal = OnsetSignal::SelfHeating);

enum class SynthMode : std::uint8_t { Adiabatic, Hws };

struct SynthOptions {
  SynthMode mode = SynthMode::Adiabatic;
  double noise_std = 0.0;  // K
  double sample_dt = 1.0;  // s
  std::uint64_t seed = 0;
  double T0 = 397.15;       // adiabatic start, K
  double t_end = 20000.0;   // s
  HwsProtocol hws;
};

/// Uniformly sampled trace with independent Gaussian temperature noise; provenance records
/// the seed and generator settings.
ArcTrace synth_trace(const ReactionSystem& system, const SynthOptions& options);

// 1-D radial surrogate

struct Material {
  double density = 0.0;        // kg/m^3
  double specific_heat = 0.0;  // J/(kg K)
  double conductivity = 0.0;   // W/(m K)
};

struct RadialRegion {
  std::string name;
  double outer_radius = 0.0;  // m
  Material material;
  bool source = false;  // reaction heat released here
  std::size_t nodes = 1;
};

struct RadialModel {
  std::vector<RadialRegion> regions;  // from the axis outward
  double height = 0.07;               // m
  double emissivity = 0.8;
  double conv_coeff = 10.0;  // W/(m^2 K)

  /// Jellyroll sized to carry the lumped cell's mass and c_p, inside a thin steel can.
  static RadialModel cylindrical_cell(const CellProperties& cell, double radial_conductivity = 0.3,
                                      std::size_t jellyroll_nodes = 40, std::size_t can_nodes = 2);
  std::size_t node_count() const;
  double outer_radius() const { return regions.back().outer_radius; }
  double heat_capacity() const;  // J/K
  double source_volume() const;  // m^3
  void validate() const;
  RadialModel refined(std::size_t factor) const;
};

struct RadialOptions {
  double dt = 1.0;              // s, conduction step
  double output_every = 10.0;   // s
  bool reactions = true;
  std::optional<Tolerances> tol;  // per-node reaction substeps
};

struct RadialResult {
  std::vector<double> radii;  // node centres, m
  std::vector<double> volumes;  // m^3
  std::vector<double> times;
  std::vector<std::vector<double>> temperatures;  // [time][node], K
  std::vector<double> mean_temperature;  // volume-heat-capacity weighted, K
  double stored_energy_change = 0.0;  // J
  double boundary_energy_in = 0.0;    // J
  double source_energy = 0.0;         // J
  double peak = 0.0;  // K, hottest node over every time step

  /// |stored - boundary - source| relative to the largest term.
  double energy_residual() const;
  double peak_temperature() const;
};

RadialResult simulate_radial(const RadialModel& model, const ReactionSystem& system,
                             double T_oven, double T0, double t_end,
                             const RadialOptions& options = {});

}  // namespace arcfit
