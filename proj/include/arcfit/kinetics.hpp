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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace arcfit {

inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W/(m^2 K^4)
inline constexpr double kCelsiusOffset = 273.15;

inline constexpr double celsius_to_kelvin(double c) { return c + kCelsiusOffset; }
inline constexpr double kelvin_to_celsius(double k) { return k - kCelsiusOffset; }

/// Lumped thermal properties of the cell.
struct CellProperties {
  double mass = 0.0;           // kg
  double specific_heat = 0.0;  // J/(kg K)
  double surface_area = 0.0;   // m^2
  double emissivity = 0.8;
  double conv_coeff = 10.0;    // W/(m^2 K); user supplied, not measured

  double heat_capacity() const { return mass * specific_heat; }
  void validate() const;
};

/// Which way the progress variable moves while the stage releases heat.
enum class Direction {
  Consuming,   // c decays toward 0 (nth-order, m = 0)
  Converting,  // c grows toward 1 (autocatalytic, m > 0)
};

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// One Arrhenius stage: r = c^n (1-c)^m A exp(-Ea / (k_b T)), heat h * r.
struct StageKinetics {
  double freq_factor = 0.0;        // A, 1/s
  double activation_energy = 0.0;  // Ea, J per molecule
  double enthalpy = 0.0;           // h, J
  double order_m = 0.0;
  double order_n = 0.0;
  double c0 = 1.0;
  Direction direction = Direction::Consuming;

  /// Activation temperature Ea / k_b in kelvin.
  double activation_temperature() const { return activation_energy / kBoltzmann; }
  /// Value of c at which the stage stops releasing heat.
  double completed_value() const { return direction == Direction::Consuming ? 0.0 : 1.0; }
  double sign() const { return direction == Direction::Consuming ? -1.0 : 1.0; }
  void validate() const;
};

struct ReactionSystem {
  std::vector<StageKinetics> stages;
  CellProperties cell;

  std::size_t stage_count() const { return stages.size(); }
  /// Dimension of the flattened state [c_1 .. c_N, T].
  std::size_t state_dimension() const { return stages.size() + 1; }
  void validate() const;
};

struct ThermalState {
  std::vector<double> concentrations;
  double temperature = 0.0;  // K

  std::vector<double> flatten() const;
  static ThermalState unflatten(std::span<const double> y);
  void validate() const;
};

/// Initial state of a system at temperature T0: every stage at its c0.
ThermalState initial_state(const ReactionSystem& system, double T0);

struct Adiabatic {};
struct Oven {
  double T_inf = 0.0;  // K
};
struct TracedAmbient {
  std::function<double(double)> T_inf;  // time (s) -> K
};

/// Far-field temperature seen by the cell surface.
using AmbientModel = std::variant<Adiabatic, Oven, TracedAmbient>;

/// Far-field temperature at time t; empty for Adiabatic.
std::optional<double> ambient_temperature(const AmbientModel& ambient, double t);

/// Arrhenius rate (1/s). c is clamped to [0, 1]; 0^0 = 1.
double stage_rate(const StageKinetics& stage, double c, double T);

/// Heat release rate (W) for a non-negative rate.
double stage_heat_rate(const StageKinetics& stage, double rate);

/// Convective plus radiative heat gained from the surroundings (W).
double dissipative_flux(const CellProperties& cell, double T, double T_inf);

/// Time derivative of the flattened state [c_1 .. c_N, T].
void system_rhs(const ReactionSystem& system, std::span<const double> y,
                const AmbientModel& ambient, double t, std::span<double> dydt);

ThermalState system_rhs(const ReactionSystem& system, const ThermalState& state,
                        const AmbientModel& ambient, double t);

/// Partial derivatives of a single stage rate.
struct RateDerivatives {
  double rate = 0.0;
  double d_c = 0.0;      // dr/dc (0 outside the open interval (0,1) clamp region)
  double d_T = 0.0;      // dr/dT
  double d_log_A = 0.0;  // dr/d(ln A)
  double d_log_Ea = 0.0; // dr/d(ln Ea)
  double d_m = 0.0;      // dr/dm
  double d_n = 0.0;      // dr/dn
};

RateDerivatives stage_rate_derivatives(const StageKinetics& stage, double c, double T);

/// d(rhs)/dy for the flattened state.
void system_jacobian(const ReactionSystem& system, std::span<const double> y,
                     const AmbientModel& ambient, double t, Eigen::MatrixXd& jac);

}  // namespace arcfit
