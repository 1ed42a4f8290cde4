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

#include "arcfit/kinetics.hpp"

#include <algorithm>
#include <cmath>

#include "arcfit/errors.hpp"

namespace arcfit {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidInput(std::string("non-finite ") + what);
}

// b^e with 0^0 = 1.
double power(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  if (base <= 0.0) return 0.0;
  if (exponent == 1.0) return base;
  return std::pow(base, exponent);
}

// d(b^e)/db with the same conventions; the singular 0 < e < 1 limit at b = 0 maps to 0.
double power_slope(double base, double exponent) {
  if (exponent == 0.0) return 0.0;
  if (exponent == 1.0) return 1.0;
  if (base <= 0.0) return 0.0;
  return exponent * std::pow(base, exponent - 1.0);
}

double conv_radiative_conductance(const CellProperties& cell, double T) {
  return cell.surface_area * (cell.conv_coeff + 4.0 * cell.emissivity * kStefanBoltzmann * T * T * T);
}

}  // namespace

void CellProperties::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidInput("cell mass must be positive");
  if (!(specific_heat > 0.0) || !std::isfinite(specific_heat)) {
    throw InvalidInput("cell specific heat must be positive");
  }
  if (!(surface_area > 0.0) || !std::isfinite(surface_area)) {
    throw InvalidInput("cell surface area must be positive");
  }
  if (!(emissivity >= 0.0 && emissivity <= 1.0)) throw InvalidInput("emissivity must lie in [0,1]");
  if (!(conv_coeff >= 0.0) || !std::isfinite(conv_coeff)) {
    throw InvalidInput("convective coefficient must be non-negative");
  }
}

const char* to_string(Direction d) {
  return d == Direction::Consuming ? "consuming" : "converting";
}

Direction direction_from_string(const std::string& s) {
  if (s == "consuming") return Direction::Consuming;
  if (s == "converting") return Direction::Converting;
  throw InvalidInput("unknown stage direction '" + s + "'");
}

void StageKinetics::validate() const {
  if (!(freq_factor > 0.0) || !std::isfinite(freq_factor)) {
    throw InvalidInput("frequency factor must be positive");
  }
  if (!(activation_energy > 0.0) || !std::isfinite(activation_energy)) {
    throw InvalidInput("activation energy must be positive");
  }
  if (!(enthalpy >= 0.0) || !std::isfinite(enthalpy)) throw InvalidInput("enthalpy must be >= 0");
  if (!(order_m >= 0.0) || !std::isfinite(order_m)) throw InvalidInput("order m must be >= 0");
  if (!(order_n >= 0.0) || !std::isfinite(order_n)) throw InvalidInput("order n must be >= 0");
  if (!(c0 >= 0.0 && c0 <= 1.0)) throw InvalidInput("initial concentration must lie in [0,1]");
  const Direction expected = order_m > 0.0 ? Direction::Converting : Direction::Consuming;
  if (direction != expected) {
    throw InvalidInput(std::string("stage direction must be ") + to_string(expected) +
                       " for order m = " + std::to_string(order_m));
  }
}

void ReactionSystem::validate() const {
  if (stages.empty()) throw InvalidInput("reaction system needs at least one stage");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    try {
      stages[i].validate();
    } catch (const InvalidInput& e) {
      throw InvalidInput("stage " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  cell.validate();
}

std::vector<double> ThermalState::flatten() const {
  std::vector<double> y(concentrations);
  y.push_back(temperature);
  return y;
}

ThermalState ThermalState::unflatten(std::span<const double> y) {
  if (y.empty()) throw InvalidInput("empty state vector");
  ThermalState s;
  s.concentrations.assign(y.begin(), y.end() - 1);
  s.temperature = y.back();
  return s;
}

void ThermalState::validate() const {
  for (double c : concentrations) {
    if (!(c >= 0.0 && c <= 1.0)) throw InvalidInput("concentration outside [0,1]");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidInput("temperature must be finite and positive");
  }
}

ThermalState initial_state(const ReactionSystem& system, double T0) {
  ThermalState s;
  s.concentrations.reserve(system.stages.size());
  for (const auto& st : system.stages) s.concentrations.push_back(st.c0);
  s.temperature = T0;
  s.validate();
  return s;
}

std::optional<double> ambient_temperature(const AmbientModel& ambient, double t) {
  if (const auto* oven = std::get_if<Oven>(&ambient)) return oven->T_inf;
  if (const auto* traced = std::get_if<TracedAmbient>(&ambient)) return traced->T_inf(t);
  return std::nullopt;
}

double stage_rate(const StageKinetics& stage, double c, double T) {
  require_finite(c, "concentration");
  require_finite(T, "temperature");
  if (!(T > 0.0)) throw InvalidInput("temperature must be positive");
  c = std::clamp(c, 0.0, 1.0);
  const double f = power(c, stage.order_n) * power(1.0 - c, stage.order_m);
  if (f == 0.0) return 0.0;
  return f * stage.freq_factor * std::exp(-stage.activation_energy / (kBoltzmann * T));
}

double stage_heat_rate(const StageKinetics& stage, double rate) {
  require_finite(rate, "rate");
  if (rate < 0.0) throw InvalidInput("reaction rate must be non-negative");
  return stage.enthalpy * rate;
}

double dissipative_flux(const CellProperties& cell, double T, double T_inf) {
  require_finite(T, "temperature");
  require_finite(T_inf, "ambient temperature");
  const double T2 = T * T;
  const double Ti2 = T_inf * T_inf;
  return cell.surface_area * (cell.conv_coeff * (T_inf - T) +
                              cell.emissivity * kStefanBoltzmann * (Ti2 * Ti2 - T2 * T2));
}

void system_rhs(const ReactionSystem& system, std::span<const double> y,
                const AmbientModel& ambient, double t, std::span<double> dydt) {
  const std::size_t n = system.stages.size();
  if (y.size() != n + 1 || dydt.size() != n + 1) throw InvalidInput("state dimension mismatch");
  const double T = y[n];
  double heat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = system.stages[i];
    const double r = stage_rate(st, y[i], T);
    dydt[i] = st.sign() * r;
    heat += stage_heat_rate(st, r);
  }
  if (const auto T_inf = ambient_temperature(ambient, t)) heat += dissipative_flux(system.cell, T, *T_inf);
  dydt[n] = heat / system.cell.heat_capacity();
}

ThermalState system_rhs(const ReactionSystem& system, const ThermalState& state,
                        const AmbientModel& ambient, double t) {
  const auto y = state.flatten();
  std::vector<double> dydt(y.size());
  system_rhs(system, y, ambient, t, dydt);
  return ThermalState::unflatten(dydt);
}

RateDerivatives stage_rate_derivatives(const StageKinetics& stage, double c_raw, double T) {
  RateDerivatives d;
  const double c = std::clamp(c_raw, 0.0, 1.0);
  const double q = 1.0 - c;
  const double k = stage.freq_factor * std::exp(-stage.activation_energy / (kBoltzmann * T));
  const double pc = power(c, stage.order_n);
  const double pq = power(q, stage.order_m);
  d.rate = pc * pq * k;
  if (c_raw >= 0.0 && c_raw <= 1.0) {
    d.d_c = (power_slope(c, stage.order_n) * pq - pc * power_slope(q, stage.order_m)) * k;
  }
  const double arrh = stage.activation_energy / (kBoltzmann * T);
  d.d_T = d.rate * arrh / T;
  d.d_log_A = d.rate;
  d.d_log_Ea = -d.rate * arrh;
  d.d_m = q > 0.0 ? d.rate * std::log(q) : 0.0;
  d.d_n = c > 0.0 ? d.rate * std::log(c) : 0.0;
  return d;
}

void system_jacobian(const ReactionSystem& system, std::span<const double> y,
                     const AmbientModel& ambient, double t, Eigen::MatrixXd& jac) {
  const std::size_t n = system.stages.size();
  jac.setZero(n + 1, n + 1);
  const double T = y[n];
  const double inv_cap = 1.0 / system.cell.heat_capacity();
  double dheat_dT = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = system.stages[i];
    const auto d = stage_rate_derivatives(st, y[i], T);
    const auto ii = static_cast<Eigen::Index>(i);
    jac(ii, ii) = st.sign() * d.d_c;
    jac(ii, static_cast<Eigen::Index>(n)) = st.sign() * d.d_T;
    jac(static_cast<Eigen::Index>(n), ii) = st.enthalpy * d.d_c * inv_cap;
    dheat_dT += st.enthalpy * d.d_T;
  }
  if (ambient_temperature(ambient, t)) dheat_dT -= conv_radiative_conductance(system.cell, T);
  jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = dheat_dT * inv_cap;
}

}  // namespace arcfit
