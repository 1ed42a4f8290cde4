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

// Reference parameter sets for a 0.066 kg 21700 cell: initial (linearised)
// and refined two- and four-stage models, plus the staging temperatures used
// to produce them.

#include <cmath>
#include <vector>

#include "arcfit/kinetics.hpp"
#include "arcfit/ode.hpp"
#include "arcfit/trace.hpp"

namespace arcfit::testing {

inline CellProperties reference_cell() {
  CellProperties cell;
  cell.mass = 0.066;
  cell.specific_heat = 859.0;
  cell.surface_area = 4.618e-3;
  cell.emissivity = 0.8;
  cell.conv_coeff = 10.0;
  return cell;
}

inline StageKinetics make_stage(double A, double Ea, double h, double m, double n, double c0) {
  StageKinetics s;
  s.freq_factor = A;
  s.activation_energy = Ea;
  s.enthalpy = h;
  s.order_m = m;
  s.order_n = n;
  s.c0 = c0;
  s.direction = m > 0.0 ? Direction::Converting : Direction::Consuming;
  return s;
}

inline ReactionSystem two_stage_linearized() {
  return {{make_stage(2.1755e11, 1.9530e-19, 2434.0, 0.0, 1.0, 1.0),
           make_stage(2.927e7, 1.474e-19, 16963.0, 5.0, 0.0, 0.04)},
          reference_cell()};
}

inline ReactionSystem two_stage_refined() {
  return {{make_stage(1.723e11, 2.027e-19, 8336.0, 0.0, 1.0, 1.0),
           make_stage(1.994e7, 1.554e-19, 15970.0, 4.62, 0.0, 0.04)},
          reference_cell()};
}

inline ReactionSystem four_stage_linearized() {
  return {{make_stage(1.3859e11, 1.9209e-19, 2150.0, 0.0, 1.0, 1.0),
           make_stage(4.620e7, 1.4174e-19, 1700.0, 0.0, 1.0, 1.0),
           make_stage(2.371e11, 1.941e-19, 3685.0, 2.0, 2.0, 0.04),
           make_stage(2.371e11, 1.941e-19, 11861.0, 5.0, 1.0, 0.04)},
          reference_cell()};
}

inline ReactionSystem four_stage_refined() {
  return {{make_stage(9.480e10, 1.969e-19, 2212.0, 0.0, 1.0, 1.0),
           make_stage(2.550e7, 1.462e-19, 1330.0, 0.0, 1.0, 1.0),
           make_stage(3.936e10, 2.072e-19, 5696.0, 6.34, 1.94, 0.04),
           make_stage(2.831e11, 1.931e-19, 12980.0, 4.61, 1.0, 0.04)},
          reference_cell()};
}

inline std::vector<double> two_stage_boundaries_C() { return {124.0, 167.0, 472.0}; }
inline std::vector<double> four_stage_boundaries_C() { return {124.0, 161.0, 191.0, 257.0, 472.0}; }

// Noiseless adiabatic trace sampled every dt from T0 until the ceiling.
inline ArcTrace truth_trace(const ReactionSystem& sys, double T0 = 397.15, double ceiling = 745.15,
                            double dt = 1.0) {
  const auto tol = Tolerances::for_thermal(sys.stage_count(), 1e-10, 1e-13, 1e-10);
  const auto tr = integrate(sys, Adiabatic{}, initial_state(sys, T0), 0.0, 1e5, tol,
                            {TemperatureCeiling{ceiling}});
  ArcTrace a;
  std::vector<double> y(sys.state_dimension());
  for (std::size_t k = 0; k * dt <= tr.t_end(); ++k) {
    tr.sample(k * dt, y);
    a.times.push_back(k * dt);
    a.temperatures.push_back(y.back());
  }
  return a;
}

// Single zero-order stage (c^0 (1-c)^0 = 1) whose enthalpy spans [Ts, Te] exactly, so
// ln(dT/dt) is linear in 1/T. Sampled uniformly with at most `peak_increment` K per sample.
inline ArcTrace zero_order_trace(const CellProperties& cell, double A, double Ea, double Ts,
                                 double Te, double peak_increment = 0.005) {
  const ReactionSystem sys{{make_stage(A, Ea, cell.heat_capacity() * (Te - Ts), 0.0, 0.0, 1.0)},
                           cell};
  const double peak_rate = (Te - Ts) * A * std::exp(-Ea / (kBoltzmann * Te));
  const double dt = peak_increment / peak_rate;
  const auto tol = Tolerances::for_thermal(1, 1e-11, 1e-14, 1e-11);
  const auto tr = integrate(sys, Adiabatic{}, initial_state(sys, Ts), 0.0, 1e12, tol,
                            {TemperatureCeiling{Te + 1.0}});
  ArcTrace a;
  std::vector<double> y(2);
  for (std::size_t k = 0; k * dt <= tr.t_end(); ++k) {
    tr.sample(k * dt, y);
    a.times.push_back(k * dt);
    a.temperatures.push_back(y[1]);
  }
  return a;
}

}  // namespace arcfit::testing
