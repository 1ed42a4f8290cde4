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


#include <cmath>
#include <numeric>

#include "arcfit/simkit.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace arcfit;
using arcfit::testing::four_stage_refined;
using arcfit::testing::make_stage;
using arcfit::testing::reference_cell;

namespace {

ReactionSystem inert() {
  auto sys = four_stage_refined();
  for (auto& s : sys.stages) s.enthalpy = 0.0;
  return sys;
}

// Small-step RK4 on the adiabatic system until T first reaches T_hit; linear in-step interpolation.
double rk4_time_to(const ReactionSystem& sys, double T0, double T_hit, double dt) {
  std::vector<double> y = initial_state(sys, T0).flatten();
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  const AmbientModel amb = Adiabatic{};
  for (double t = 0.0;; t += dt) {
    const double T_prev = y.back();
    system_rhs(sys, y, amb, t, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    system_rhs(sys, tmp, amb, t, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    system_rhs(sys, tmp, amb, t, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    system_rhs(sys, tmp, amb, t, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (y.back() >= T_hit) return t + dt * (T_hit - T_prev) / (y.back() - T_prev);
  }
}

double first_time_at(const Trajectory& tr, double T_hit) {
  for (std::size_t i = 1; i < tr.size(); ++i) {
    if (tr.temperature(i) < T_hit) continue;
    double a = tr.time(i - 1), b = tr.time(i);
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (a + b);
      (tr.sample(mid).back() >= T_hit ? b : a) = mid;
    }
    return b;
  }
  return -1.0;
}

}  // namespace

TEST_CASE("exotherm of a completed system stays at T0") {
  ReactionSystem sys{{make_stage(1e11, 1.9e-19, 3000.0, 0.0, 1.0, 0.0),
                      make_stage(2e7, 1.5e-19, 9000.0, 4.0, 0.0, 1.0)},
                     reference_cell()};
  const auto tr = simulate_exotherm(sys, 480.0, 5000.0);
  for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.temperature(i) == 480.0);
}

TEST_CASE("four-stage exotherm: completion, energy and runaway time") {
  const auto sys = four_stage_refined();
  const double T0 = 397.15;
  const auto tr = simulate_exotherm(sys, T0, 1e5);
  const auto last = tr.thermal_state(tr.size() - 1);
  double heat = 0.0;
  for (std::size_t i = 0; i < sys.stage_count(); ++i)
    heat += sys.stages[i].enthalpy * std::abs(last.concentrations[i] - sys.stages[i].c0);
  const double C = sys.cell.heat_capacity();
  CHECK(C * (last.temperature - T0) == doctest::Approx(heat).epsilon(1e-6));

  // (1-c)^m with m > 1 approaches completion algebraically, so the converting stages keep a
  // small remainder; the rise still falls within 2% of full conversion
  double full = 0.0;
  for (const auto& s : sys.stages) full += s.enthalpy * std::abs(s.completed_value() - s.c0);
  CHECK(last.temperature <= T0 + full / C);
  CHECK(last.temperature - T0 >= 0.98 * full / C);

  const double t_ref = rk4_time_to(sys, T0, 500.0, 0.005);
  const double t_sim = first_time_at(tr, 500.0);
  MESSAGE("time to 500 K: ", t_sim, " s, RK4 ", t_ref, " s");
  CHECK(t_sim == doctest::Approx(t_ref).epsilon(1e-4));
}

TEST_CASE("near-zero order stage with a hot second stage") {
  // trial stages reach T <= 0 on early steps of this system
  ReactionSystem sys{{make_stage(1.411e5, 1.399e-19, 4362.0, 2.87, 0.01, 0.086),
                      make_stage(2.168e13, 2.242e-19, 11911.0, 0.0, 1.01, 1.0)},
                     reference_cell()};
  const auto tr = simulate_exotherm(sys, 404.7, 5e4);
  const auto last = tr.thermal_state(tr.size() - 1);
  double heat = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    heat += sys.stages[i].enthalpy * std::abs(last.concentrations[i] - sys.stages[i].c0);
  CHECK(sys.cell.heat_capacity() * (last.temperature - 404.7) == doctest::Approx(heat).epsilon(1e-6));
}

TEST_CASE("completion event stops a first-order exotherm") {
  ReactionSystem sys{{make_stage(1e11, 1.9e-19, 3000.0, 0.0, 1.0, 1.0)}, reference_cell()};
  const auto tr = simulate_exotherm(sys, 480.0, 1e6);
  REQUIRE(tr.event);
  CHECK(tr.t_end() < 1e6);
  CHECK(tr.state(tr.size() - 1)[0] == doctest::Approx(kCompletionTolerance).epsilon(1e-6));
}

TEST_CASE("adiabatic temperature is monotone for non-negative enthalpies") {
  const auto tr = simulate_exotherm(arcfit::testing::two_stage_refined(), 397.15, 1e5);
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.temperature(i) >= tr.temperature(i - 1));
}

TEST_CASE("heat-wait-seek of an inert system is a staircase") {
  HwsProtocol p;
  const double t_end = 5 * 3000.0 + 4 * 150.0;
  const auto res = simulate_hws(inert(), p, t_end);
  CHECK_FALSE(res.exotherm_time);
  REQUIRE(res.phases.size() == res.trajectory.size());
  double plateau = p.start_temperature;
  int plateaus = 0;
  for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
    const double T = res.trajectory.temperature(i);
    if (res.phases[i] == HwsPhase::Heat) {
      CHECK(T >= plateau - 1e-9);
      CHECK(T <= plateau + p.step_increment + 1e-6);
      continue;
    }
    CHECK(res.phases[i] != HwsPhase::Exotherm);
    if (i > 0 && res.phases[i - 1] == HwsPhase::Heat) {
      plateau += p.step_increment;
      ++plateaus;
    }
    CHECK(T == doctest::Approx(plateau).epsilon(1e-8));
  }
  CHECK(plateaus >= 4);
  for (std::size_t i = 1; i < res.trajectory.size(); ++i)
    CHECK(res.trajectory.time(i) > res.trajectory.time(i - 1));
}

TEST_CASE("zero threshold enters exotherm at the first seek") {
  HwsProtocol p;
  p.exotherm_threshold = 0.0;
  const auto res = simulate_hws(inert(), p, 1e4);
  REQUIRE(res.exotherm_time);
  CHECK(*res.exotherm_time == doctest::Approx(p.wait_duration + p.seek_duration));
  CHECK(*res.exotherm_temperature == doctest::Approx(p.start_temperature));
  // exotherm is entered once and is the last phase
  const auto first = std::find(res.phases.begin(), res.phases.end(), HwsPhase::Exotherm);
  REQUIRE(first != res.phases.end());
  CHECK(std::all_of(first, res.phases.end(), [](HwsPhase ph) { return ph == HwsPhase::Exotherm; }));
}

TEST_CASE("heat-wait-seek detects the four-stage exotherm near the self-heating onset") {
  HwsProtocol p;
  const auto sys = four_stage_refined();
  const auto res = simulate_hws(sys, p, 3e5);
  REQUIRE(res.exotherm_temperature);
  const double onset = self_heating_onset(sys, p.exotherm_threshold);
  MESSAGE("exotherm declared at ", *res.exotherm_temperature, " K, onset ", onset, " K");
  CHECK(std::abs(*res.exotherm_temperature - onset) <= p.step_increment);
}

TEST_CASE("self-heating onset solves the rate equation") {
  const auto sys = four_stage_refined();
  const double rate = 0.02 / 60;
  const double T = self_heating_onset(sys, rate);
  const auto s = initial_state(sys, T);
  auto heating = [&](double temp) {
    auto st = s;
    st.temperature = temp;
    return system_rhs(sys, st, Adiabatic{}, 0.0).temperature;
  };
  CHECK(heating(T) >= rate);
  CHECK(heating(T - 1e-6) < rate);
  CHECK_THROWS_AS(self_heating_onset(sys, 1e9), RangeError);
}

TEST_CASE("oven: inert cell at the oven temperature stays put") {
  const auto res = simulate_oven(inert(), 450.0, 450.0, 5000.0);
  CHECK_FALSE(res.onset_time);
  for (std::size_t i = 0; i < res.trajectory.size(); ++i)
    CHECK(res.trajectory.temperature(i) == doctest::Approx(450.0).epsilon(1e-12));
}

TEST_CASE("oven onset is earlier and the peak hotter in a hotter oven") {
  const auto sys = four_stage_refined();
  double prev_onset = 1e300, prev_peak = 0.0;
  for (double Tc : {160.0, 200.0, 240.0}) {
    const auto r = simulate_oven(sys, Tc + 273.15, 298.15, 2e4);
    REQUIRE(r.onset_time);
    MESSAGE(Tc, " C: onset ", *r.onset_time, " s, peak ", r.peak_temperature, " K");
    CHECK(*r.onset_time < prev_onset);
    CHECK(r.peak_temperature >= prev_peak);
    prev_onset = *r.onset_time;
    prev_peak = r.peak_temperature;
  }
}

TEST_CASE("oven with a very large convection coefficient tracks the oven") {
  auto sys = four_stage_refined();
  sys.cell.conv_coeff = 1e4;
  const double T_oven = 433.15;
  const auto r = simulate_oven(sys, T_oven, 298.15, 5000.0);
  const double stop = r.onset_time.value_or(5000.0);
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    const double t = r.trajectory.time(i);
    if (t >= 30.0 && t <= stop) CHECK(std::abs(r.trajectory.temperature(i) - T_oven) <= 1.0);
  }
}

TEST_CASE("synthetic traces") {
  const auto sys = arcfit::testing::two_stage_refined();
  SynthOptions o;
  o.t_end = 4000.0;
  o.sample_dt = 2.0;

  SUBCASE("noiseless samples lie on the dense trajectory") {
    const auto a = synth_trace(sys, o);
    const auto tr = simulate_exotherm(sys, o.T0, o.t_end);
    REQUIRE(a.size() > 100);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.temperatures[i] == tr.sample(a.times[i]).back());
    CHECK(a.times[1] - a.times[0] == 2.0);
  }
  SUBCASE("noise is seeded") {
    o.noise_std = 0.5;
    o.seed = 42;
    const auto a = synth_trace(sys, o);
    const auto b = synth_trace(sys, o);
    CHECK(a.temperatures == b.temperatures);
    o.seed = 43;
    CHECK(synth_trace(sys, o).temperatures != a.temperatures);

    o.noise_std = 0.0;
    const auto clean = synth_trace(sys, o);
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a.temperatures[i] - clean.temperatures[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / d.size();
    double var = 0.0;
    for (double x : d) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / (d.size() - 1));
    CHECK(std::abs(mean) < 0.05);
    CHECK(sd == doctest::Approx(0.5).epsilon(0.1));

    const auto* src = std::get_if<SyntheticSource>(&a.provenance);
    REQUIRE(src);
    CHECK(src->seed == 42);
    CHECK(std::find(src->generator.begin(), src->generator.end(),
                    std::pair<std::string, std::string>{"noise_std_K", "0.5"}) != src->generator.end());
  }
  SUBCASE("argument checks") {
    o.sample_dt = 0.0;
    CHECK_THROWS_AS(synth_trace(sys, o), InvalidInput);
    o.sample_dt = 1.0;
    o.noise_std = -1.0;
    CHECK_THROWS_AS(synth_trace(sys, o), InvalidInput);
  }
}

TEST_CASE("radial model construction") {
  const auto cell = reference_cell();
  const auto m = RadialModel::cylindrical_cell(cell);
  CHECK(m.node_count() == 42);
  const double jr = cell.heat_capacity();
  const double can = 7917.0 * 460.0 * std::numbers::pi * (0.0105 * 0.0105 - 0.01025 * 0.01025) * 0.07;
  CHECK(m.heat_capacity() == doctest::Approx(jr + can).epsilon(1e-12));
  CHECK(m.source_volume() == doctest::Approx(std::numbers::pi * 0.01025 * 0.01025 * 0.07).epsilon(1e-12));
  CHECK(2 * std::numbers::pi * m.outer_radius() * m.height == doctest::Approx(cell.surface_area).epsilon(1e-3));
  CHECK(m.refined(2).node_count() == 84);

  auto bad = m;
  bad.regions[1].outer_radius = 0.01;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = m;
  bad.regions[0].material.conductivity = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = m;
  bad.regions[0].source = false;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("radial: uniform field at the oven temperature without a source stays uniform") {
  const auto m = RadialModel::cylindrical_cell(reference_cell());
  RadialOptions o;
  o.reactions = false;
  const auto r = simulate_radial(m, four_stage_refined(), 400.0, 400.0, 1000.0, o);
  for (const auto& row : r.temperatures)
    for (double T : row) CHECK(T == doctest::Approx(400.0).epsilon(1e-12));
}

TEST_CASE("radial: fixed outer temperature relaxes to a uniform field with a closed energy audit") {
  auto m = RadialModel::cylindrical_cell(reference_cell());
  m.conv_coeff = 1e6;
  m.emissivity = 0.0;
  RadialOptions o;
  o.reactions = false;
  o.output_every = 100.0;
  const auto r = simulate_radial(m, four_stage_refined(), 450.0, 300.0, 2e4, o);
  for (double T : r.temperatures.back()) CHECK(T == doctest::Approx(450.0).epsilon(1e-6));
  CHECK(r.source_energy == 0.0);
  CHECK(r.stored_energy_change == doctest::Approx(m.heat_capacity() * 150.0).epsilon(1e-6));
  CHECK(r.energy_residual() <= 1e-2);
  // the core lags the surface while heating
  CHECK(r.temperatures[1].front() < r.temperatures[1].back());
}

TEST_CASE("radial: energy audit with reactions and grid refinement") {
  const auto sys = four_stage_refined();
  const auto base = RadialModel::cylindrical_cell(reference_cell(), 0.3, 10, 1);
  RadialOptions o;
  o.output_every = 5.0;
  std::vector<double> peaks;
  for (std::size_t f : {2u, 4u, 8u}) {
    const auto r = simulate_radial(base.refined(f), sys, 473.15, 298.15, 1500.0, o);
    CHECK(r.energy_residual() <= 1e-2);
    CHECK(r.source_energy > 0.0);
    peaks.push_back(r.peak_temperature());
  }
  MESSAGE("peaks at 22/44/88 nodes: ", peaks[0], " ", peaks[1], " ", peaks[2]);
  CHECK(std::abs(peaks[2] - peaks[1]) < std::abs(peaks[1] - peaks[0]));
}

TEST_CASE("radial mean approaches the lumped oven model for a well-conducting jellyroll") {
  const auto sys = four_stage_refined();
  const auto m = RadialModel::cylindrical_cell(reference_cell(), 100.0, 20, 1);
  auto lumped = sys;
  lumped.cell.mass = m.heat_capacity() / sys.cell.specific_heat;
  const double T_oven = 473.15;
  const auto lo = simulate_oven(lumped, T_oven, 298.15, 3000.0);
  REQUIRE(lo.onset_time);
  RadialOptions o;
  o.output_every = 5.0;
  const auto r = simulate_radial(m, sys, T_oven, 298.15, *lo.onset_time, o);
  double worst = 0.0;
  for (std::size_t k = 0; k < r.times.size(); ++k)
    worst = std::max(worst, std::abs(r.mean_temperature[k] - lo.trajectory.sample(r.times[k]).back()));
  CHECK(worst <= 0.5);
}

TEST_CASE("invalid simulation arguments") {
  const auto sys = four_stage_refined();
  HwsProtocol p;
  p.step_increment = 0.0;
  CHECK_THROWS_AS(simulate_hws(sys, p, 100.0), InvalidInput);
  CHECK_THROWS_AS(simulate_oven(sys, -1.0, 300.0, 100.0), InvalidInput);
  const auto m = RadialModel::cylindrical_cell(reference_cell());
  RadialOptions o;
  o.dt = 0.0;
  CHECK_THROWS_AS(simulate_radial(m, sys, 400.0, 300.0, 10.0, o), InvalidInput);
}
