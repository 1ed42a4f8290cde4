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
#include <random>

#include "arcfit/linfit.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace arcfit;

namespace {

ArcTrace from_function(double t0, double t1, double dt, double (*f)(double)) {
  ArcTrace a;
  for (std::size_t k = 0; t0 + k * dt <= t1; ++k) {
    a.times.push_back(t0 + k * dt);
    a.temperatures.push_back(f(t0 + k * dt));
  }
  return a;
}

std::vector<StageOrders> orders_of(const ReactionSystem& sys) {
  std::vector<StageOrders> o;
  for (const auto& s : sys.stages) o.push_back({s.order_m, s.order_n, s.c0, s.direction});
  return o;
}

}  // namespace

TEST_CASE("rate estimate on affine and constant records") {
  const auto lin = from_function(0.0, 100.0, 1.0, [](double t) { return 300.0 + 2.0 * t; });
  for (std::size_t w : {3u, 5u, 11u, 21u}) {
    const auto r = estimate_rate(lin, w);
    REQUIRE(r.rates);
    for (double v : *r.rates) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
  }
  const auto flat = estimate_rate(from_function(0.0, 50.0, 0.5, [](double) { return 350.0; }));
  for (double v : *flat.rates) CHECK(v == 0.0);

  // uneven spacing is still exact on affine data
  ArcTrace uneven;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> gap(0.2, 3.0);
  double t = 0.0;
  for (int k = 0; k < 60; ++k, t += gap(rng)) {
    uneven.times.push_back(t);
    uneven.temperatures.push_back(400.0 - 0.25 * t);
  }
  const auto ur = estimate_rate(uneven, 7);
  for (double v : *ur.rates) CHECK(v == doctest::Approx(-0.25).epsilon(1e-10));
}

TEST_CASE("rate estimate on an exponential record") {
  const auto e = estimate_rate(from_function(0.0, 2000.0, 1.0, [](double t) { return 300.0 * std::exp(1e-3 * t); }));
  const double expected = 0.3 * std::exp(1.0);
  CHECK(std::abs((*e.rates)[1000] / expected - 1.0) < 5e-3);
}

TEST_CASE("rate estimate argument checks") {
  const auto lin = from_function(0.0, 8.0, 1.0, [](double t) { return 300.0 + t; });
  CHECK_THROWS_AS(estimate_rate(lin, 4), InvalidInput);
  CHECK_THROWS_AS(estimate_rate(lin, 1), InvalidInput);
  CHECK_THROWS_AS(estimate_rate(lin, 11), InvalidInput);
  CHECK_NOTHROW(estimate_rate(lin, 9));
}

TEST_CASE("partition with a single stage returns the windowed record") {
  const auto tr = from_function(0.0, 100.0, 1.0, [](double t) { return 300.0 + t; });
  const auto segs = partition(tr, StagePartition{{300.0, 400.0}});
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].times == tr.times);
  CHECK(segs[0].temperatures == tr.temperatures);
}

TEST_CASE("boundary samples belong to the higher stage") {
  const auto tr = from_function(0.0, 10.0, 1.0, [](double t) { return 300.0 + t; });
  const auto segs = partition(tr, StagePartition{{300.0, 305.0, 310.0}});
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].temperatures.back() == 304.0);
  CHECK(segs[1].temperatures.front() == 305.0);
  // last segment is right-closed
  CHECK(segs[1].temperatures.back() == 310.0);
}

TEST_CASE("segments are disjoint and cover the window") {
  const auto tr = arcfit::testing::truth_trace(arcfit::testing::four_stage_refined(), 397.15, 790.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(400.0, 780.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> b{u(rng), u(rng), u(rng), u(rng)};
    std::sort(b.begin(), b.end());
    if (b[1] - b[0] < 1e-6 || b[2] - b[1] < 1e-6 || b[3] - b[2] < 1e-6) continue;
    const StagePartition part{b};
    const auto segs = partition(tr, part);
    const auto win = temperature_window(tr, b.front(), b.back());
    std::vector<double> joined;
    for (std::size_t s = 0; s < segs.size(); ++s) {
      for (double T : segs[s].temperatures) {
        CHECK(T >= b[s]);
        if (s + 1 < segs.size()) CHECK(T < b[s + 1]);
        else CHECK(T <= b[s + 1]);
      }
      joined.insert(joined.end(), segs[s].temperatures.begin(), segs[s].temperatures.end());
    }
    CHECK(joined == win.temperatures);
  }
}

TEST_CASE("four-stage boundaries produce four non-empty segments") {
  const auto tr = arcfit::testing::truth_trace(arcfit::testing::four_stage_refined(), 397.15, 790.0);
  const auto segs = partition(tr, StagePartition::from_celsius(arcfit::testing::four_stage_boundaries_C()));
  REQUIRE(segs.size() == 4);
  for (const auto& s : segs) CHECK(!s.empty());
}

TEST_CASE("non-monotone temperature is a staging error naming the sample") {
  auto tr = from_function(0.0, 20.0, 1.0, [](double t) { return 300.0 + t; });
  tr.temperatures[12] = 309.5;
  try {
    partition(tr, StagePartition{{300.0, 320.0}});
    FAIL("expected StagingError");
  } catch (const StagingError& e) {
    CHECK(std::string(e.what()).find("t = 12") != std::string::npos);
  }
  CHECK_NOTHROW(partition(tr, StagePartition{{300.0, 320.0}}, 2.0));
  CHECK_THROWS_AS(partition(tr, StagePartition{{400.0, 420.0}}), StagingError);
  CHECK_THROWS_AS(StagePartition::from_celsius(std::vector<double>{150.0, 120.0}), InvalidInput);
}

TEST_CASE("stage enthalpy") {
  const auto cell = arcfit::testing::reference_cell();
  CHECK(stage_enthalpy(cell, celsius_to_kelvin(124.0), celsius_to_kelvin(167.0)) ==
        doctest::Approx(2437.842).epsilon(1e-9));
  CHECK(stage_enthalpy(cell, 400.0, 400.0) == 0.0);
  auto heavy = cell;
  heavy.mass *= 2.0;
  CHECK(stage_enthalpy(heavy, 400.0, 430.0) == 2.0 * stage_enthalpy(cell, 400.0, 430.0));
  CHECK_THROWS_AS(stage_enthalpy(cell, 430.0, 400.0), InvalidInput);
}

TEST_CASE("linearized fit on exact rates recovers the Arrhenius pair") {
  const double A = 1e10, Ea = 1.9e-19, Ts = 400.0, Te = 450.0;
  ArcTrace seg;
  seg.rates.emplace();
  for (int k = 0; k <= 50; ++k) {
    const double T = Ts + k;
    seg.times.push_back(k);
    seg.temperatures.push_back(T);
    seg.rates->push_back((Te - Ts) * A * std::exp(-Ea / (kBoltzmann * T)));
  }
  const auto fit = linearized_fit(seg, Ts, Te);
  CHECK(fit.freq_factor == doctest::Approx(A).epsilon(1e-9));
  CHECK(fit.activation_energy == doctest::Approx(Ea).epsilon(1e-9));
  CHECK(fit.diagnostics.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.diagnostics.n_points == 51);

  const auto two = linearized_fit(seg.slice(10, 12), Ts, Te);
  CHECK(two.diagnostics.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two.activation_energy == doctest::Approx(Ea).epsilon(1e-9));

  auto bad = seg.slice(0, 4);
  (*bad.rates)[0] = 0.0;
  (*bad.rates)[1] = -1.0;
  (*bad.rates)[2] = -2.0;
  CHECK_THROWS_AS(linearized_fit(bad, Ts, Te), InsufficientData);
  (*bad.rates)[2] = 1e-3;
  const auto partial = linearized_fit(bad, Ts, Te);
  CHECK(partial.diagnostics.n_points == 2);
  CHECK(partial.diagnostics.n_excluded == 2);
  CHECK_THROWS_AS(linearized_fit(from_function(0.0, 3.0, 1.0, [](double t) { return 300.0 + t; }), Ts, Te),
                  InvalidInput);
}

TEST_CASE("initializer is exact for zero-order single-stage records") {
  const auto cell = arcfit::testing::reference_cell();
  const double A = 3e9, Ea = 1.75e-19, Ts = 410.0, Te = 470.0;
  const auto tr = arcfit::testing::zero_order_trace(cell, A, Ea, Ts, Te);
  const std::vector<StageOrders> o{{0.0, 0.0, 1.0, Direction::Consuming}};
  const auto init = initialize(tr, StagePartition{{Ts, Te}}, cell, o);
  const auto& s = init.system.stages[0];
  CHECK(std::abs(s.freq_factor / A - 1.0) < 1e-3);
  CHECK(std::abs(s.activation_energy / Ea - 1.0) < 1e-3);
  CHECK(s.enthalpy == doctest::Approx(cell.heat_capacity() * 60.0).epsilon(1e-12));
  CHECK_FALSE(init.stages[0].substituted);
}

TEST_CASE("time scaling leaves Ea unchanged and divides A") {
  const auto cell = arcfit::testing::reference_cell();
  const auto tr = arcfit::testing::zero_order_trace(cell, 3e9, 1.75e-19, 410.0, 470.0, 0.05);
  const std::vector<StageOrders> o{{0.0, 0.0, 1.0, Direction::Consuming}};
  const StagePartition part{{410.0, 470.0}};
  const auto base = initialize(tr, part, cell, o).system.stages[0];
  for (double k : {0.5, 4.0, 60.0}) {
    auto scaled = tr;
    for (double& t : scaled.times) t *= k;
    const auto s = initialize(scaled, part, cell, o).system.stages[0];
    CHECK(s.activation_energy == doctest::Approx(base.activation_energy).epsilon(1e-10));
    CHECK(s.freq_factor == doctest::Approx(base.freq_factor / k).epsilon(1e-10));

    // precomputed rates divided by k give the same answer
    auto with_rates = estimate_rate(tr);
    for (double& t : with_rates.times) t *= k;
    for (double& r : *with_rates.rates) r /= k;
    const auto s2 = initialize(with_rates, part, cell, o).system.stages[0];
    CHECK(s2.activation_energy == doctest::Approx(base.activation_energy).epsilon(1e-10));
    CHECK(s2.freq_factor == doctest::Approx(base.freq_factor / k).epsilon(1e-10));
  }
}

TEST_CASE("two-stage initializer uses the supplied orders and staged enthalpies") {
  const auto ref = arcfit::testing::two_stage_linearized();
  const auto tr = arcfit::testing::truth_trace(arcfit::testing::two_stage_refined(), 397.15, 790.0);
  const auto part = StagePartition::from_celsius(arcfit::testing::two_stage_boundaries_C());
  const auto init = initialize(tr, part, ref.cell, orders_of(ref));
  REQUIRE(init.system.stage_count() == 2);
  const auto& s = init.system.stages;
  CHECK(s[0].enthalpy == doctest::Approx(2437.842).epsilon(1e-9));
  CHECK(s[1].order_m == 5.0);
  CHECK(s[1].c0 == 0.04);
  CHECK(s[1].direction == Direction::Converting);
  // order-of-magnitude agreement with the published linear row for stage 1
  CHECK(std::abs(std::log10(s[0].freq_factor / 2.1755e11)) < 2.0);
  CHECK(std::abs(s[0].activation_energy / 1.9530e-19 - 1.0) < 0.2);
  CHECK_NOTHROW(init.system.validate());
}

TEST_CASE("four-stage initializer substitutes the degenerate last stage") {
  const auto ref = arcfit::testing::four_stage_linearized();
  const auto tr = arcfit::testing::truth_trace(arcfit::testing::four_stage_refined(), 397.15, 790.0);
  const auto part = StagePartition::from_celsius(arcfit::testing::four_stage_boundaries_C());
  const auto init = initialize(tr, part, ref.cell, orders_of(ref));
  REQUIRE(init.stages.size() == 4);
  CHECK_FALSE(init.stages[0].substituted);
  CHECK_FALSE(init.stages[2].substituted);
  CHECK(init.stages[3].substituted);
  CHECK(init.system.stages[3].freq_factor == init.system.stages[2].freq_factor);
  CHECK(init.system.stages[3].activation_energy == init.system.stages[2].activation_energy);
  CHECK(init.stages[3].note.find("stage 3") != std::string::npos);
}

TEST_CASE("initializer argument checks") {
  const auto ref = arcfit::testing::two_stage_linearized();
  const auto tr = arcfit::testing::truth_trace(arcfit::testing::two_stage_refined(), 397.15, 790.0);
  const auto part = StagePartition::from_celsius(arcfit::testing::two_stage_boundaries_C());
  const std::vector<StageOrders> one{{0.0, 1.0, 1.0, Direction::Consuming}};
  CHECK_THROWS_AS(initialize(tr, part, ref.cell, one), InvalidInput);
  auto o = orders_of(ref);
  o[1].direction = Direction::Consuming;
  CHECK_THROWS_AS(initialize(tr, part, ref.cell, o), InvalidInput);
}
