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
#include <limits>
#include <random>

#include "arcfit/sensitivity.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace arcfit;
using arcfit::testing::truth_trace;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-8); }

// exp(log(x)) is exact up to the rounding of log(x), amplified by |log(x)|
double ulps(double x) { return 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(std::log(x))); }

ArcTrace samples_of(const Trajectory& tr, double dt, double offset = 0.0) {
  ArcTrace a;
  for (double t = tr.t_begin(); t <= tr.t_end(); t += dt) {
    a.times.push_back(t);
    a.temperatures.push_back(tr.sample(t).back() + offset);
  }
  return a;
}

}  // namespace

TEST_CASE("parameter vector layout and default mask") {
  const auto sys = arcfit::testing::two_stage_linearized();
  const ParamVector p(sys.stages);
  CHECK(p.size() == 10);
  CHECK(p.stage_count() == 2);
  CHECK(p.values[ParamVector::offset(0, ParamKind::LogA)] == std::log(2.1755e11));
  CHECK(p.values[ParamVector::offset(1, ParamKind::OrderM)] == 5.0);
  std::vector<std::string> labels;
  for (auto i : p.trainable_indices()) labels.push_back(p.label(i));
  CHECK(labels == std::vector<std::string>{"lnA_1", "lnEa_1", "lnh_1", "lnA_2", "lnEa_2", "lnh_2", "m_2"});
}

TEST_CASE("parameter transform round trip") {
  const auto sys = arcfit::testing::four_stage_refined();
  const ParamVector p(sys.stages);
  const auto stages = p.to_stages(sys.stages);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    CHECK(rel_err(stages[i].freq_factor, sys.stages[i].freq_factor) <= ulps(sys.stages[i].freq_factor));
    CHECK(rel_err(stages[i].activation_energy, sys.stages[i].activation_energy) <= ulps(sys.stages[i].activation_energy));
    CHECK(rel_err(stages[i].enthalpy, sys.stages[i].enthalpy) <= ulps(sys.stages[i].enthalpy));
    CHECK(stages[i].order_m == sys.stages[i].order_m);
    CHECK(stages[i].order_n == sys.stages[i].order_n);
    CHECK(stages[i].c0 == sys.stages[i].c0);
    CHECK(stages[i].direction == sys.stages[i].direction);
  }
  const ParamVector q(stages, p.mask);
  for (std::size_t i = 0; i < p.size(); ++i)
    CHECK(std::abs(q.values[i] - p.values[i]) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(p.values[i]));
}

TEST_CASE("parameter vector rejects bad shapes") {
  const auto sys = arcfit::testing::two_stage_linearized();
  ParamVector p(sys.stages);
  CHECK_THROWS_AS(p.to_stages(arcfit::testing::four_stage_linearized().stages), InvalidInput);
  p.values[2] = NAN;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  CHECK_THROWS_AS(ParamVector(sys.stages, std::vector<std::uint8_t>(3, 1)), InvalidInput);
  auto zero_h = sys.stages;
  zero_h[0].enthalpy = 0.0;
  CHECK_THROWS_AS(ParamVector{zero_h}, InvalidInput);
}

TEST_CASE("parameter jacobian matches finite differences of the right-hand side") {
  const auto sys = arcfit::testing::four_stage_refined();
  ParamVector p(sys.stages);
  for (std::size_t k = 0; k < 4; ++k) p.set_trainable(k, ParamKind::OrderN, true);
  const SensitivityOde ode(sys, Oven{450.0}, p);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uc(0.05, 0.95), uT(420.0, 520.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y{uc(rng), uc(rng), uc(rng), uc(rng), uT(rng)};
    Eigen::MatrixXd jp;
    ode.parameter_jacobian(0.0, y, jp);
    std::vector<double> f0(5);
    system_rhs(sys, y, Oven{450.0}, 0.0, f0);
    const auto cols = p.trainable_indices();
    for (std::size_t jj = 0; jj < cols.size(); ++jj) {
      const std::size_t j = cols[jj];
      const double h = 1e-6;
      ParamVector a = p, b = p;
      a.values[j] += h;
      b.values[j] -= h;
      std::vector<double> fa(5), fb(5);
      system_rhs(a.apply(sys), y, Oven{450.0}, 0.0, fa);
      system_rhs(b.apply(sys), y, Oven{450.0}, 0.0, fb);
      for (std::size_t i = 0; i < 5; ++i) {
        const double fd = (fa[i] - fb[i]) / (2.0 * h);
        INFO("param ", p.label(j), " row ", i);
        // rounding noise of the difference quotient grows with |f|
        const double noise = 1e-9 * std::abs(f0[i]) + 1e-14;
        CHECK(std::abs(jp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)) - fd) <=
              1e-6 * std::abs(fd) + noise);
      }
    }
  }
}

TEST_CASE("trajectory loss") {
  const auto sys = arcfit::testing::two_stage_refined();
  const auto tr = integrate(sys, Adiabatic{}, initial_state(sys, 397.15), 0.0, 3000.0,
                            Tolerances::for_thermal(2));
  CHECK(trajectory_loss(tr, samples_of(tr, 7.0)) == 0.0);
  CHECK(trajectory_loss(tr, samples_of(tr, 7.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trajectory_rmse(tr, samples_of(tr, 7.0, -2.0)) == doctest::Approx(2.0).epsilon(1e-12));

  auto beyond = samples_of(tr, 7.0);
  beyond.times.push_back(3100.0);
  beyond.temperatures.push_back(500.0);
  CHECK_THROWS_AS(trajectory_loss(tr, beyond), RangeError);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 3.0);
  for (int k = 0; k < 10; ++k) {
    auto d = samples_of(tr, 11.0);
    for (double& T : d.temperatures) T += noise(rng);
    CHECK(trajectory_loss(tr, d) > 0.0);
  }
}

TEST_CASE("refined parameters fit their own synthetic truth better than the linearized ones") {
  const auto truth = truth_trace(arcfit::testing::two_stage_refined());
  const double linear = evaluate_loss(arcfit::testing::two_stage_linearized(), truth);
  const double refined = evaluate_loss(arcfit::testing::two_stage_refined(), truth);
  MESSAGE("linear ", linear, " refined ", refined);
  // refined residual is integrator error only
  CHECK(refined < 1e-2);
  CHECK(linear > refined);
}

TEST_CASE("fully masked parameters give a zero gradient but report the loss") {
  const auto sys = arcfit::testing::two_stage_linearized();
  const auto truth = truth_trace(arcfit::testing::two_stage_refined());
  const ParamVector p(sys.stages, std::vector<std::uint8_t>(10, 0));
  const auto rep = grad_loss(sys, truth, p);
  CHECK(rep.gradient == std::vector<double>(10, 0.0));
  CHECK(rep.loss == doctest::Approx(evaluate_loss(sys, truth)).epsilon(1e-6));
  CHECK(rep.n_timesteps == truth.size());
}

TEST_CASE("log-enthalpy gradient at adiabatic completion matches the closed form") {
  ReactionSystem sys{{arcfit::testing::make_stage(1e10, 1.5e-19, 2000.0, 0.0, 1.0, 1.0)},
                     arcfit::testing::reference_cell()};
  const double T0 = 450.0;
  const double C = sys.cell.heat_capacity();
  // loss = (T_f - T0)^2 / 2 with T_f = T0 + h/C, so d/d(ln h) = (h/C)^2
  ArcTrace data;
  data.times = {0.0, 1000.0};
  data.temperatures = {T0, T0};
  ParamVector p(sys.stages);
  LossSettings ls;
  ls.tol = Tolerances::for_thermal(1, 1e-10, 1e-13, 1e-10);
  const auto rep = grad_loss(sys, data, p, ls);
  const double dT = 2000.0 / C;
  CHECK(rep.loss == doctest::Approx(dT * dT / 2.0).epsilon(1e-8));
  CHECK(rep.gradient[ParamVector::offset(0, ParamKind::LogH)] == doctest::Approx(dT * dT).epsilon(1e-6));
  // completion makes the end state insensitive to the kinetics
  CHECK(std::abs(rep.gradient[ParamVector::offset(0, ParamKind::LogA)]) < 1e-6 * dT * dT);
}

TEST_CASE("forward-sensitivity gradient matches finite differences on the two-stage fixture") {
  const auto sys = arcfit::testing::two_stage_linearized();
  const auto truth = truth_trace(arcfit::testing::two_stage_refined());
  const ParamVector p(sys.stages);
  LossSettings ls;
  ls.tol = Tolerances::for_thermal(2, 1e-8, 1e-11, 1e-8);
  const auto rep = grad_loss(sys, truth, p, ls);
  const auto fd = fd_gradient(sys, truth, p, 1e-5);
  for (auto i : p.trainable_indices()) {
    INFO(p.label(i), " ad ", rep.gradient[i], " fd ", fd[i]);
    CHECK(rel_err(rep.gradient[i], fd[i]) <= 1e-4);
  }
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!p.trainable(i)) CHECK(fd[i] == 0.0);
}

TEST_CASE("gradient evaluation is deterministic") {
  const auto sys = arcfit::testing::two_stage_linearized();
  const auto truth = truth_trace(arcfit::testing::two_stage_refined());
  const ParamVector p(sys.stages);
  const auto a = grad_loss(sys, truth, p);
  const auto b = grad_loss(sys, truth, p);
  CHECK(a.loss == b.loss);
  CHECK(a.gradient == b.gradient);
}

TEST_CASE("integration failures name the parameter set") {
  const auto sys = arcfit::testing::two_stage_linearized();
  const auto truth = truth_trace(arcfit::testing::two_stage_refined());
  LossSettings ls;
  ls.integrate.max_steps = 5;
  try {
    grad_loss(sys, truth, ParamVector(sys.stages), ls);
    FAIL("expected StiffnessFailure");
  } catch (const StiffnessFailure& e) {
    CHECK(std::string(e.what()).find("lnA_1=") != std::string::npos);
  }
}

TEST_CASE("generic finite differences") {
  const auto sq = [](std::span<const double> x) { return x[0] * x[0]; };
  const std::vector<double> x{3.0};
  const std::vector<std::uint8_t> on{1};
  for (double h : {1e-7, 1e-4, 1e-2})
    CHECK(fd_gradient(sq, x, on, h)[0] == doctest::Approx(6.0).epsilon(1e-9));

  const auto sym = [](std::span<const double> x) { return std::cos(x[0]) + x[1] * x[1] * x[1]; };
  const std::vector<double> x2{0.0, 2.0};
  const std::vector<std::uint8_t> mask{1, 0};
  const auto g = fd_gradient(sym, x2, mask, 1e-3);
  CHECK(std::abs(g[0]) < 1e-12);
  CHECK(g[1] == 0.0);

  CHECK_THROWS_AS(fd_gradient(sq, x, on, 1e-9), InvalidInput);
  CHECK_THROWS_AS(fd_gradient(sq, x, on, 0.1), InvalidInput);
}
