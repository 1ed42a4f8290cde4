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
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "arcfit/errors.hpp"
#include "arcfit/kinetics.hpp"

namespace arcfit {

/// Mixed error control: |err_i| <= atol_i + rtol * |y_i|.
struct Tolerances {
  double rtol = 1e-6;
  std::vector<double> atol{1e-9};  // one entry per component, or a single broadcast value

  /// Defaults for a thermal state [c_1 .. c_N, T].
  static Tolerances for_thermal(std::size_t stage_count, double rtol = 1e-6, double atol_c = 1e-9,
                                double atol_T = 1e-6);
  /// Same relative scaling applied to every tolerance.
  Tolerances scaled(double factor) const;
  double atol_at(std::size_t i) const { return atol.size() == 1 ? atol[0] : atol[i]; }
  void validate(std::size_t dimension) const;
};

// Events fire on the first upward crossing after t0; the last state component is the temperature.
struct TemperatureCeiling {
  double temperature;  // K
};
struct RateThreshold {
  double rate;  // K/s
};
struct TimeLimit {
  double time;  // s
};
/// Generic threshold: fires when g(t, y) goes from negative to >= 0.
struct Crossing {
  std::string name;
  std::function<double(double, std::span<const double>)> g;
};
using EventSpec = std::variant<TemperatureCeiling, RateThreshold, TimeLimit, Crossing>;

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t newton_iterations = 0;
  std::size_t newton_failures = 0;
  std::size_t jacobian_evaluations = 0;
  std::size_t rhs_evaluations = 0;
};

struct EventHit {
  std::size_t spec_index = 0;
  double time = 0.0;
};

/// Right-hand side y' = f(t, y) with optional parameter sensitivities.
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;
  virtual std::size_t dimension() const = 0;
  virtual void rhs(double t, std::span<const double> y, std::span<double> dydt) const = 0;
  /// Default: forward differences of rhs().
  virtual void jacobian(double t, std::span<const double> y, Eigen::MatrixXd& jac) const;
  /// Number of parameters P whose sensitivities dy/dp are propagated. Zero disables them.
  virtual std::size_t parameter_count() const { return 0; }
  /// df/dp, dimension x P.
  virtual void parameter_jacobian(double t, std::span<const double> y, Eigen::MatrixXd& jac) const;
};

/// Adapts a plain function to OdeSystem; the Jacobian falls back to finite differences.
class FunctionSystem final : public OdeSystem {
 public:
  using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;
  FunctionSystem(std::size_t dimension, Rhs rhs) : dim_(dimension), rhs_(std::move(rhs)) {}
  std::size_t dimension() const override { return dim_; }
  void rhs(double t, std::span<const double> y, std::span<double> dydt) const override {
    rhs_(t, y, dydt);
  }

 private:
  std::size_t dim_;
  Rhs rhs_;
};

/// The thermal-runaway model as an OdeSystem over [c_1 .. c_N, T].
class ReactionOde : public OdeSystem {
 public:
  ReactionOde(ReactionSystem system, AmbientModel ambient)
      : system_(std::move(system)), ambient_(std::move(ambient)) {}
  std::size_t dimension() const override { return system_.state_dimension(); }
  void rhs(double t, std::span<const double> y, std::span<double> dydt) const override {
    system_rhs(system_, y, ambient_, t, dydt);
  }
  void jacobian(double t, std::span<const double> y, Eigen::MatrixXd& jac) const override {
    system_jacobian(system_, y, ambient_, t, jac);
  }
  const ReactionSystem& system() const { return system_; }
  const AmbientModel& ambient() const { return ambient_; }

 protected:
  ReactionSystem system_;
  AmbientModel ambient_;
};

/// Dense integrator output. Sensitivities are stored row-major per point (component, parameter).
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t dimension, std::size_t parameter_count)
      : dim_(dimension), params_(parameter_count) {}

  std::size_t dimension() const { return dim_; }
  std::size_t parameter_count() const { return params_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  std::span<const double> times() const { return times_; }
  double time(std::size_t i) const { return times_[i]; }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  std::span<const double> state(std::size_t i) const { return {states_.data() + i * dim_, dim_}; }
  std::span<const double> derivative(std::size_t i) const {
    return {derivs_.data() + i * dim_, dim_};
  }
  std::span<const double> sensitivity(std::size_t i) const {
    return {sens_.data() + i * dim_ * params_, dim_ * params_};
  }
  std::span<const double> sensitivity_derivative(std::size_t i) const {
    return {sens_derivs_.data() + i * dim_ * params_, dim_ * params_};
  }
  /// Temperature (last component) at point i.
  double temperature(std::size_t i) const { return states_[i * dim_ + dim_ - 1]; }
  ThermalState thermal_state(std::size_t i) const { return ThermalState::unflatten(state(i)); }

  /// Hermite dense output; throws RangeError outside [t_begin, t_end].
  void sample(double t, std::span<double> y) const;
  void sample_sensitivity(double t, std::span<double> s) const;
  std::vector<double> sample(double t) const;

  StepStats stats;
  std::optional<EventHit> event;

  void append(double t, std::span<const double> y, std::span<const double> f,
              std::span<const double> s = {}, std::span<const double> sf = {});
  void pop_back();

 private:
  std::size_t locate(double t) const;

  std::size_t dim_ = 0;
  std::size_t params_ = 0;
  std::vector<double> times_;
  std::vector<double> states_;
  std::vector<double> derivs_;
  std::vector<double> sens_;
  std::vector<double> sens_derivs_;
};

/// Step limit exhausted or step size driven below the floor by the error test.
class StiffnessFailure : public Error {
 public:
  StiffnessFailure(const std::string& what, Trajectory partial)
      : Error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Newton iteration fails to converge even at the minimum step size.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

struct IntegrateOptions {
  std::size_t max_steps = 1'000'000;
  double min_step = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects automatically
  /// Runs the bare scheme with a constant step and no error control.
  std::optional<double> fixed_step;
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
  /// Include sensitivities in the local error test.
  bool control_sensitivities = true;
};

/// Adaptive 5th-order ESDIRK (Kvaerno 7-stage, stiffly accurate, L-stable, embedded 4th order).
Trajectory integrate(const OdeSystem& system, std::span<const double> y0, double t0, double t1,
                     const Tolerances& tol, const std::vector<EventSpec>& events = {},
                     const IntegrateOptions& options = {});

Trajectory integrate(const ReactionSystem& system, const AmbientModel& ambient,
                     const ThermalState& y0, double t0, double t1, const Tolerances& tol,
                     const std::vector<EventSpec>& events = {},
                     const IntegrateOptions& options = {});

/// Dense output of a thermal trajectory at the given times.
std::vector<ThermalState> sample(const Trajectory& traj, std::span<const double> times);

}  // namespace arcfit
