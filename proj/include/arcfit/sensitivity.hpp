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
#include <string_view>
#include <vector>

#include "arcfit/kinetics.hpp"
#include "arcfit/ode.hpp"
#include "arcfit/trace.hpp"

namespace arcfit {

/// Per-stage slots of a ParamVector. A, Ea and h live in log space.
enum class ParamKind : std::uint8_t { LogA = 0, LogEa = 1, LogH = 2, OrderM = 3, OrderN = 4 };
inline constexpr std::size_t kParamsPerStage = 5;

std::string_view to_string(ParamKind kind);

class ParamVector {
 public:
  ParamVector() = default;
  /// Mask defaults to default_mask(stages).
  explicit ParamVector(std::span<const StageKinetics> stages);
  ParamVector(std::span<const StageKinetics> stages, std::vector<std::uint8_t> mask);

  /// A, Ea, h of every stage plus m of converting stages.
  static std::vector<std::uint8_t> default_mask(std::span<const StageKinetics> stages);
  static constexpr std::size_t offset(std::size_t stage, ParamKind kind) {
    return stage * kParamsPerStage + static_cast<std::size_t>(kind);
  }

  std::size_t size() const { return values.size(); }
  std::size_t stage_count() const { return values.size() / kParamsPerStage; }
  bool trainable(std::size_t i) const { return mask[i] != 0; }
  void set_trainable(std::size_t stage, ParamKind kind, bool on) {
    mask.at(offset(stage, kind)) = on ? 1 : 0;
  }
  std::vector<std::size_t> trainable_indices() const;
  /// e.g. "lnA_2" (stages numbered from 1).
  std::string label(std::size_t i) const;

  /// c0 and direction come from the template stages.
  std::vector<StageKinetics> to_stages(std::span<const StageKinetics> templ) const;
  ReactionSystem apply(const ReactionSystem& base) const;
  void validate() const;

  std::vector<double> values;
  std::vector<std::uint8_t> mask;
};

/// Thermal ODE that also propagates dy/dp for the trainable entries of a ParamVector.
class SensitivityOde final : public ReactionOde {
 public:
  SensitivityOde(ReactionSystem system, AmbientModel ambient, const ParamVector& params);
  std::size_t parameter_count() const override { return columns_.size(); }
  void parameter_jacobian(double t, std::span<const double> y, Eigen::MatrixXd& jac) const override;
  /// ParamVector index of each sensitivity column.
  const std::vector<std::size_t>& columns() const { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

struct LossSettings {
  std::optional<Tolerances> tol;  // defaults to Tolerances::for_thermal
  AmbientModel ambient = Adiabatic{};
  /// Defaults to the first data temperature.
  std::optional<double> initial_temperature;
  IntegrateOptions integrate;

  Tolerances tolerances_for(std::size_t stage_count) const;
};

struct LossReport {
  double loss = 0.0;              // K^2
  std::vector<double> gradient;   // same layout as the ParamVector, zero where masked
  std::size_t n_timesteps = 0;
  StepStats stats;
};

/// Mean squared temperature residual over the data timestamps, sampled by dense output.
double trajectory_loss(const Trajectory& pred, const ArcTrace& data);

/// Root of trajectory_loss.
double trajectory_rmse(const Trajectory& pred, const ArcTrace& data);

/// Integrates `system` over the data time span.
Trajectory predict(const ReactionSystem& system, const ArcTrace& data, const LossSettings& settings);

double evaluate_loss(const ReactionSystem& system, const ArcTrace& data,
                     const LossSettings& settings = {});

/// Loss and its gradient with respect to the transformed parameters, via forward sensitivities.
LossReport grad_loss(const ReactionSystem& system, const ArcTrace& data, const ParamVector& params,
                     const LossSettings& settings = {});

/// Central differences of a scalar functional on the unmasked entries of x, refined by
/// Ridders extrapolation from an initial step of h_rel * max(|x_i|, 1).
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x, std::span<const std::uint8_t> mask,
                                double h_rel);

/// Finite-difference oracle for grad_loss. Tolerances are tightened to rtol <= 1e-12.
/// Log-space entries start from an absolute step of h_rel, orders from 10 h_rel max(|x_i|, 1).
std::vector<double> fd_gradient(const ReactionSystem& system, const ArcTrace& data,
                                const ParamVector& params, double h_rel = 1e-5,
                                const LossSettings& settings = {});

}  // namespace arcfit
