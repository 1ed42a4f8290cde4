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

#include "arcfit/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "arcfit/kernels/kernels.hpp"

namespace arcfit {

std::string_view to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::LogA: return "lnA";
    case ParamKind::LogEa: return "lnEa";
    case ParamKind::LogH: return "lnh";
    case ParamKind::OrderM: return "m";
    case ParamKind::OrderN: return "n";
  }
  return "?";
}

ParamVector::ParamVector(std::span<const StageKinetics> stages)
    : ParamVector(stages, default_mask(stages)) {}

ParamVector::ParamVector(std::span<const StageKinetics> stages, std::vector<std::uint8_t> m)
    : mask(std::move(m)) {
  values.reserve(stages.size() * kParamsPerStage);
  for (const auto& s : stages) {
    if (!(s.freq_factor > 0.0) || !(s.activation_energy > 0.0) || !(s.enthalpy > 0.0))
      throw InvalidInput("parameter transform needs positive A, Ea and h");
    values.push_back(std::log(s.freq_factor));
    values.push_back(std::log(s.activation_energy));
    values.push_back(std::log(s.enthalpy));
    values.push_back(s.order_m);
    values.push_back(s.order_n);
  }
  validate();
}

std::vector<std::uint8_t> ParamVector::default_mask(std::span<const StageKinetics> stages) {
  std::vector<std::uint8_t> m(stages.size() * kParamsPerStage, 0);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    m[offset(i, ParamKind::LogA)] = 1;
    m[offset(i, ParamKind::LogEa)] = 1;
    m[offset(i, ParamKind::LogH)] = 1;
    if (stages[i].direction == Direction::Converting) m[offset(i, ParamKind::OrderM)] = 1;
  }
  return m;
}

std::vector<std::size_t> ParamVector::trainable_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) idx.push_back(i);
  return idx;
}

std::string ParamVector::label(std::size_t i) const {
  const auto kind = static_cast<ParamKind>(i % kParamsPerStage);
  return std::string(to_string(kind)) + "_" + std::to_string(i / kParamsPerStage + 1);
}

void ParamVector::validate() const {
  if (values.empty() || values.size() % kParamsPerStage != 0)
    throw InvalidInput("parameter vector length must be a positive multiple of " +
                       std::to_string(kParamsPerStage));
  if (mask.size() != values.size())
    throw InvalidInput("parameter mask length does not match parameter vector");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) throw InvalidInput("parameter " + label(i) + " is not finite");
}

std::vector<StageKinetics> ParamVector::to_stages(std::span<const StageKinetics> templ) const {
  if (templ.size() != stage_count())
    throw InvalidInput("parameter vector has " + std::to_string(stage_count()) +
                       " stages, system has " + std::to_string(templ.size()));
  std::vector<StageKinetics> out(templ.begin(), templ.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].freq_factor = std::exp(values[offset(i, ParamKind::LogA)]);
    out[i].activation_energy = std::exp(values[offset(i, ParamKind::LogEa)]);
    out[i].enthalpy = std::exp(values[offset(i, ParamKind::LogH)]);
    out[i].order_m = values[offset(i, ParamKind::OrderM)];
    out[i].order_n = values[offset(i, ParamKind::OrderN)];
  }
  return out;
}

ReactionSystem ParamVector::apply(const ReactionSystem& base) const {
  ReactionSystem sys{to_stages(base.stages), base.cell};
  sys.validate();
  return sys;
}

SensitivityOde::SensitivityOde(ReactionSystem system, AmbientModel ambient,
                               const ParamVector& params)
    : ReactionOde(params.apply(system), std::move(ambient)), columns_(params.trainable_indices()) {}

void SensitivityOde::parameter_jacobian(double, std::span<const double> y,
                                        Eigen::MatrixXd& jac) const {
  const std::size_t n = system_.stage_count();
  jac.setZero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(columns_.size()));
  const double T = y[n];
  const double inv_cap = 1.0 / system_.cell.heat_capacity();
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const std::size_t s = columns_[j] / kParamsPerStage;
    const auto kind = static_cast<ParamKind>(columns_[j] % kParamsPerStage);
    const auto& st = system_.stages[s];
    const auto d = stage_rate_derivatives(st, y[s], T);
    double dr = 0.0;
    switch (kind) {
      case ParamKind::LogA: dr = d.d_log_A; break;
      case ParamKind::LogEa: dr = d.d_log_Ea; break;
      case ParamKind::OrderM: dr = d.d_m; break;
      case ParamKind::OrderN: dr = d.d_n; break;
      case ParamKind::LogH:
        // d(h r)/d(ln h) = h r, concentrations unaffected
        jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) =
            st.enthalpy * d.rate * inv_cap;
        continue;
    }
    jac(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = st.sign() * dr;
    jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = st.enthalpy * dr * inv_cap;
  }
}

Tolerances LossSettings::tolerances_for(std::size_t stage_count) const {
  return tol ? *tol : Tolerances::for_thermal(stage_count);
}

namespace {

void check_coverage(const Trajectory& pred, const ArcTrace& data) {
  if (data.empty()) throw InvalidInput("loss: empty data trace");
  if (pred.empty() || data.times.front() < pred.t_begin() || data.times.back() > pred.t_end()) {
    std::ostringstream os;
    os << "loss: prediction does not cover data range [" << data.times.front() << ", "
       << data.times.back() << "] s";
    if (!pred.empty()) os << " (prediction spans [" << pred.t_begin() << ", " << pred.t_end() << "])";
    throw RangeError(os.str());
  }
}

std::string describe(const ParamVector& params) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < params.size(); ++i)
    os << (i ? ", " : "") << params.label(i) << "=" << params.values[i];
  return os.str();
}

ThermalState start_state(const ReactionSystem& system, const ArcTrace& data,
                         const LossSettings& settings) {
  if (data.empty()) throw InvalidInput("loss: empty data trace");
  return initial_state(system, settings.initial_temperature.value_or(data.temperatures.front()));
}

}  // namespace

double trajectory_loss(const Trajectory& pred, const ArcTrace& data) {
  check_coverage(pred, data);
  std::vector<double> predicted(data.size());
  std::vector<double> y(pred.dimension());
  for (std::size_t j = 0; j < data.size(); ++j) {
    pred.sample(data.times[j], y);
    predicted[j] = y.back();
  }
  return kernels::sum_squared_diff(predicted, data.temperatures) / static_cast<double>(data.size());
}

double trajectory_rmse(const Trajectory& pred, const ArcTrace& data) {
  return std::sqrt(trajectory_loss(pred, data));
}

Trajectory predict(const ReactionSystem& system, const ArcTrace& data,
                   const LossSettings& settings) {
  const auto y0 = start_state(system, data, settings);
  return integrate(system, settings.ambient, y0, data.times.front(), data.times.back(),
                   settings.tolerances_for(system.stage_count()), {}, settings.integrate);
}

double evaluate_loss(const ReactionSystem& system, const ArcTrace& data,
                     const LossSettings& settings) {
  return trajectory_loss(predict(system, data, settings), data);
}

LossReport grad_loss(const ReactionSystem& system, const ArcTrace& data, const ParamVector& params,
                     const LossSettings& settings) {
  params.validate();
  const SensitivityOde ode(system, settings.ambient, params);
  const auto y0 = start_state(ode.system(), data, settings).flatten();
  const auto tol = settings.tolerances_for(system.stage_count());

  Trajectory traj;
  try {
    traj = integrate(ode, y0, data.times.front(), data.times.back(), tol, {}, settings.integrate);
  } catch (const StiffnessFailure& e) {
    throw StiffnessFailure(std::string(e.what()) + " [parameters: " + describe(params) + "]",
                           e.partial());
  } catch (const SingularSystem& e) {
    throw SingularSystem(std::string(e.what()) + " [parameters: " + describe(params) + "]");
  }
  check_coverage(traj, data);

  const std::size_t dim = traj.dimension();
  const std::size_t P = ode.parameter_count();
  const std::size_t N = data.size();
  std::vector<double> y(dim), s(dim * P), grad_cols(P, 0.0);
  double sq = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    traj.sample(data.times[j], y);
    const double r = y.back() - data.temperatures[j];
    sq += r * r;
    if (P == 0) continue;
    traj.sample_sensitivity(data.times[j], s);
    // dT/dp row is the last state component
    kernels::axpy(r, std::span<const double>(s).subspan((dim - 1) * P, P), grad_cols);
  }

  LossReport report;
  report.loss = sq / static_cast<double>(N);
  report.n_timesteps = N;
  report.stats = traj.stats;
  report.gradient.assign(params.size(), 0.0);
  for (std::size_t j = 0; j < P; ++j)
    report.gradient[ode.columns()[j]] = 2.0 * grad_cols[j] / static_cast<double>(N);
  return report;
}

namespace {

// Ridders' extrapolation of central differences along one coordinate, starting from step h0.
double ridders(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
               std::size_t i, double h0) {
  constexpr int kTab = 10;
  constexpr double kCon = 1.4, kCon2 = kCon * kCon, kSafe = 2.0;
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  auto central = [&](double h) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    return (f(xp) - f(xm)) / (xp[i] - xm[i]);
  };
  double a[kTab][kTab];
  double h = h0;
  a[0][0] = central(h);
  double best = a[0][0];
  double err = std::numeric_limits<double>::infinity();
  for (int k = 1; k < kTab; ++k) {
    h /= kCon;
    a[0][k] = central(h);
    double fac = kCon2;
    for (int j = 1; j <= k; ++j) {
      a[j][k] = (a[j - 1][k] * fac - a[j - 1][k - 1]) / (fac - 1.0);
      fac *= kCon2;
      const double e = std::max(std::abs(a[j][k] - a[j - 1][k]), std::abs(a[j][k] - a[j - 1][k - 1]));
      if (e <= err) {
        err = e;
        best = a[j][k];
      }
    }
    if (std::abs(a[k][k] - a[k - 1][k - 1]) >= kSafe * err) break;
  }
  return best;
}

std::vector<double> fd_steps(std::span<const double> x, std::span<const std::uint8_t> mask,
                             double h_rel, const std::vector<double>& h0) {
  if (!(h_rel >= 1e-7 && h_rel <= 1e-2))
    throw InvalidInput("fd_gradient: h_rel must lie in [1e-7, 1e-2]");
  if (mask.size() != x.size() || h0.size() != x.size())
    throw InvalidInput("fd_gradient: mask length mismatch");
  return h0;
}

std::vector<double> run_fd(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> x, std::span<const std::uint8_t> mask,
                           const std::vector<double>& h0) {
  std::vector<double> grad(x.size(), 0.0);
  std::vector<std::future<double>> jobs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (mask[i]) jobs[i] = std::async(std::launch::async, [&f, x, i, h = h0[i]] { return ridders(f, x, i, h); });
  for (std::size_t i = 0; i < x.size(); ++i)
    if (mask[i]) grad[i] = jobs[i].get();
  return grad;
}

}  // namespace

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x, std::span<const std::uint8_t> mask,
                                double h_rel) {
  std::vector<double> h0(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) h0[i] = h_rel * std::max(std::abs(x[i]), 1.0);
  return run_fd(f, x, mask, fd_steps(x, mask, h_rel, h0));
}

std::vector<double> fd_gradient(const ReactionSystem& system, const ArcTrace& data,
                                const ParamVector& params, double h_rel,
                                const LossSettings& settings) {
  params.validate();
  LossSettings tight = settings;
  const auto tol = settings.tolerances_for(system.stage_count());
  tight.tol = tol.rtol > 1e-12 ? tol.scaled(1e-12 / tol.rtol) : tol;
  auto f = [&](std::span<const double> v) {
    ParamVector p = params;
    p.values.assign(v.begin(), v.end());
    return evaluate_loss(p.apply(system), data, tight);
  };
  // log-space entries step by h_rel itself, a relative change of the underlying quantity;
  // reaction orders have weak gradients and need a longer reach above the integration noise
  std::vector<double> h0(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto kind = static_cast<ParamKind>(i % kParamsPerStage);
    const bool log_space = kind == ParamKind::LogA || kind == ParamKind::LogEa || kind == ParamKind::LogH;
    h0[i] = log_space ? h_rel : 10.0 * h_rel * std::max(std::abs(params.values[i]), 1.0);
  }
  return run_fd(f, params.values, params.mask, fd_steps(params.values, params.mask, h_rel, h0));
}

}  // namespace arcfit
