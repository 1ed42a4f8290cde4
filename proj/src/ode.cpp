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

#include "arcfit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "arcfit/kernels/kernels.hpp"

namespace arcfit {
namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// Kvaerno, "Singly diagonally implicit Runge-Kutta methods with an explicit
// first stage", BIT 44 (2004): the 7-stage ESDIRK of order 5 with an embedded
// order-4 solution. Stiffly accurate; the embedded solution is stage 6.
constexpr int kStages = 7;
constexpr double kGamma = 0.26;
constexpr double kA[kStages][kStages] = {
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.26, 0.26, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.13, 0.84033320996790809, 0.26, 0.0, 0.0, 0.0, 0.0},
    {0.22371961478320505, 0.47675532319799699, -0.06470895363112615, 0.26, 0.0, 0.0, 0.0},
    {0.16648564323248321, 0.10450018841591720, 0.03631482272098715, -0.13090704451073998, 0.26,
     0.0, 0.0},
    {0.13855640231268224, 0.0, -0.04245337201752043, 0.02446657898003141, 0.61943039072480676,
     0.26, 0.0},
    {0.13659751177640291, 0.0, -0.05496908796538376, -0.04118626728321046, 0.62993304899016403,
     0.06962479448202728, 0.26},
};
constexpr double kC[kStages] = {0.0, 0.52, 1.230333209967908, 0.895765984350076,
                                0.436393609858648, 1.0, 1.0};
constexpr int kErrorOrder = 5;  // embedded order + 1
constexpr int kMaxNewton = 10;
constexpr double kNewtonTol = 1e-3;

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool all_finite(const VectorXd& v) { return v.allFinite(); }

class Stepper {
 public:
  Stepper(const OdeSystem& sys, const Tolerances& tol, const IntegrateOptions& opt)
      : sys_(sys), tol_(tol), opt_(opt), n_(sys.dimension()), p_(sys.parameter_count()) {
    for (auto& k : K_) k.resize(static_cast<Eigen::Index>(n_));
    if (p_ > 0) {
      for (auto& sk : SK_) sk.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(p_));
    }
    Y6_.resize(static_cast<Eigen::Index>(n_));
    Y_.resize(static_cast<Eigen::Index>(n_));
    z_.resize(static_cast<Eigen::Index>(n_));
    F_.resize(static_cast<Eigen::Index>(n_));
    weights_.resize(static_cast<Eigen::Index>(n_));
  }

  Trajectory run(std::span<const double> y0, double t0, double t1,
                 const std::vector<EventSpec>& events);

 private:
  void eval(double t, const VectorXd& y, VectorXd& f) {
    ++traj_.stats.rhs_evaluations;
    sys_.rhs(t, {y.data(), n_}, {f.data(), n_});
  }
  void eval_jacobian(double t, const VectorXd& y) {
    ++traj_.stats.jacobian_evaluations;
    sys_.jacobian(t, {y.data(), n_}, J_);
  }
  void factor(double h) {
    const auto n = static_cast<Eigen::Index>(n_);
    lu_.compute(MatrixXd::Identity(n, n) - h * kGamma * J_);
    lu_h_ = h;
  }
  void set_weights(const VectorXd& y) {
    for (std::size_t i = 0; i < n_; ++i) {
      weights_[static_cast<Eigen::Index>(i)] = tol_.atol_at(i) + tol_.rtol * std::abs(y[static_cast<Eigen::Index>(i)]);
    }
  }
  double wrms(const VectorXd& v) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double r = v[i] / weights_[i];
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(v.size()));
  }
  bool solve_stage(int stage, double t, double h);
  bool try_step(double t, double h, double& err);
  double initial_step(double t0, double t1);
  std::optional<double> locate_event(const EventSpec& ev, double t, double h, const VectorXd& y_new,
                                     const VectorXd& f_new);
  double event_value(const EventSpec& ev, double t, std::span<const double> y,
                     std::span<const double> f) const;
  void interpolate(double theta, double h, std::span<double> out) const;

  const OdeSystem& sys_;
  const Tolerances& tol_;
  const IntegrateOptions& opt_;
  std::size_t n_;
  std::size_t p_;
  Trajectory traj_;

  // Current accepted point.
  VectorXd y_, f_;
  MatrixXd S_, SF_;
  bool jac_current_ = false;  // J_ evaluated at the current accepted point

  VectorXd K_[kStages];
  MatrixXd SK_[kStages];
  VectorXd Y_, Y6_, z_, F_, weights_;
  MatrixXd S_new_, S6_, J_, Jp_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  double lu_h_ = 0.0;
};

bool Stepper::solve_stage(int stage, double t, double h) {
  const auto n = static_cast<Eigen::Index>(n_);
  const double tz = t + kC[stage] * h;
  const double hg = h * kGamma;
  z_ = y_;
  for (int j = 0; j < stage; ++j) {
    if (kA[stage][j] != 0.0) {
      kernels::axpy(h * kA[stage][j], {K_[j].data(), n_}, {z_.data(), n_});
    }
  }
  bool refreshed = false;
  while (true) {
    Y_ = z_ + hg * K_[stage - 1];
    if (lu_h_ != h) factor(h);
    bool converged = false;
    double prev = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      ++traj_.stats.newton_iterations;
      eval(tz, Y_, F_);
      if (!all_finite(F_)) break;
      const VectorXd delta = lu_.solve(-(Y_ - z_ - hg * F_));
      Y_ += delta;
      const double dn = wrms(delta);
      if (!std::isfinite(dn)) break;
      if (dn <= kNewtonTol) {
        converged = true;
        break;
      }
      if (it > 0) {
        const double rate = dn / prev;
        if (rate >= 0.9) break;
        if (rate / (1.0 - rate) * dn <= kNewtonTol) {
          converged = true;
          break;
        }
      }
      prev = dn;
    }
    if (converged && all_finite(Y_)) break;
    ++traj_.stats.newton_failures;
    if (refreshed) return false;
    // Refresh the Jacobian at the predictor and retry once.
    VectorXd guess = z_ + hg * K_[stage - 1];
    eval_jacobian(tz, guess);
    factor(h);
    jac_current_ = false;
    refreshed = true;
  }
  K_[stage] = (Y_ - z_) / hg;
  if (stage == 5) Y6_ = Y_;

  if (p_ > 0) {
    // Exact linearisation of the stage equation at the converged stage value.
    eval_jacobian(tz, Y_);
    sys_.parameter_jacobian(tz, {Y_.data(), n_}, Jp_);
    factor(h);
    MatrixXd SZ = S_;
    for (int j = 0; j < stage; ++j) {
      if (kA[stage][j] != 0.0) SZ += (h * kA[stage][j]) * SK_[j];
    }
    const MatrixXd SY = lu_.solve(SZ + hg * Jp_);
    SK_[stage] = J_ * SY + Jp_;
    if (stage == 5) S6_ = SY;
    if (stage == kStages - 1) S_new_ = SY;
  }
  (void)n;
  return true;
}

bool Stepper::try_step(double t, double h, double& err) {
  set_weights(y_);
  K_[0] = f_;
  if (p_ > 0) SK_[0] = SF_;
  if (!jac_current_) {
    eval_jacobian(t, y_);
    jac_current_ = true;
    lu_h_ = 0.0;
  }
  // A trial stage can leave the physical domain (T <= 0) on a too-large step; that is a
  // failed step, not an input error.
  try {
    for (int s = 1; s < kStages; ++s) {
      if (!solve_stage(s, t, h)) return false;
    }
  } catch (const InvalidInput&) {
    ++traj_.stats.newton_failures;
    jac_current_ = false;
    return false;
  }
  set_weights(y_.cwiseAbs().cwiseMax(Y_.cwiseAbs()));
  err = wrms(Y_ - Y6_);
  if (p_ > 0 && opt_.control_sensitivities) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < S_new_.rows(); ++i) {
      for (Eigen::Index j = 0; j < S_new_.cols(); ++j) {
        const double w = tol_.atol_at(static_cast<std::size_t>(i)) +
                         tol_.rtol * std::max(std::abs(S_new_(i, j)), std::abs(S_(i, j)));
        const double r = (S_new_(i, j) - S6_(i, j)) / w;
        s += r * r;
      }
    }
    err = std::max(err, std::sqrt(s / static_cast<double>(S_new_.size())));
  }
  return std::isfinite(err);
}

double Stepper::initial_step(double t0, double t1) {
  const double span = t1 - t0;
  if (opt_.initial_step > 0.0) return std::min(opt_.initial_step, span);
  set_weights(y_);
  const double d0 = wrms(y_);
  const double d1 = wrms(f_);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  VectorXd y1 = y_ + h0 * f_;
  VectorXd f1(static_cast<Eigen::Index>(n_));
  eval(t0 + h0, y1, f1);
  const double d2 = all_finite(f1) ? wrms(f1 - f_) / h0 : 0.0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dmax, 1.0 / kErrorOrder);
  return std::clamp(std::min(100.0 * h0, h1), std::min(opt_.min_step * 10.0, span),
                    std::min(span, opt_.max_step));
}

void Stepper::interpolate(double theta, double h, std::span<double> out) const {
  const std::size_t last = traj_.size() - 1;
  kernels::hermite(theta, h, traj_.state(last), traj_.derivative(last), {Y_.data(), n_},
                   {K_[kStages - 1].data(), n_}, out);
}

double Stepper::event_value(const EventSpec& ev, double t, std::span<const double> y,
                            std::span<const double> f) const {
  return std::visit(
      [&](const auto& e) -> double {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, TemperatureCeiling>) {
          return y.back() - e.temperature;
        } else if constexpr (std::is_same_v<E, RateThreshold>) {
          return f.back() - e.rate;
        } else if constexpr (std::is_same_v<E, TimeLimit>) {
          return t - e.time;
        } else {
          return e.g(t, y);
        }
      },
      ev);
}

std::optional<double> Stepper::locate_event(const EventSpec& ev, double t, double h,
                                            const VectorXd& y_new, const VectorXd& f_new) {
  const std::size_t last = traj_.size() - 1;
  const double g0 = event_value(ev, t, traj_.state(last), traj_.derivative(last));
  const double g1 = event_value(ev, t + h, {y_new.data(), n_}, {f_new.data(), n_});
  if (!(g0 < 0.0 && g1 >= 0.0)) return std::nullopt;
  if (std::holds_alternative<TimeLimit>(ev)) return std::get<TimeLimit>(ev).time;

  std::vector<double> y(n_), f(n_);
  auto g_at = [&](double theta) {
    interpolate(theta, h, y);
    if (std::holds_alternative<RateThreshold>(ev)) {
      ++traj_.stats.rhs_evaluations;
      sys_.rhs(t + theta * h, y, f);
    }
    return event_value(ev, t + theta * h, y, f);
  };
  // Illinois false position on the dense output.
  double a = 0.0, b = 1.0, ga = g0, gb = g1;
  int side = 0;
  for (int it = 0; it < 100 && (b - a) * h > 1e-14 * std::max(1.0, std::abs(t)); ++it) {
    double c = (a * gb - b * ga) / (gb - ga);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double gc = g_at(c);
    if (gc >= 0.0) {
      b = c;
      gb = gc;
      if (side == 1) ga *= 0.5;
      side = 1;
    } else {
      a = c;
      ga = gc;
      if (side == -1) gb *= 0.5;
      side = -1;
    }
    if (gc == 0.0) break;
  }
  return t + b * h;
}

Trajectory Stepper::run(std::span<const double> y0, double t0, double t1,
                        const std::vector<EventSpec>& events) {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto p = static_cast<Eigen::Index>(p_);
  traj_ = Trajectory(n_, p_);
  y_ = Eigen::Map<const VectorXd>(y0.data(), n);
  f_.resize(n);
  eval(t0, y_, f_);
  if (!all_finite(f_)) throw InvalidInput("right-hand side is not finite at the initial state");
  J_.resize(n, n);
  if (p_ > 0) {
    S_ = MatrixXd::Zero(n, p);
    eval_jacobian(t0, y_);
    jac_current_ = true;
    Jp_.resize(n, p);
    sys_.parameter_jacobian(t0, y0, Jp_);
    SF_ = Jp_;  // S(t0) = 0
  }
  auto push = [&](double t, const VectorXd& y, const VectorXd& f, const MatrixXd& S,
                  const MatrixXd& SF) {
    if (p_ == 0) {
      traj_.append(t, {y.data(), n_}, {f.data(), n_});
      return;
    }
    // Store row-major (component, parameter).
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> s = S, sf = SF;
    traj_.append(t, {y.data(), n_}, {f.data(), n_}, {s.data(), n_ * p_}, {sf.data(), n_ * p_});
  };
  push(t0, y_, f_, S_, SF_);

  const bool fixed = opt_.fixed_step.has_value();
  double t = t0;
  double h = fixed ? *opt_.fixed_step : initial_step(t0, t1);
  double err_prev = 1.0;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (t < t1) {
    if (steps >= opt_.max_steps) {
      throw StiffnessFailure("maximum number of steps (" + std::to_string(opt_.max_steps) +
                                 ") exceeded at t = " + num(t),
                             traj_);
    }
    ++steps;
    h = std::min(h, opt_.max_step);
    const bool final_step = t + h >= t1 - 1e-12 * std::max(1.0, std::abs(t1));
    if (final_step) h = t1 - t;

    double err = 0.0;
    const bool ok = try_step(t, h, err);
    if (!ok) {
      ++traj_.stats.rejected;
      if (fixed) throw SingularSystem("Newton iteration failed at t = " + num(t));
      h *= 0.25;
      last_rejected = true;
      if (h < opt_.min_step) {
        throw SingularSystem("Newton iteration failed to converge at step-size floor, t = " +
                             num(t));
      }
      continue;
    }
    if (!fixed && err > 1.0) {
      ++traj_.stats.rejected;
      h *= std::max(opt_.min_factor, opt_.safety * std::pow(err, -1.0 / kErrorOrder));
      last_rejected = true;
      if (h < opt_.min_step) {
        throw StiffnessFailure("step size fell below " + num(opt_.min_step) +
                                   " s at t = " + num(t),
                               traj_);
      }
      continue;
    }

    ++traj_.stats.accepted;
    const double t_new = final_step ? t1 : t + h;
    const VectorXd& y_new = Y_;
    const VectorXd& f_new = K_[kStages - 1];

    // Earliest event inside the step.
    std::optional<std::pair<std::size_t, double>> hit;
    for (std::size_t e = 0; e < events.size(); ++e) {
      if (auto te = locate_event(events[e], t, t_new - t, y_new, f_new)) {
        if (!hit || *te < hit->second) hit = std::make_pair(e, *te);
      }
    }
    if (hit) {
      const double te = std::clamp(hit->second, t, t_new);
      const double theta = (te - t) / (t_new - t);
      VectorXd ye(n), fe(n);
      interpolate(theta, t_new - t, {ye.data(), n_});
      eval(te, ye, fe);
      MatrixXd Se, SFe;
      if (p_ > 0) {
        const std::size_t last = traj_.size() - 1;
        std::vector<double> s(n_ * p_);
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> snew = S_new_;
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> sfnew =
            SK_[kStages - 1];
        kernels::hermite(theta, t_new - t, traj_.sensitivity(last), traj_.sensitivity_derivative(last),
                         {snew.data(), n_ * p_}, {sfnew.data(), n_ * p_}, s);
        Se = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            s.data(), n, p);
        eval_jacobian(te, ye);
        sys_.parameter_jacobian(te, {ye.data(), n_}, Jp_);
        SFe = J_ * Se + Jp_;
      }
      if (te > t) push(te, ye, fe, Se, SFe);
      traj_.event = EventHit{hit->first, te};
      return std::move(traj_);
    }

    y_ = y_new;
    f_ = f_new;
    if (p_ > 0) {
      S_ = S_new_;
      SF_ = SK_[kStages - 1];
      jac_current_ = true;  // J_ was evaluated at the last stage, which is the new point
    } else {
      jac_current_ = false;
    }
    push(t_new, y_, f_, S_, SF_);
    t = t_new;

    if (!fixed) {
      double fac = err == 0.0 ? opt_.max_factor
                              : opt_.safety * std::pow(err, -0.7 / kErrorOrder) *
                                    std::pow(err_prev, 0.4 / kErrorOrder);
      fac = std::clamp(fac, opt_.min_factor, opt_.max_factor);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      err_prev = std::max(err, 1e-4);
      last_rejected = false;
    }
  }
  return std::move(traj_);
}

}  // namespace

Tolerances Tolerances::for_thermal(std::size_t stage_count, double rtol, double atol_c,
                                   double atol_T) {
  Tolerances tol;
  tol.rtol = rtol;
  tol.atol.assign(stage_count, atol_c);
  tol.atol.push_back(atol_T);
  return tol;
}

Tolerances Tolerances::scaled(double factor) const {
  Tolerances out = *this;
  out.rtol *= factor;
  for (double& a : out.atol) a *= factor;
  return out;
}

void Tolerances::validate(std::size_t dimension) const {
  if (!(rtol > 0.0)) throw InvalidInput("rtol must be positive");
  if (atol.size() != 1 && atol.size() != dimension) {
    throw InvalidInput("atol must have one entry or one per state component");
  }
  for (double a : atol) {
    if (!(a > 0.0)) throw InvalidInput("atol must be positive");
  }
}

void OdeSystem::jacobian(double t, std::span<const double> y, Eigen::MatrixXd& jac) const {
  const std::size_t n = dimension();
  jac.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> yp(y.begin(), y.end()), f0(n), f1(n);
  rhs(t, y, f0);
  for (std::size_t j = 0; j < n; ++j) {
    const double dy = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(y[j]));
    yp[j] = y[j] + dy;
    rhs(t, yp, f1);
    for (std::size_t i = 0; i < n; ++i) {
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (f1[i] - f0[i]) / dy;
    }
    yp[j] = y[j];
  }
}

void OdeSystem::parameter_jacobian(double, std::span<const double>, Eigen::MatrixXd& jac) const {
  jac.resize(static_cast<Eigen::Index>(dimension()), 0);
}

void Trajectory::append(double t, std::span<const double> y, std::span<const double> f,
                        std::span<const double> s, std::span<const double> sf) {
  times_.push_back(t);
  states_.insert(states_.end(), y.begin(), y.end());
  derivs_.insert(derivs_.end(), f.begin(), f.end());
  if (params_ > 0) {
    sens_.insert(sens_.end(), s.begin(), s.end());
    sens_derivs_.insert(sens_derivs_.end(), sf.begin(), sf.end());
  }
}

void Trajectory::pop_back() {
  times_.pop_back();
  states_.resize(states_.size() - dim_);
  derivs_.resize(derivs_.size() - dim_);
  if (params_ > 0) {
    sens_.resize(sens_.size() - dim_ * params_);
    sens_derivs_.resize(sens_derivs_.size() - dim_ * params_);
  }
}

std::size_t Trajectory::locate(double t) const {
  if (times_.empty()) throw RangeError("empty trajectory");
  const double slack = 1e-12 * std::max(1.0, std::abs(times_.back()));
  if (!(t >= times_.front() - slack && t <= times_.back() + slack)) {
    throw RangeError("time " + num(t) + " outside trajectory range [" +
                     num(times_.front()) + ", " + num(times_.back()) + "]");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0;
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

void Trajectory::sample(double t, std::span<double> y) const {
  const std::size_t i = locate(t);
  if (i + 1 >= times_.size() || times_[i] == t) {
    const auto s = state(std::min(i, times_.size() - 1));
    std::copy(s.begin(), s.end(), y.begin());
    return;
  }
  const double h = times_[i + 1] - times_[i];
  kernels::hermite((t - times_[i]) / h, h, state(i), derivative(i), state(i + 1), derivative(i + 1),
                   y.first(dim_));
}

void Trajectory::sample_sensitivity(double t, std::span<double> s) const {
  const std::size_t i = locate(t);
  if (i + 1 >= times_.size() || times_[i] == t) {
    const auto src = sensitivity(std::min(i, times_.size() - 1));
    std::copy(src.begin(), src.end(), s.begin());
    return;
  }
  const double h = times_[i + 1] - times_[i];
  kernels::hermite((t - times_[i]) / h, h, sensitivity(i), sensitivity_derivative(i),
                   sensitivity(i + 1), sensitivity_derivative(i + 1), s.first(dim_ * params_));
}

std::vector<double> Trajectory::sample(double t) const {
  std::vector<double> y(dim_);
  sample(t, y);
  return y;
}

Trajectory integrate(const OdeSystem& system, std::span<const double> y0, double t0, double t1,
                     const Tolerances& tol, const std::vector<EventSpec>& events,
                     const IntegrateOptions& options) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t0 < t1)) {
    throw InvalidInput("integration span must be finite with t_start < t_end");
  }
  if (y0.size() != system.dimension()) throw InvalidInput("initial state dimension mismatch");
  for (double v : y0) {
    if (!std::isfinite(v)) throw InvalidInput("initial state is not finite");
  }
  tol.validate(system.dimension());
  if (options.fixed_step && !(*options.fixed_step > 0.0)) {
    throw InvalidInput("fixed step must be positive");
  }
  for (const auto& ev : events) {
    const bool bad = std::visit(
        [](const auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, TemperatureCeiling>) return !(e.temperature > 0.0);
          if constexpr (std::is_same_v<E, RateThreshold>) return !(e.rate > 0.0);
          if constexpr (std::is_same_v<E, TimeLimit>) return !(e.time > 0.0);
          if constexpr (std::is_same_v<E, Crossing>) return !static_cast<bool>(e.g);
          return false;
        },
        ev);
    if (bad) throw InvalidInput("event thresholds must be positive");
  }
  Stepper stepper(system, tol, options);
  return stepper.run(y0, t0, t1, events);
}

Trajectory integrate(const ReactionSystem& system, const AmbientModel& ambient,
                     const ThermalState& y0, double t0, double t1, const Tolerances& tol,
                     const std::vector<EventSpec>& events, const IntegrateOptions& options) {
  y0.validate();
  if (y0.concentrations.size() != system.stage_count()) {
    throw InvalidInput("initial state has wrong number of concentrations");
  }
  const ReactionOde ode(system, ambient);
  const auto y = y0.flatten();
  return integrate(ode, y, t0, t1, tol, events, options);
}

std::vector<ThermalState> sample(const Trajectory& traj, std::span<const double> times) {
  std::vector<ThermalState> out;
  out.reserve(times.size());
  std::vector<double> y(traj.dimension());
  for (double t : times) {
    traj.sample(t, y);
    out.push_back(ThermalState::unflatten(y));
  }
  return out;
}

}  // namespace arcfit
