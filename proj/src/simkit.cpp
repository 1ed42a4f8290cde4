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

#include "arcfit/simkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

namespace arcfit {

namespace {

Tolerances default_tol(const ReactionSystem& system, const std::optional<Tolerances>& tol) {
  return tol ? *tol : Tolerances::for_thermal(system.stage_count());
}

std::string number_text(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

EventSpec completion_event(const ReactionSystem& system) {
  std::vector<double> target;
  for (const auto& s : system.stages) target.push_back(s.completed_value());
  return Crossing{"runaway-complete", [target](double, std::span<const double> y) {
                    double worst = 0.0;
                    for (std::size_t i = 0; i < target.size(); ++i)
                      worst = std::max(worst, std::abs(y[i] - target[i]));
                    return kCompletionTolerance - worst;
                  }};
}

// Appends `seg` to `out`, dropping its first point when it repeats the last one.
void splice(Trajectory& out, const Trajectory& seg, std::vector<HwsPhase>* labels = nullptr,
            HwsPhase phase = HwsPhase::Wait) {
  std::size_t first = 0;
  if (!out.empty() && !seg.empty() && seg.time(0) == out.t_end()) first = 1;
  for (std::size_t i = first; i < seg.size(); ++i) {
    out.append(seg.time(i), seg.state(i), seg.derivative(i));
    if (labels) labels->push_back(phase);
  }
  out.stats.accepted += seg.stats.accepted;
  out.stats.rejected += seg.stats.rejected;
  out.stats.newton_iterations += seg.stats.newton_iterations;
  out.stats.newton_failures += seg.stats.newton_failures;
  out.stats.jacobian_evaluations += seg.stats.jacobian_evaluations;
  out.stats.rhs_evaluations += seg.stats.rhs_evaluations;
}

// Reaction system with an imposed heating rate on the temperature, for HWS heat steps.
class HeatedReaction final : public ReactionOde {
 public:
  HeatedReaction(const ReactionSystem& system, double heating_rate)
      : ReactionOde(system, Adiabatic{}), heating_rate_(heating_rate) {}
  void rhs(double t, std::span<const double> y, std::span<double> dydt) const override {
    ReactionOde::rhs(t, y, dydt);
    dydt.back() += heating_rate_;
  }

 private:
  double heating_rate_;
};

}  // namespace

Trajectory simulate_exotherm(const ReactionSystem& system, double T0, double t_end,
                             const std::optional<Tolerances>& tol) {
  system.validate();
  return integrate(system, Adiabatic{}, initial_state(system, T0), 0.0, t_end,
                   default_tol(system, tol), {completion_event(system)});
}

const char* to_string(HwsPhase phase) {
  switch (phase) {
    case HwsPhase::Heat: return "heat";
    case HwsPhase::Wait: return "wait";
    case HwsPhase::Seek: return "seek";
    case HwsPhase::Exotherm: return "exotherm";
  }
  return "?";
}

void HwsProtocol::validate() const {
  if (!(step_increment > 0.0)) throw InvalidInput("HWS step increment must be positive");
  if (!(wait_duration > 0.0)) throw InvalidInput("HWS wait duration must be positive");
  if (!(seek_duration > 0.0)) throw InvalidInput("HWS seek duration must be positive");
  if (!(exotherm_threshold >= 0.0)) throw InvalidInput("HWS exotherm threshold must be >= 0");
  if (!(start_temperature > 0.0)) throw InvalidInput("HWS start temperature must be positive");
  if (!(heating_rate > 0.0)) throw InvalidInput("HWS heating rate must be positive");
}

HwsResult simulate_hws(const ReactionSystem& system, const HwsProtocol& protocol, double t_end,
                       const std::optional<Tolerances>& tol) {
  system.validate();
  protocol.validate();
  if (!(t_end > 0.0)) throw InvalidInput("HWS end time must be positive");
  const auto tolerances = default_tol(system, tol);
  const ReactionOde adiabatic(system, Adiabatic{});
  const HeatedReaction heated(system, protocol.heating_rate);

  HwsResult res;
  res.trajectory = Trajectory(system.state_dimension(), 0);
  std::vector<double> y = initial_state(system, protocol.start_temperature).flatten();
  double t = 0.0;
  auto run = [&](const OdeSystem& ode, double until, HwsPhase phase,
                 const std::vector<EventSpec>& events = {}) {
    const auto seg = integrate(ode, y, t, until, tolerances, events);
    splice(res.trajectory, seg, &res.phases, phase);
    const auto last = seg.state(seg.size() - 1);
    y.assign(last.begin(), last.end());
    t = seg.t_end();
  };
  // the first point carries the opening phase
  {
    std::vector<double> f(y.size());
    adiabatic.rhs(0.0, y, f);
    res.trajectory.append(0.0, y, f);
    res.phases.push_back(HwsPhase::Wait);
  }

  while (t < t_end) {
    run(adiabatic, std::min(t + protocol.wait_duration, t_end), HwsPhase::Wait);
    if (t >= t_end) break;
    const double T_seek = y.back();
    const double t_seek = t;
    run(adiabatic, std::min(t + protocol.seek_duration, t_end), HwsPhase::Seek);
    const double mean_rate = (y.back() - T_seek) / (t - t_seek);
    if (mean_rate >= protocol.exotherm_threshold) {
      res.exotherm_time = t;
      res.exotherm_temperature = y.back();
      if (t < t_end) run(adiabatic, t_end, HwsPhase::Exotherm, {completion_event(system)});
      break;
    }
    if (t >= t_end) break;
    run(heated, t_end, HwsPhase::Heat, {TemperatureCeiling{y.back() + protocol.step_increment}});
  }
  return res;
}

double self_heating_onset(const ReactionSystem& system, double rate, double lo, double hi) {
  system.validate();
  const auto y0 = initial_state(system, lo);
  auto heating = [&](double T) {
    ThermalState s = y0;
    s.temperature = T;
    return system_rhs(system, s, Adiabatic{}, 0.0).temperature;
  };
  if (heating(lo) >= rate) return lo;
  if (heating(hi) < rate) throw RangeError("self-heating rate never reaches the threshold below " + number_text(hi) + " K");
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (heating(mid) >= rate ? hi : lo) = mid;
  }
  return hi;
}

OvenResult simulate_oven(const ReactionSystem& system, double T_oven, double T0, double t_end,
                         const std::optional<Tolerances>& tol, double onset_rate,
                         OnsetSignal signal) {
  system.validate();
  if (!(T_oven > 0.0)) throw InvalidInput("oven temperature must be positive");
  if (!(onset_rate > 0.0)) throw InvalidInput("onset rate must be positive");
  const auto tolerances = default_tol(system, tol);
  const AmbientModel oven = Oven{T_oven};

  OvenResult res;
  EventSpec onset = RateThreshold{onset_rate};
  if (signal == OnsetSignal::SelfHeating) {
    onset = Crossing{"self-heating-onset", [&system, onset_rate](double, std::span<const double> y) {
                       double q = 0.0;
                       for (std::size_t i = 0; i < system.stages.size(); ++i)
                         q += stage_heat_rate(system.stages[i], stage_rate(system.stages[i], y[i], y.back()));
                       return q / system.cell.heat_capacity() - onset_rate;
                     }};
  }
  res.trajectory = integrate(system, oven, initial_state(system, T0), 0.0, t_end, tolerances, {onset});
  if (res.trajectory.event) {
    res.onset_time = res.trajectory.event->time;
    res.trajectory.event.reset();
    const double t_on = res.trajectory.t_end();
    if (t_on < t_end) {
      const auto rest = integrate(system, oven, res.trajectory.thermal_state(res.trajectory.size() - 1),
                                  t_on, t_end, tolerances);
      splice(res.trajectory, rest);
    }
  }

  const auto& tr = res.trajectory;
  std::size_t imax = 0;
  for (std::size_t i = 1; i < tr.size(); ++i)
    if (tr.temperature(i) > tr.temperature(imax)) imax = i;
  res.peak_temperature = tr.temperature(imax);
  res.peak_time = tr.time(imax);
  // refine between the neighbouring steps on the dense output
  const std::size_t a = imax == 0 ? 0 : imax - 1;
  const std::size_t b = std::min(imax + 1, tr.size() - 1);
  std::vector<double> y(tr.dimension());
  constexpr int kProbe = 64;
  for (int k = 0; k <= kProbe; ++k) {
    const double t = tr.time(a) + (tr.time(b) - tr.time(a)) * k / kProbe;
    tr.sample(t, y);
    if (y.back() > res.peak_temperature) {
      res.peak_temperature = y.back();
      res.peak_time = t;
    }
  }
  return res;
}

ArcTrace synth_trace(const ReactionSystem& system, const SynthOptions& o) {
  if (!(o.sample_dt > 0.0)) throw InvalidInput("sample_dt must be positive");
  if (!(o.noise_std >= 0.0)) throw InvalidInput("noise_std must be >= 0");
  Trajectory tr;
  SyntheticSource src;
  src.seed = o.seed;
  if (o.mode == SynthMode::Adiabatic) {
    tr = simulate_exotherm(system, o.T0, o.t_end);
    src.generator = {{"mode", "adiabatic"}, {"T0_K", number_text(o.T0)}};
  } else {
    tr = simulate_hws(system, o.hws, o.t_end).trajectory;
    src.generator = {{"mode", "hws"},
                     {"start_K", number_text(o.hws.start_temperature)},
                     {"step_K", number_text(o.hws.step_increment)},
                     {"wait_s", number_text(o.hws.wait_duration)},
                     {"seek_s", number_text(o.hws.seek_duration)},
                     {"threshold_K_per_s", number_text(o.hws.exotherm_threshold)},
                     {"heating_K_per_s", number_text(o.hws.heating_rate)}};
  }
  src.generator.emplace_back("t_end_s", number_text(o.t_end));
  src.generator.emplace_back("sample_dt_s", number_text(o.sample_dt));
  src.generator.emplace_back("noise_std_K", number_text(o.noise_std));

  ArcTrace out;
  std::vector<double> y(tr.dimension());
  for (std::size_t k = 0;; ++k) {
    const double t = tr.t_begin() + static_cast<double>(k) * o.sample_dt;
    if (t > tr.t_end()) break;
    tr.sample(t, y);
    out.times.push_back(t);
    out.temperatures.push_back(y.back());
  }
  if (o.noise_std > 0.0) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> noise(0.0, o.noise_std);
    for (double& T : out.temperatures) T += noise(rng);
  }
  out.provenance = std::move(src);
  return out;
}

}  // namespace arcfit
