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

#include "arcfit/linfit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arcfit/errors.hpp"
#include "arcfit/kernels/kernels.hpp"

namespace arcfit {

StagePartition StagePartition::from_celsius(std::span<const double> boundaries_C) {
  StagePartition p;
  for (double c : boundaries_C) p.boundaries.push_back(celsius_to_kelvin(c));
  p.validate();
  return p;
}

void StagePartition::validate() const {
  if (boundaries.size() < 2) throw InvalidInput("stage partition needs at least two boundaries");
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (!std::isfinite(boundaries[i]) || boundaries[i] <= 0.0)
      throw InvalidInput("stage boundary " + std::to_string(i) + " must be a positive temperature");
    if (i > 0 && !(boundaries[i] > boundaries[i - 1]))
      throw InvalidInput("stage boundaries must be strictly increasing");
  }
}

namespace {

double mean(std::span<const double> x) { return kernels::sum(x) / static_cast<double>(x.size()); }

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y) {
  const auto m = kernels::centered_moments(x, y, mean(x), mean(y));
  return m.sxy / m.sxx;
}

std::string kelvin_text(double T) {
  std::ostringstream os;
  os << T << " K";
  return os.str();
}

}  // namespace

ArcTrace estimate_rate(const ArcTrace& trace, std::size_t window) {
  trace.validate();
  if (window < 3 || window % 2 == 0) throw InvalidInput("rate window must be odd and >= 3");
  if (trace.size() < window)
    throw InvalidInput("trace has " + std::to_string(trace.size()) + " samples, rate window needs " +
                       std::to_string(window));
  ArcTrace out = trace;
  std::vector<double> rates(trace.size());
  const std::size_t half = window / 2;
  const std::size_t n = trace.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i < half ? 0 : std::min(i - half, n - window);
    const std::span<const double> t(trace.times.data() + lo, window);
    const std::span<const double> T(trace.temperatures.data() + lo, window);
    rates[i] = ls_slope(t, T);
  }
  out.rates = std::move(rates);
  return out;
}

ArcTrace temperature_window(const ArcTrace& trace, double T_start, double T_end) {
  const auto& T = trace.temperatures;
  const auto first = std::find_if(T.begin(), T.end(), [&](double v) { return v >= T_start; });
  if (first == T.end())
    throw StagingError("trace never reaches the window start " + kelvin_text(T_start));
  const auto last = std::find_if(first, T.end(), [&](double v) { return v > T_end; });
  return trace.slice(static_cast<std::size_t>(first - T.begin()),
                     static_cast<std::size_t>(last - T.begin()));
}

std::vector<ArcTrace> partition(const ArcTrace& trace, const StagePartition& part,
                                double monotone_slack) {
  part.validate();
  trace.validate();
  if (trace.empty()) throw StagingError("cannot partition an empty trace");
  const ArcTrace win = temperature_window(trace, part.t_start(), part.t_end());
  const auto& T = win.temperatures;
  double running_max = -INFINITY;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (T[i] < running_max - monotone_slack) {
      std::ostringstream os;
      os << "temperature decreases inside the staging window at t = " << win.times[i] << " s ("
         << running_max << " K -> " << T[i] << " K)";
      throw StagingError(os.str());
    }
    running_max = std::max(running_max, T[i]);
  }

  std::vector<ArcTrace> segments;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < part.stage_count(); ++s) {
    std::size_t end = T.size();
    if (s + 1 < part.stage_count()) {
      const double upper = part.boundaries[s + 1];
      end = static_cast<std::size_t>(
          std::find_if(T.begin() + static_cast<std::ptrdiff_t>(begin), T.end(),
                       [&](double v) { return v >= upper; }) -
          T.begin());
    }
    segments.push_back(win.slice(begin, end));
    begin = end;
  }
  return segments;
}

double stage_enthalpy(const CellProperties& cell, double T_start, double T_end) {
  if (!(T_end >= T_start)) throw InvalidInput("stage enthalpy needs T_end >= T_start");
  return cell.heat_capacity() * (T_end - T_start);
}

StageFit linearized_fit(const ArcTrace& segment, double T_start, double T_end) {
  if (!segment.rates) throw InvalidInput("linearized fit needs rates; run estimate_rate first");
  if (!(T_end > T_start)) throw InvalidInput("linearized fit needs T_end > T_start");
  std::vector<double> x, y;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < segment.size(); ++i) {
    const double r = (*segment.rates)[i];
    if (!(r > 0.0)) {
      ++excluded;
      continue;
    }
    x.push_back(1.0 / segment.temperatures[i]);
    y.push_back(std::log(r));
  }
  if (x.size() < 2)
    throw InsufficientData("linearized fit has " + std::to_string(x.size()) +
                           " usable points (" + std::to_string(excluded) +
                           " with non-positive rate)");
  const auto m = kernels::centered_moments(x, y, mean(x), mean(y));
  if (!(m.sxx > 0.0)) throw InsufficientData("linearized fit: all points at one temperature");

  StageFit fit;
  auto& d = fit.diagnostics;
  d.slope = m.sxy / m.sxx;
  d.intercept = mean(y) - d.slope * mean(x);
  d.r_squared = m.syy > 0.0 ? std::clamp(m.sxy * m.sxy / (m.sxx * m.syy), 0.0, 1.0) : 1.0;
  d.n_points = x.size();
  d.n_excluded = excluded;
  fit.activation_energy = -d.slope * kBoltzmann;
  fit.freq_factor = std::exp(d.intercept) / (T_end - T_start);
  return fit;
}

Initialization initialize(const ArcTrace& trace, const StagePartition& part,
                          const CellProperties& cell, std::span<const StageOrders> orders,
                          const InitOptions& options) {
  part.validate();
  cell.validate();
  if (orders.size() != part.stage_count())
    throw InvalidInput("initializer got orders for " + std::to_string(orders.size()) +
                       " stages, partition has " + std::to_string(part.stage_count()));
  const ArcTrace with_rates = trace.rates ? trace : estimate_rate(trace, options.rate_window);
  const auto segments = partition(with_rates, part, options.monotone_slack);

  Initialization init;
  init.system.cell = cell;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const double lo = part.boundaries[s];
    const double hi = part.boundaries[s + 1];
    StageInit si;
    si.segment_size = segments[s].size();
    std::string problem;
    try {
      si.fit = linearized_fit(segments[s], lo, hi);
      if (si.fit.diagnostics.r_squared < options.min_r_squared) {
        std::ostringstream os;
        os << "r^2 = " << si.fit.diagnostics.r_squared << " below " << options.min_r_squared;
        problem = os.str();
      } else if (!(si.fit.activation_energy > 0.0) || !std::isfinite(si.fit.freq_factor) ||
                 !(si.fit.freq_factor > 0.0)) {
        problem = "non-physical fit (Ea <= 0 or A not finite)";
      }
    } catch (const InsufficientData& e) {
      problem = e.what();
    }
    if (!problem.empty()) {
      if (s == 0)
        throw InsufficientData("stage 1: " + problem + "; no previous stage to substitute");
      si.substituted = true;
      si.note = problem + "; A and Ea copied from stage " + std::to_string(s);
      si.fit.freq_factor = init.system.stages[s - 1].freq_factor;
      si.fit.activation_energy = init.system.stages[s - 1].activation_energy;
    }

    StageKinetics k;
    k.freq_factor = si.fit.freq_factor;
    k.activation_energy = si.fit.activation_energy;
    k.enthalpy = stage_enthalpy(cell, lo, hi);
    k.order_m = orders[s].m;
    k.order_n = orders[s].n;
    k.c0 = orders[s].c0;
    k.direction = orders[s].direction;
    try {
      k.validate();
    } catch (const InvalidInput& e) {
      throw InvalidInput("stage " + std::to_string(s + 1) + ": " + e.what());
    }
    init.system.stages.push_back(k);
    init.stages.push_back(std::move(si));
  }
  return init;
}

}  // namespace arcfit
