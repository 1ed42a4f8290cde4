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

#include "arcfit/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace arcfit {

void TrainConfig::validate() const {
  if (steps < 1) throw InvalidInput("training needs at least one step");
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw InvalidInput("lr0 must be positive");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0))
    throw InvalidInput("decay_factor must lie in (0, 1]");
  if (decay_every < 1) throw InvalidInput("decay_every must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidInput("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw InvalidInput("Adam epsilon must be positive");
  if (early_stop_window && *early_stop_window < 1)
    throw InvalidInput("early stop window must be at least 1");
}

double lr_schedule(const TrainConfig& config, std::size_t step) {
  return config.lr0 * std::pow(config.decay_factor, static_cast<double>(step / config.decay_every));
}

void adam_step(ParamVector& params, std::span<const double> grad, AdamMoments& moments,
               std::size_t step, double lr, const TrainConfig& config) {
  const std::size_t n = params.size();
  if (grad.size() != n || moments.m.size() != n || moments.v.size() != n)
    throw InvalidInput("adam_step: parameter, gradient and moment sizes differ");
  if (step < 1) throw InvalidInput("adam_step: step counts from 1");
  for (std::size_t i = 0; i < n; ++i)
    if (params.trainable(i) && !std::isfinite(grad[i]))
      throw DivergedTraining("non-finite gradient for " + params.label(i), params);

  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < n; ++i) {
    if (!params.trainable(i)) continue;
    moments.m[i] = b1 * moments.m[i] + (1.0 - b1) * grad[i];
    moments.v[i] = b2 * moments.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = moments.m[i] / c1;
    const double vhat = moments.v[i] / c2;
    params.values[i] -= lr * mhat / (std::sqrt(vhat) + config.epsilon);
    const auto kind = static_cast<ParamKind>(i % kParamsPerStage);
    if (kind == ParamKind::OrderM || kind == ParamKind::OrderN)
      params.values[i] = std::max(params.values[i], 0.0);
  }
}

namespace {

// Smallest m kept for a converting stage; m = 0 would flip its direction.
constexpr double kMinConvertingOrder = 1e-6;

void keep_directions(ParamVector& p, const ReactionSystem& base) {
  for (std::size_t s = 0; s < base.stage_count(); ++s) {
    if (base.stages[s].direction != Direction::Converting) continue;
    double& m = p.values[ParamVector::offset(s, ParamKind::OrderM)];
    m = std::max(m, kMinConvertingOrder);
  }
}

struct Evaluation {
  bool ok = false;
  LossReport report;
  std::string failure;
};

Evaluation evaluate(const ReactionSystem& init, const ArcTrace& data, const ParamVector& p,
                    const LossSettings& settings) {
  Evaluation e;
  try {
    e.report = grad_loss(init, data, p, settings);
    e.ok = std::isfinite(e.report.loss);
    if (!e.ok) e.failure = "non-finite loss";
    for (double g : e.report.gradient)
      if (e.ok && !std::isfinite(g)) {
        e.ok = false;
        e.failure = "non-finite gradient";
      }
  } catch (const StiffnessFailure& ex) {
    e.failure = ex.what();
  } catch (const SingularSystem& ex) {
    e.failure = ex.what();
  } catch (const InvalidInput& ex) {
    e.failure = ex.what();
  }
  return e;
}

}  // namespace

FitResult fit(const ArcTrace& data, const ReactionSystem& init, std::span<const std::uint8_t> mask,
              const TrainConfig& config, const StepObserver& observer) {
  config.validate();
  init.validate();
  data.validate();
  ParamVector params(init.stages, std::vector<std::uint8_t>(mask.begin(), mask.end()));
  AdamMoments moments = AdamMoments::zeros(params.size());

  auto current = evaluate(init, data, params, config.loss);
  if (!current.ok)
    throw StiffnessFailure("training: initial parameters fail to integrate: " + current.failure,
                           Trajectory{});

  FitResult out;
  auto& h = out.history;
  out.initial_loss = current.report.loss;
  h.best = params;
  h.best_loss = current.report.loss;
  h.best_step = 0;
  std::size_t last_improvement = 0;
  double plateau_ref = current.report.loss;

  for (std::size_t k = 0; k < config.steps; ++k) {
    const auto t_begin = std::chrono::steady_clock::now();
    const double loss_k = current.report.loss;
    h.loss.push_back(loss_k);
    if (loss_k < h.best_loss) {
      h.best_loss = loss_k;
      h.best = params;
      h.best_step = k;
    }

    const ParamVector prev_params = params;
    const AdamMoments prev_moments = moments;
    double lr = lr_schedule(config, k);
    Evaluation next;
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        adam_step(params, current.report.gradient, moments, k + 1, lr, config);
      } catch (const DivergedTraining& e) {
        throw DivergedTraining(std::string(e.what()) + " at step " + std::to_string(k), h.best);
      }
      keep_directions(params, init);
      next = evaluate(init, data, params, config.loss);
      if (next.ok) break;
      ++h.rejected_steps;
      params = prev_params;
      moments = prev_moments;
      if (attempt >= config.max_halvings)
        throw DivergedTraining("training aborted at step " + std::to_string(k) + " after " +
                                   std::to_string(attempt) + " learning-rate halvings: " +
                                   next.failure,
                               h.best);
      lr *= 0.5;
    }
    h.learning_rate.push_back(lr);
    current = std::move(next);
    h.wall_time.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count());
    if (observer) observer(k, loss_k, lr);

    if (config.early_stop_window) {
      if (plateau_ref - h.best_loss > config.early_stop_delta) {
        plateau_ref = h.best_loss;
        last_improvement = k;
      } else if (k - last_improvement >= *config.early_stop_window) {
        h.early_stopped = true;
        break;
      }
    }
  }
  // parameters after the last update
  if (current.report.loss < h.best_loss) {
    h.best_loss = current.report.loss;
    h.best = params;
    h.best_step = h.loss.size();
  }

  out.system = h.best.apply(init);
  out.final_loss = h.best_loss;
  return out;
}

}  // namespace arcfit
