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

#include "arcfit/pipeline.hpp"

#include <cmath>

#include "arcfit/io.hpp"
#include "json.hpp"

namespace arcfit {

namespace {

std::string header_block(const std::vector<std::pair<std::string, std::string>>& lines) {
  std::string out;
  for (const auto& [k, v] : lines) out += "# " + k + ": " + v + "\n";
  return out;
}

nlohmann::ordered_json stage_row(std::size_t index, const char* method, const StageKinetics& s) {
  nlohmann::ordered_json j;
  j["stage"] = index + 1;
  j["method"] = method;
  j["IC"] = s.c0;
  j["A"] = s.freq_factor;
  j["Ea"] = s.activation_energy;
  j["h"] = s.enthalpy;
  j["m"] = s.order_m;
  j["n"] = s.order_n;
  return j;
}

const char* init_name(const RunConfig& c) { return c.init_method == InitMethod::Linear ? "linear" : "given"; }

}  // namespace

std::vector<std::pair<std::string, std::string>> RunProvenance::lines() const {
  return {{"arcfit_version", ARCFIT_VERSION},
          {"data_sha256", data_sha256},
          {"config_sha256", config_sha256},
          {"seed", std::to_string(seed)}};
}

ArcTrace loss_window(const RunConfig& config, const ArcTrace& data) {
  if (config.loss_window == LossWindow::Full) return data;
  const auto part = config.partition();
  return temperature_window(data, part.t_start(), part.t_end());
}

FitOutcome run_fit(const RunConfig& config, const ArcTrace& data, const StepObserver& observer) {
  FitOutcome out;
  if (config.init_method == InitMethod::Linear) {
    const auto orders = config.orders();
    auto init = initialize(data, config.partition(), config.cell, orders, config.init);
    out.initial = std::move(init.system);
    out.linear = std::move(init.stages);
  } else {
    out.initial = config.system();
  }
  out.window = loss_window(config, data);
  const auto mask = config.mask();
  out.result = fit(out.window, out.initial, mask, config.train, observer);
  out.initial_rmse = std::sqrt(out.result.initial_loss);
  out.final_rmse =
      trajectory_rmse(predict(out.result.system, out.window, config.train.loss), out.window);
  return out;
}

std::string fit_report_json(const RunConfig& config, const FitOutcome& o, const RunProvenance& p) {
  nlohmann::ordered_json j;
  j["arcfit_version"] = ARCFIT_VERSION;
  j["provenance"] = {{"data_sha256", p.data_sha256},
                     {"config_sha256", p.config_sha256},
                     {"seed", p.seed}};
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < o.initial.stages.size(); ++i)
    rows.push_back(stage_row(i, init_name(config), o.initial.stages[i]));
  for (std::size_t i = 0; i < o.result.system.stages.size(); ++i)
    rows.push_back(stage_row(i, "trained", o.result.system.stages[i]));
  j["stages"] = rows;
  if (!o.linear.empty()) {
    auto lin = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < o.linear.size(); ++i) {
      const auto& s = o.linear[i];
      nlohmann::ordered_json r;
      r["stage"] = i + 1;
      r["r_squared"] = s.fit.diagnostics.r_squared;
      r["n_points"] = s.fit.diagnostics.n_points;
      r["n_excluded"] = s.fit.diagnostics.n_excluded;
      r["segment_size"] = s.segment_size;
      r["substituted"] = s.substituted;
      r["note"] = s.note;
      lin.push_back(r);
    }
    j["linear_fit"] = lin;
  }
  const auto& h = o.result.history;
  auto every = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < h.loss.size(); k += 100) every.push_back({{"step", k}, {"loss", h.loss[k]}});
  j["training"] = {{"steps_run", h.loss.size()},
                   {"initial_loss", o.result.initial_loss},
                   {"final_loss", o.result.final_loss},
                   {"best_step", h.best_step},
                   {"rejected_steps", h.rejected_steps},
                   {"early_stopped", h.early_stopped},
                   {"loss_every_100", every}};
  j["n_timesteps"] = o.window.size();
  j["rmse_K"] = {{"initial", o.initial_rmse}, {"final", o.final_rmse}};
  return j.dump(2) + "\n";
}

std::string fitted_parameters_csv(const FitOutcome& o, const RunProvenance& p) {
  std::string out = header_block(p.lines());
  out += "stage,method,IC,A_per_s,Ea_J,h_J,m,n\n";
  auto row = [&](std::size_t i, const char* method, const StageKinetics& s) {
    out += std::to_string(i + 1) + "," + method + "," + format_double(s.c0) + "," +
           format_double(s.freq_factor) + "," + format_double(s.activation_energy) + "," +
           format_double(s.enthalpy) + "," + format_double(s.order_m) + "," +
           format_double(s.order_n) + "\n";
  };
  for (std::size_t i = 0; i < o.initial.stages.size(); ++i) row(i, "initial", o.initial.stages[i]);
  for (std::size_t i = 0; i < o.result.system.stages.size(); ++i)
    row(i, "trained", o.result.system.stages[i]);
  return out;
}

std::vector<GradCheckRow> gradient_check(const RunConfig& config, const ArcTrace& data) {
  const auto sys = config.system();
  const auto window = loss_window(config, data);
  const ParamVector params(sys.stages, config.mask());
  LossSettings ad = config.train.loss;
  ad.tol = Tolerances::for_thermal(sys.stage_count(), config.gradcheck_rtol,
                                   1e-9 * config.gradcheck_rtol / 1e-6,
                                   1e-6 * config.gradcheck_rtol / 1e-6);
  const auto rep = grad_loss(sys, window, params, ad);
  const auto fd = fd_gradient(sys, window, params, config.gradcheck_h_rel, config.train.loss);
  std::vector<GradCheckRow> rows;
  for (auto i : params.trainable_indices()) {
    GradCheckRow r;
    r.label = params.label(i);
    r.ad = rep.gradient[i];
    r.fd = fd[i];
    r.rel_error = std::abs(r.ad - r.fd) / std::max(std::abs(r.fd), config.gradcheck_floor);
    r.ok = r.rel_error <= config.gradcheck_tolerance;
    rows.push_back(r);
  }
  return rows;
}

std::string gradcheck_csv(const std::vector<GradCheckRow>& rows, const RunProvenance& p) {
  std::string out = header_block(p.lines());
  out += "parameter,ad,fd,rel_error,ok\n";
  for (const auto& r : rows)
    out += r.label + "," + format_double(r.ad) + "," + format_double(r.fd) + "," +
           format_double(r.rel_error) + "," + (r.ok ? "1" : "0") + "\n";
  return out;
}

}  // namespace arcfit
