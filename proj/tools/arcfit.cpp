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

// arcfit command-line interface: fit, simulate, synth, gradcheck, plot.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "arcfit/config.hpp"
#include "arcfit/io.hpp"
#include "arcfit/linfit.hpp"
#include "arcfit/pipeline.hpp"
#include "arcfit/plot.hpp"
#include "arcfit/simkit.hpp"

namespace fs = std::filesystem;
using namespace arcfit;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 2;
constexpr int kUsage = 64;
constexpr int kNoInput = 66;
constexpr int kCantCreate = 73;

struct Loaded {
  RunConfig config;
  std::string config_sha256;
};

Loaded load(const std::string& path) {
  const auto text = read_file(path);
  Loaded l;
  try {
    l.config = parse_config(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + (e.where().empty() ? "" : ": " + e.where()), e.detail());
  }
  l.config_sha256 = sha256_hex(text);
  return l;
}

struct IngestFlags {
  std::string time_col = "time_s";
  std::string temp_col = "temp_C";
  std::string temp_unit = "C";
  std::string time_unit = "s";
};

IngestResult ingest(const std::string& path, const IngestFlags& f) {
  ColumnMap cols;
  cols.time = f.time_col;
  cols.temperature = f.temp_col;
  CsvUnits units;
  units.temperature = f.temp_unit == "K" ? TemperatureUnit::Kelvin : TemperatureUnit::Celsius;
  units.time = f.time_unit == "min" ? TimeUnit::Minutes : TimeUnit::Seconds;
  auto res = ingest_csv(path, cols, units);
  if (res.dropped_rows > 0)
    std::cerr << "arcfit: dropped " << res.dropped_rows << " rows with non-finite values\n";
  return res;
}

void add_ingest_flags(CLI::App* cmd, IngestFlags& f) {
  cmd->add_option("--time-col", f.time_col, "time column name");
  cmd->add_option("--temp-col", f.temp_col, "temperature column name");
  cmd->add_option("--temp-unit", f.temp_unit, "temperature unit")->check(CLI::IsMember({"C", "K"}));
  cmd->add_option("--time-unit", f.time_unit, "time unit")->check(CLI::IsMember({"s", "min"}));
}

std::string data_hash(const ArcTrace& t) {
  if (const auto* e = std::get_if<ExperimentalSource>(&t.provenance)) return e->sha256;
  return "";
}

void announce(const fs::path& p) { std::cerr << "arcfit: wrote " << p.string() << "\n"; }

int cmd_fit(const std::string& config_path, const std::string& data_path, const IngestFlags& flags,
            const std::optional<std::string>& out_dir, bool quiet) {
  const auto [config, config_hash] = load(config_path);
  const auto data = ingest(data_path, flags).trace;
  const RunProvenance prov{data_hash(data), config_hash, config.train.seed};
  const fs::path dir = out_dir ? fs::path(*out_dir) : config.output_dir;
  FitOutcome outcome;
  try {
    outcome = run_fit(config, data, [&](std::size_t k, double loss, double lr) {
      if (!quiet && k % 500 == 0)
        std::fprintf(stderr, "step %6zu  loss %.6g K^2  lr %.4g\n", k, loss, lr);
    });
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    std::cerr << "arcfit fit: " << e.what() << "\n";
    return kFailure;
  }
  write_file(dir / "fit_report.json", fit_report_json(config, outcome, prov));
  announce(dir / "fit_report.json");
  write_file(dir / "fitted_parameters.csv", fitted_parameters_csv(outcome, prov));
  announce(dir / "fitted_parameters.csv");
  std::fprintf(stderr, "loss %.6g -> %.6g K^2, RMSE %.4g -> %.4g K\n", outcome.result.initial_loss,
               outcome.result.final_loss, outcome.initial_rmse, outcome.final_rmse);
  return kOk;
}

int cmd_simulate(const std::string& config_path, const std::string& mode,
                 const std::optional<double>& oven_C, const std::optional<std::string>& out) {
  const auto [config, config_hash] = load(config_path);
  const auto sys = config.system();
  const auto tol = config.tolerances();
  auto header = RunProvenance{"", config_hash, 0}.lines();
  header.erase(header.begin() + 1);  // no data file
  header.emplace_back("mode", mode);
  header.emplace_back("T0_K", format_double(config.T0));
  const fs::path path = out ? fs::path(*out) : config.output_dir / ("simulate_" + mode + ".csv");
  std::string body;

  std::optional<double> T_oven = config.oven_temperature;
  if (oven_C) T_oven = *oven_C + 273.15;
  if ((mode == "oven" || mode == "radial") && !T_oven)
    throw ConfigError("simulate.oven_temp_C", "required for mode " + mode + " (or --oven-temp)");

  if (mode == "exotherm") {
    body = trajectory_csv(simulate_exotherm(sys, config.T0, config.t_end, tol), header);
  } else if (mode == "hws") {
    const auto r = simulate_hws(sys, config.hws, config.t_end, tol);
    if (r.exotherm_time) {
      header.emplace_back("exotherm_time_s", format_double(*r.exotherm_time));
      header.emplace_back("exotherm_temp_K", format_double(*r.exotherm_temperature));
    }
    std::vector<std::string> phase;
    for (auto p : r.phases) phase.emplace_back(to_string(p));
    body = trajectory_csv(r.trajectory, header, {"phase"}, {phase});
  } else if (mode == "oven") {
    const auto r = simulate_oven(sys, *T_oven, config.T0, config.t_end, tol);
    header.emplace_back("oven_K", format_double(*T_oven));
    if (r.onset_time) header.emplace_back("onset_time_s", format_double(*r.onset_time));
    header.emplace_back("peak_temp_K", format_double(r.peak_temperature));
    header.emplace_back("peak_time_s", format_double(r.peak_time));
    body = trajectory_csv(r.trajectory, header);
  } else {
    const auto model = RadialModel::cylindrical_cell(config.cell, config.radial_conductivity,
                                                     config.jellyroll_nodes, config.can_nodes);
    auto opts = config.radial;
    opts.tol = tol;
    const auto r = simulate_radial(model, sys, *T_oven, config.T0, config.t_end, opts);
    header.emplace_back("oven_K", format_double(*T_oven));
    header.emplace_back("energy_residual", format_double(r.energy_residual()));
    header.emplace_back("peak_temp_K", format_double(r.peak_temperature()));
    std::string radii;
    for (double x : r.radii) radii += (radii.empty() ? "" : " ") + format_double(x);
    header.emplace_back("node_radii_m", radii);
    for (const auto& [k, v] : header) body += "# " + k + ": " + v + "\n";
    body += "time_s,temp_K";
    for (std::size_t i = 0; i < r.radii.size(); ++i) body += ",T_" + std::to_string(i + 1) + "_K";
    body += "\n";
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      body += format_double(r.times[k]) + "," + format_double(r.mean_temperature[k]);
      for (double T : r.temperatures[k]) body += "," + format_double(T);
      body += "\n";
    }
  }
  write_file(path, body);
  announce(path);
  return kOk;
}

int cmd_synth(const std::string& config_path, const std::optional<double>& noise,
              const std::optional<std::uint64_t>& seed, const std::optional<std::string>& out) {
  const auto [config, config_hash] = load(config_path);
  auto opts = config.synth;
  if (noise) opts.noise_std = *noise;
  if (seed) opts.seed = *seed;
  if (opts.noise_std < 0.0) throw CLI::ValidationError("--noise", "must be >= 0");
  const auto trace = synth_trace(config.system(), opts);
  std::vector<std::pair<std::string, std::string>> header = {{"arcfit_version", ARCFIT_VERSION},
                                                             {"config_sha256", config_hash}};
  for (const auto& kv : provenance_lines(trace.provenance)) header.push_back(kv);
  const fs::path path = out ? fs::path(*out) : config.output_dir / "synthetic.csv";
  export_csv(trace, path, header);
  announce(path);
  return kOk;
}

int cmd_gradcheck(const std::string& config_path, const std::string& data_path,
                  const IngestFlags& flags, const std::optional<std::string>& out) {
  const auto [config, config_hash] = load(config_path);
  const auto data = ingest(data_path, flags).trace;
  const auto rows = gradient_check(config, data);
  const RunProvenance prov{data_hash(data), config_hash, config.train.seed};
  const fs::path path = out ? fs::path(*out) : config.output_dir / "gradcheck.csv";
  write_file(path, gradcheck_csv(rows, prov));
  announce(path);
  bool all = true;
  for (const auto& r : rows) {
    std::fprintf(stderr, "%-8s ad % .10e  fd % .10e  rel %.2e  %s\n", r.label.c_str(), r.ad, r.fd,
                 r.rel_error, r.ok ? "ok" : "FAIL");
    all = all && r.ok;
  }
  return all ? kOk : kFailure;
}

int cmd_plot(const std::string& input, const std::string& kind, const std::optional<std::string>& out) {
  const auto text = read_file(input);
  CsvTable table;
  try {
    table = parse_csv_table(text);
  } catch (const InputFileError& e) {
    throw InputFileError(input + ": " + e.what());
  }
  auto need = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* n : names)
      if (auto i = table.find(n)) return i;
    return std::nullopt;
  };
  const auto it = need({"time_s"});
  const auto iT = need({"temp_K", "temp_C"});
  if (!it || !iT) throw InputFileError(input + ": expected columns time_s and temp_K or temp_C");
  const std::string T_name = table.columns[*iT];
  const std::string T_unit = T_name == "temp_K" ? "K" : "C";

  std::string x_name, y_name, x_label, y_label, title;
  std::vector<double> x, y;
  bool log_y = false;
  if (kind == "temp-vs-time") {
    x_name = "time_s";
    y_name = T_name;
    x = table.column(*it);
    y = table.column(*iT);
    x_label = "time (s)";
    y_label = "temperature (" + T_unit + ")";
    title = "Temperature history";
  } else {
    log_y = true;
    x_name = T_name;
    x = table.column(*iT);
    if (const auto ir = need({"dTdt_K_per_s", "rate_C_per_min"})) {
      y_name = table.columns[*ir];
      y = table.column(*ir);
    } else {
      ArcTrace tr;
      tr.times = table.column(*it);
      tr.temperatures = x;
      y_name = T_unit == "K" ? "dTdt_K_per_s" : "rate_C_per_min";
      y = *estimate_rate(tr).rates;
      if (T_unit == "C")
        for (double& v : y) v *= 60.0;
    }
    x_label = "temperature (" + T_unit + ")";
    y_label = y_name == "dTdt_K_per_s" ? "dT/dt (K/s)" : "dT/dt (C/min)";
    title = "Self-heating rate";
  }

  const std::vector<std::pair<std::string, std::string>> prov = {
      {"arcfit_version", ARCFIT_VERSION}, {"input", input}, {"input_sha256", sha256_hex(text)},
      {"kind", kind}};
  const fs::path stem = out ? fs::path(*out) : fs::path(fs::path(input).replace_extension("").string() + "_" + kind);
  std::string csv;
  for (const auto& [k, v] : prov) csv += "# " + k + ": " + v + "\n";
  csv += x_name + "," + y_name + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) csv += format_double(x[i]) + "," + format_double(y[i]) + "\n";
  const fs::path csv_path = stem.string() + ".csv", svg_path = stem.string() + ".svg";
  write_file(csv_path, csv);
  announce(csv_path);
  PlotSpec spec{title, x_label, y_label, log_y, prov};
  write_file(svg_path, render_svg(spec, x, y));
  announce(svg_path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arcfit: Arrhenius kinetics fitting for calorimetry records"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ARCFIT_VERSION);

  std::string config, data, mode, kind, trajectory;
  std::optional<std::string> out;
  std::optional<double> oven_C, noise;
  std::optional<std::uint64_t> seed;
  IngestFlags flags;
  bool quiet = false;

  auto* fit = app.add_subcommand("fit", "initialize and train on a record; writes FitReport and parameters");
  fit->add_option("--config", config, "run configuration (JSON)")->required();
  fit->add_option("--data", data, "record CSV")->required();
  fit->add_option("--out", out, "output directory (default: config output_dir)");
  fit->add_flag("--quiet", quiet, "no progress lines");
  add_ingest_flags(fit, flags);

  auto* sim = app.add_subcommand("simulate", "simulate the configured system; writes a trajectory CSV");
  sim->add_option("--config", config, "run configuration (JSON)")->required();
  sim->add_option("--mode", mode, "scenario")
      ->required()
      ->check(CLI::IsMember({"exotherm", "hws", "oven", "radial"}));
  sim->add_option("--oven-temp", oven_C, "oven temperature (C)");
  sim->add_option("--out", out, "output CSV path");

  auto* syn = app.add_subcommand("synth", "write a synthetic record from the configured system");
  syn->add_option("--config", config, "run configuration (JSON)")->required();
  syn->add_option("--noise", noise, "Gaussian noise standard deviation (K)");
  syn->add_option("--seed", seed, "noise seed");
  syn->add_option("--out", out, "output CSV path");

  auto* grad = app.add_subcommand("gradcheck", "compare sensitivity gradients with finite differences");
  grad->add_option("--config", config, "run configuration (JSON)")->required();
  grad->add_option("--data", data, "record CSV")->required();
  grad->add_option("--out", out, "output CSV path");
  add_ingest_flags(grad, flags);

  auto* plot = app.add_subcommand("plot", "plot-ready CSV and SVG from a trajectory or record CSV");
  plot->add_option("--trajectory", trajectory, "input CSV")->required();
  plot->add_option("--kind", kind, "plot kind")
      ->required()
      ->check(CLI::IsMember({"rate-vs-temp", "temp-vs-time"}));
  plot->add_option("--out", out, "output path stem (.csv and .svg are appended)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*fit) return cmd_fit(config, data, flags, out, quiet);
    if (*sim) return cmd_simulate(config, mode, oven_C, out);
    if (*syn) return cmd_synth(config, noise, seed, out);
    if (*grad) return cmd_gradcheck(config, data, flags, out);
    if (*plot) return cmd_plot(trajectory, kind, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "arcfit: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "arcfit: config error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputFileError& e) {
    std::cerr << "arcfit: " << e.what() << "\n";
    return kNoInput;
  } catch (const OutputFileError& e) {
    std::cerr << "arcfit: " << e.what() << "\n";
    return kCantCreate;
  } catch (const Error& e) {
    std::cerr << "arcfit: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
