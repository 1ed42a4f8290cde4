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

#include "arcfit/config.hpp"

#include <algorithm>
#include <initializer_list>

#include "json.hpp"

namespace arcfit {

namespace {

using json = nlohmann::json;

// Strict view of one JSON object: every key must be consumed by a getter.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ConfigError(at(key), "unknown key");
    }
  }

  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  bool has(std::string_view key) const { return j_.contains(key); }
  const json& raw(std::string_view key) const { return j_.at(std::string(key)); }

  void number(std::string_view key, double& out) const {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(at(key), "expected a finite number");
  }
  void number(std::string_view key, std::optional<double>& out) const {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    out = v;
  }
  template <typename Int>
  void count(std::string_view key, Int& out) const {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError(at(key), "expected a non-negative integer");
    out = static_cast<Int>(v.get<unsigned long long>());
  }
  std::optional<std::string> text(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

void positive(const Section& s, std::string_view key, double v) {
  if (!(v > 0.0)) throw ConfigError(s.at(key), "must be positive");
}

// Turns domain validation failures into errors that carry the section path.
template <typename F>
void checked(const std::string& where, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
}

StageKinetics placeholder(const StageConfig& s) {
  StageKinetics k;
  k.freq_factor = s.freq_factor.value_or(1.0);
  k.activation_energy = s.activation_energy.value_or(1e-19);
  k.enthalpy = s.enthalpy.value_or(0.0);
  k.order_m = s.order_m;
  k.order_n = s.order_n;
  k.c0 = s.c0;
  k.direction = s.order_m > 0.0 ? Direction::Converting : Direction::Consuming;
  return k;
}

}  // namespace

ReactionSystem RunConfig::system() const {
  ReactionSystem sys;
  sys.cell = cell;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const std::string where = "stages[" + std::to_string(i) + "]";
    if (!s.freq_factor) throw ConfigError(where + ".A_per_s", "required here");
    if (!s.activation_energy) throw ConfigError(where + ".Ea_J", "required here");
    if (!s.enthalpy) throw ConfigError(where + ".h_J", "required here");
    sys.stages.push_back(placeholder(s));
  }
  checked("stages", [&] { sys.validate(); });
  return sys;
}

std::vector<StageOrders> RunConfig::orders() const {
  std::vector<StageOrders> out;
  for (const auto& s : stages)
    out.push_back({s.order_m, s.order_n, s.c0,
                   s.order_m > 0.0 ? Direction::Converting : Direction::Consuming});
  return out;
}

std::vector<std::uint8_t> RunConfig::mask() const {
  std::vector<StageKinetics> ks;
  for (const auto& s : stages) ks.push_back(placeholder(s));
  auto mask = ParamVector::default_mask(ks);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (!stages[i].train) continue;
    for (std::size_t k = 0; k < kParamsPerStage; ++k) mask[i * kParamsPerStage + k] = 0;
    for (const auto& name : *stages[i].train) {
      static constexpr std::pair<std::string_view, ParamKind> kNames[] = {
          {"A", ParamKind::LogA}, {"Ea", ParamKind::LogEa}, {"h", ParamKind::LogH},
          {"m", ParamKind::OrderM}, {"n", ParamKind::OrderN}};
      const auto hit = std::find_if(std::begin(kNames), std::end(kNames),
                                    [&](const auto& p) { return p.first == name; });
      mask[ParamVector::offset(i, hit->second)] = 1;
    }
  }
  return mask;
}

StagePartition RunConfig::partition() const {
  if (boundaries_C.empty()) throw ConfigError("boundaries_C", "required here");
  return StagePartition::from_celsius(boundaries_C);
}

Tolerances RunConfig::tolerances() const { return train.loss.tolerances_for(stages.size()); }

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  const Section top(root, "",
                    {"cell", "stages", "boundaries_C", "init", "loss", "train", "integrator",
                     "simulate", "hws", "synth", "radial", "gradcheck", "output_dir"});
  RunConfig c;

  if (!top.has("cell")) throw ConfigError("cell", "required");
  {
    const Section s(top.raw("cell"), "cell",
                    {"mass_kg", "specific_heat_J_per_kgK", "surface_area_m2", "emissivity",
                     "conv_coeff_W_per_m2K"});
    s.number("mass_kg", c.cell.mass);
    s.number("specific_heat_J_per_kgK", c.cell.specific_heat);
    s.number("surface_area_m2", c.cell.surface_area);
    s.number("emissivity", c.cell.emissivity);
    s.number("conv_coeff_W_per_m2K", c.cell.conv_coeff);
    checked("cell", [&] { c.cell.validate(); });
  }

  if (!top.has("stages")) throw ConfigError("stages", "required");
  const auto& stages = top.raw("stages");
  if (!stages.is_array() || stages.empty())
    throw ConfigError("stages", "expected a non-empty array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string where = "stages[" + std::to_string(i) + "]";
    const Section s(stages[i], where, {"A_per_s", "Ea_J", "h_J", "m", "n", "c0", "train"});
    StageConfig st;
    s.number("A_per_s", st.freq_factor);
    s.number("Ea_J", st.activation_energy);
    s.number("h_J", st.enthalpy);
    s.number("m", st.order_m);
    s.number("n", st.order_n);
    s.number("c0", st.c0);
    if (st.freq_factor) positive(s, "A_per_s", *st.freq_factor);
    if (st.activation_energy) positive(s, "Ea_J", *st.activation_energy);
    if (st.enthalpy) positive(s, "h_J", *st.enthalpy);
    if (st.order_m < 0.0) throw ConfigError(s.at("m"), "must be >= 0");
    if (st.order_n < 0.0) throw ConfigError(s.at("n"), "must be >= 0");
    if (!(st.c0 >= 0.0 && st.c0 <= 1.0)) throw ConfigError(s.at("c0"), "must lie in [0, 1]");
    if (s.has("train")) {
      const auto& t = s.raw("train");
      if (!t.is_array()) throw ConfigError(s.at("train"), "expected an array of names");
      std::vector<std::string> names;
      for (std::size_t k = 0; k < t.size(); ++k) {
        const std::string w = s.at("train") + "[" + std::to_string(k) + "]";
        if (!t[k].is_string()) throw ConfigError(w, "expected a string");
        const auto name = t[k].get<std::string>();
        if (name != "A" && name != "Ea" && name != "h" && name != "m" && name != "n")
          throw ConfigError(w, "unknown parameter '" + name + "' (A, Ea, h, m, n)");
        if (name == "m" && !(st.order_m > 0.0))
          throw ConfigError(w, "m is trainable only for converting stages (m > 0)");
        names.push_back(name);
      }
      st.train = std::move(names);
    }
    c.stages.push_back(std::move(st));
  }

  if (top.has("boundaries_C")) {
    const auto& b = top.raw("boundaries_C");
    if (!b.is_array()) throw ConfigError("boundaries_C", "expected an array");
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!b[k].is_number())
        throw ConfigError("boundaries_C[" + std::to_string(k) + "]", "expected a number");
      c.boundaries_C.push_back(b[k].get<double>());
    }
    if (c.boundaries_C.size() != c.stages.size() + 1)
      throw ConfigError("boundaries_C", "expected " + std::to_string(c.stages.size() + 1) +
                                            " values for " + std::to_string(c.stages.size()) +
                                            " stages");
    checked("boundaries_C", [&] { c.partition().validate(); });
  }

  if (top.has("init")) {
    const Section s(top.raw("init"), "init",
                    {"method", "rate_window", "min_r_squared", "monotone_slack_K"});
    if (const auto m = s.text("method")) {
      if (*m == "linear") c.init_method = InitMethod::Linear;
      else if (*m == "given") c.init_method = InitMethod::Given;
      else throw ConfigError(s.at("method"), "expected 'linear' or 'given'");
    }
    s.count("rate_window", c.init.rate_window);
    s.number("min_r_squared", c.init.min_r_squared);
    s.number("monotone_slack_K", c.init.monotone_slack);
    if (c.init.rate_window < 3 || c.init.rate_window % 2 == 0)
      throw ConfigError(s.at("rate_window"), "must be odd and >= 3");
    if (c.init.monotone_slack < 0.0) throw ConfigError(s.at("monotone_slack_K"), "must be >= 0");
  }
  if (c.init_method == InitMethod::Given) checked("stages", [&] { (void)c.system(); });
  if (c.init_method == InitMethod::Linear && c.boundaries_C.empty())
    throw ConfigError("boundaries_C", "required for linear initialization");

  if (top.has("loss")) {
    const Section s(top.raw("loss"), "loss", {"window"});
    if (const auto w = s.text("window")) {
      if (*w == "partition") c.loss_window = LossWindow::Partition;
      else if (*w == "full") c.loss_window = LossWindow::Full;
      else throw ConfigError(s.at("window"), "expected 'partition' or 'full'");
    }
  }
  if (c.loss_window == LossWindow::Partition && c.boundaries_C.empty())
    throw ConfigError("boundaries_C", "required for the partition loss window");

  if (top.has("train")) {
    const Section s(top.raw("train"), "train",
                    {"steps", "lr0", "decay_factor", "decay_every", "beta1", "beta2", "epsilon",
                     "seed", "max_halvings", "early_stop_window", "early_stop_delta"});
    s.count("steps", c.train.steps);
    s.number("lr0", c.train.lr0);
    s.number("decay_factor", c.train.decay_factor);
    s.count("decay_every", c.train.decay_every);
    s.number("beta1", c.train.beta1);
    s.number("beta2", c.train.beta2);
    s.number("epsilon", c.train.epsilon);
    s.count("seed", c.train.seed);
    s.count("max_halvings", c.train.max_halvings);
    if (s.has("early_stop_window")) {
      std::size_t w = 0;
      s.count("early_stop_window", w);
      c.train.early_stop_window = w;
    }
    s.number("early_stop_delta", c.train.early_stop_delta);
  }
  checked("train", [&] { c.train.validate(); });

  {
    double rtol = 1e-6, atol_c = 1e-9, atol_T = 1e-6;
    if (top.has("integrator")) {
      const Section s(top.raw("integrator"), "integrator", {"rtol", "atol_c", "atol_T", "max_steps"});
      s.number("rtol", rtol);
      s.number("atol_c", atol_c);
      s.number("atol_T", atol_T);
      s.count("max_steps", c.train.loss.integrate.max_steps);
      if (!(rtol > 0.0 && rtol < 1.0)) throw ConfigError(s.at("rtol"), "must lie in (0, 1)");
      positive(s, "atol_c", atol_c);
      positive(s, "atol_T", atol_T);
      if (c.train.loss.integrate.max_steps == 0) throw ConfigError(s.at("max_steps"), "must be >= 1");
    }
    c.train.loss.tol = Tolerances::for_thermal(c.stages.size(), rtol, atol_c, atol_T);
  }

  if (top.has("simulate")) {
    const Section s(top.raw("simulate"), "simulate", {"T0_C", "t_end_s", "oven_temp_C"});
    double T0_C = c.T0 - 273.15;
    s.number("T0_C", T0_C);
    c.T0 = T0_C + 273.15;
    s.number("t_end_s", c.t_end);
    std::optional<double> oven;
    s.number("oven_temp_C", oven);
    if (oven) c.oven_temperature = *oven + 273.15;
    if (!(c.T0 > 0.0)) throw ConfigError(s.at("T0_C"), "below absolute zero");
    positive(s, "t_end_s", c.t_end);
    if (c.oven_temperature && !(*c.oven_temperature > 0.0))
      throw ConfigError(s.at("oven_temp_C"), "below absolute zero");
  }

  if (top.has("hws")) {
    const Section s(top.raw("hws"), "hws",
                    {"start_C", "step_K", "wait_s", "seek_s", "threshold_K_per_min",
                     "heating_K_per_min"});
    double start_C = c.hws.start_temperature - 273.15;
    double thr = c.hws.exotherm_threshold * 60.0, heat = c.hws.heating_rate * 60.0;
    s.number("start_C", start_C);
    s.number("step_K", c.hws.step_increment);
    s.number("wait_s", c.hws.wait_duration);
    s.number("seek_s", c.hws.seek_duration);
    s.number("threshold_K_per_min", thr);
    s.number("heating_K_per_min", heat);
    c.hws.start_temperature = start_C + 273.15;
    c.hws.exotherm_threshold = thr / 60.0;
    c.hws.heating_rate = heat / 60.0;
    checked("hws", [&] { c.hws.validate(); });
  }

  c.synth.T0 = c.T0;
  c.synth.t_end = c.t_end;
  c.synth.hws = c.hws;
  if (top.has("synth")) {
    const Section s(top.raw("synth"), "synth",
                    {"mode", "noise_K", "sample_dt_s", "seed", "T0_C", "t_end_s"});
    if (const auto m = s.text("mode")) {
      if (*m == "adiabatic") c.synth.mode = SynthMode::Adiabatic;
      else if (*m == "hws") c.synth.mode = SynthMode::Hws;
      else throw ConfigError(s.at("mode"), "expected 'adiabatic' or 'hws'");
    }
    s.number("noise_K", c.synth.noise_std);
    s.number("sample_dt_s", c.synth.sample_dt);
    s.count("seed", c.synth.seed);
    double T0_C = c.synth.T0 - 273.15;
    s.number("T0_C", T0_C);
    c.synth.T0 = T0_C + 273.15;
    s.number("t_end_s", c.synth.t_end);
    if (c.synth.noise_std < 0.0) throw ConfigError(s.at("noise_K"), "must be >= 0");
    positive(s, "sample_dt_s", c.synth.sample_dt);
    positive(s, "t_end_s", c.synth.t_end);
    if (!(c.synth.T0 > 0.0)) throw ConfigError(s.at("T0_C"), "below absolute zero");
  }

  if (top.has("radial")) {
    const Section s(top.raw("radial"), "radial",
                    {"conductivity_W_per_mK", "jellyroll_nodes", "can_nodes", "dt_s",
                     "output_every_s"});
    s.number("conductivity_W_per_mK", c.radial_conductivity);
    s.count("jellyroll_nodes", c.jellyroll_nodes);
    s.count("can_nodes", c.can_nodes);
    s.number("dt_s", c.radial.dt);
    s.number("output_every_s", c.radial.output_every);
    positive(s, "conductivity_W_per_mK", c.radial_conductivity);
    if (c.jellyroll_nodes == 0) throw ConfigError(s.at("jellyroll_nodes"), "must be >= 1");
    if (c.can_nodes == 0) throw ConfigError(s.at("can_nodes"), "must be >= 1");
    positive(s, "dt_s", c.radial.dt);
    if (!(c.radial.output_every >= c.radial.dt))
      throw ConfigError(s.at("output_every_s"), "must be >= dt_s");
  }

  if (top.has("gradcheck")) {
    const Section s(top.raw("gradcheck"), "gradcheck", {"h_rel", "rtol", "tolerance", "floor"});
    s.number("h_rel", c.gradcheck_h_rel);
    s.number("rtol", c.gradcheck_rtol);
    s.number("tolerance", c.gradcheck_tolerance);
    s.number("floor", c.gradcheck_floor);
    if (!(c.gradcheck_h_rel >= 1e-7 && c.gradcheck_h_rel <= 1e-2))
      throw ConfigError(s.at("h_rel"), "must lie in [1e-7, 1e-2]");
    if (!(c.gradcheck_rtol > 0.0 && c.gradcheck_rtol < 1.0))
      throw ConfigError(s.at("rtol"), "must lie in (0, 1)");
    positive(s, "tolerance", c.gradcheck_tolerance);
    positive(s, "floor", c.gradcheck_floor);
  }

  if (const auto dir = top.text("output_dir")) c.output_dir = *dir;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return parse_config(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + (e.where().empty() ? "" : ": " + e.where()), e.detail());
  }
}

}  // namespace arcfit
