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

#include <string>
#include <vector>

#include "arcfit/config.hpp"
#include "arcfit/linfit.hpp"
#include "arcfit/trainer.hpp"

namespace arcfit {

/// Hashes and seed stamped into every output file.
struct RunProvenance {
  std::string data_sha256;
  std::string config_sha256;
  std::uint64_t seed = 0;

  std::vector<std::pair<std::string, std::string>> lines() const;
};

/// Part of the data the loss sees: the partition window or the whole record.
ArcTrace loss_window(const RunConfig& config, const ArcTrace& data);

struct FitOutcome {
  ReactionSystem initial;
  std::vector<StageInit> linear;  // empty for given initialization
  FitResult result;
  ArcTrace window;
  double initial_rmse = 0.0;  // K over the window
  double final_rmse = 0.0;
};

/// Linear-fit (or given) initialization followed by training.
FitOutcome run_fit(const RunConfig& config, const ArcTrace& data, const StepObserver& observer = {});

/// JSON report; numbers only depend on config, data and seed.
std::string fit_report_json(const RunConfig& config, const FitOutcome& outcome,
                            const RunProvenance& provenance);

/// `stage,method,IC,A_per_s,Ea_J,h_J,m,n` for the initial and trained rows.
std::string fitted_parameters_csv(const FitOutcome& outcome, const RunProvenance& provenance);

struct GradCheckRow {
  std::string label;
  double ad = 0.0;
  double fd = 0.0;
  double rel_error = 0.0;  // |ad - fd| / max(|fd|, floor)
  bool ok = false;
};

/// AD gradient at the configured check tolerance against the finite-difference oracle, at the
/// configured stage values, for every trainable entry.
std::vector<GradCheckRow> gradient_check(const RunConfig& config, const ArcTrace& data);

std::string gradcheck_csv(const std::vector<GradCheckRow>& rows, const RunProvenance& provenance);

}  // namespace arcfit
