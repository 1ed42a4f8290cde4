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


#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "arcfit/io.hpp"
#include "doctest.h"

using namespace arcfit;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "arcfit_test_cli";
const std::string kConfigs = ARCFIT_SOURCE_DIR "/configs/";

int run(const std::string& args) {
  const std::string cmd = std::string(ARCFIT_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string p(const std::string& name) { return (kWork / name).string(); }

struct Workdir {
  Workdir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~Workdir() { fs::remove_all(kWork); }
};

// Copy of a shipped config with a shorter training run.
std::string short_config(const std::string& name, int steps) {
  auto text = read_file(kConfigs + name);
  const std::string key = "\"steps\": 10000";
  text.replace(text.find(key), key.size(), "\"steps\": " + std::to_string(steps));
  const auto path = p("short_" + name);
  write_file(path, text);
  return path;
}

}  // namespace

TEST_CASE("usage and file errors map to exit codes") {
  Workdir w;
  CHECK(run("") == 64);
  CHECK(run("bogus") == 64);
  CHECK(run("simulate --config " + kConfigs + "two_stage.json --mode sideways") == 64);
  CHECK(run("simulate --config " + p("missing.json") + " --mode exotherm") == 66);
  write_file(p("bad.json"), R"({"cell": {}, "extra": 1})");
  CHECK(run("simulate --config " + p("bad.json") + " --mode exotherm") == 64);
  CHECK(run("simulate --config " + kConfigs + "two_stage.json --mode exotherm --out /proc/arcfit/x.csv") == 73);
}

TEST_CASE("synth, gradcheck, fit and simulate") {
  Workdir w;
  const auto truth = p("truth.csv");
  REQUIRE(run("synth --config " + kConfigs + "two_stage_truth.json --out " + truth) == 0);
  const auto text = read_file(truth);
  CHECK(text.find("# seed: ") != std::string::npos);
  CHECK(text.find("# config_sha256: ") != std::string::npos);
  const auto trace = ingest_csv(truth).trace;
  CHECK(trace.size() > 1000);

  CHECK(run("gradcheck --config " + kConfigs + "two_stage.json --data " + truth + " --out " +
            p("gc.csv")) == 0);
  CHECK(read_file(p("gc.csv")).find(",0\n") == std::string::npos);

  const auto cfg = short_config("two_stage.json", 40);
  REQUIRE(run("fit --quiet --config " + cfg + " --data " + truth + " --out " + p("fit_a")) == 0);
  REQUIRE(run("fit --quiet --config " + cfg + " --data " + truth + " --out " + p("fit_b")) == 0);
  CHECK(read_file(p("fit_a/fit_report.json")) == read_file(p("fit_b/fit_report.json")));
  CHECK(read_file(p("fit_a/fitted_parameters.csv")) == read_file(p("fit_b/fitted_parameters.csv")));

  for (const char* mode : {"exotherm", "hws", "oven"}) {
    CAPTURE(mode);
    const auto out = p(std::string("sim_") + mode + ".csv");
    REQUIRE(run("simulate --config " + kConfigs + "two_stage_truth.json --mode " + mode + " --out " + out) == 0);
    const auto t = parse_csv_table(read_file(out));
    CHECK(t.columns.at(0) == "time_s");
    CHECK(t.columns.at(1) == "temp_K");
    CHECK(t.columns.at(2) == "dTdt_K_per_s");
    CHECK(t.columns.at(3) == "c_1");
    CHECK(t.rows.size() > 10);
  }
  CHECK(parse_csv_table(read_file(p("sim_hws.csv"))).columns.back() == "phase");
  CHECK(run("plot --trajectory " + p("sim_hws.csv") + " --kind rate-vs-temp --out " + p("hws_plot")) == 0);
  CHECK(fs::exists(p("hws_plot.svg")));
}

TEST_CASE("plot of a constant trajectory") {
  Workdir w;
  write_file(p("flat.csv"), "time_s,temp_K\n0,400\n10,400\n20,400\n");
  REQUIRE(run("plot --trajectory " + p("flat.csv") + " --kind temp-vs-time --out " + p("flat_plot")) == 0);
  const auto in = parse_csv_table(read_file(p("flat.csv")));
  const auto out = parse_csv_table(read_file(p("flat_plot.csv")));
  CHECK(out.columns == in.columns);
  CHECK(out.rows == in.rows);
  const auto svg = read_file(p("flat_plot.svg"));
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("input_sha256: " + sha256_hex(read_file(p("flat.csv")))) != std::string::npos);
}
