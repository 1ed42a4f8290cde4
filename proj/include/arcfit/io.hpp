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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arcfit/errors.hpp"
#include "arcfit/ode.hpp"
#include "arcfit/trace.hpp"

namespace arcfit {

/// A file could not be read (missing, unreadable, or malformed content).
class InputFileError : public Error {
 public:
  using Error::Error;
};

/// An output file could not be created or written.
class OutputFileError : public Error {
 public:
  using Error::Error;
};

enum class TemperatureUnit : std::uint8_t { Celsius, Kelvin };
enum class TimeUnit : std::uint8_t { Seconds, Minutes };

struct ColumnMap {
  std::string time = "time_s";
  std::string temperature = "temp_C";
  std::string rate = "rate_C_per_min";  // optional column; degrees per minute
};

struct CsvUnits {
  TemperatureUnit temperature = TemperatureUnit::Celsius;
  TimeUnit time = TimeUnit::Seconds;
};

struct IngestResult {
  ArcTrace trace;
  std::size_t dropped_rows = 0;  // rows with non-finite values
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Parses an ArcTrace CSV; `#` lines are comments. Errors name the row and column.
IngestResult parse_trace_csv(std::string_view text, const ColumnMap& columns = {},
                             const CsvUnits& units = {});
IngestResult ingest_csv(const std::filesystem::path& path, const ColumnMap& columns = {},
                        const CsvUnits& units = {});

/// `time_s,temp_C[,rate_C_per_min]` with `# key: value` header lines.
std::string trace_csv(const ArcTrace& trace,
                      const std::vector<std::pair<std::string, std::string>>& header = {});
void export_csv(const ArcTrace& trace, const std::filesystem::path& path,
                const std::vector<std::pair<std::string, std::string>>& header = {});

/// Header lines describing a trace's provenance.
std::vector<std::pair<std::string, std::string>> provenance_lines(const Provenance& p);

/// `time_s,temp_K,dTdt_K_per_s,c_1,...,c_N`, one row per step point.
std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<std::pair<std::string, std::string>>& header = {},
                           const std::vector<std::string>& extra_names = {},
                           const std::vector<std::vector<std::string>>& extra_values = {});

/// Numeric table with a header row; `#` comment lines are kept aside. Columns whose first
/// value is not a number are label columns and read as NaN.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::uint8_t> text;  // 1 for label columns
  std::vector<std::vector<double>> rows;

  /// Column index, or nullopt.
  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<double> column(std::size_t index) const;
};

CsvTable parse_csv_table(std::string_view text);

}  // namespace arcfit
