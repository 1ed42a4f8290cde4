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

#include "arcfit/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace arcfit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Lines with their 1-based numbers.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t n = 0, start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++n;
    out.emplace_back(n, text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

// nullopt for empty or non-finite fields; throws on text that is not a number.
std::optional<double> parse_number(std::string_view field, std::size_t line, std::string_view column) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = field.data();
  if (*first == '+') ++first;
  const auto r = std::from_chars(first, field.data() + field.size(), v);
  if (r.ec == std::errc::result_out_of_range) return std::nullopt;
  if (r.ec != std::errc() || r.ptr != field.data() + field.size())
    throw InputFileError("line " + std::to_string(line) + ", column '" + std::string(column) +
                         "': not a number: '" + std::string(field) + "'");
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

// First-row test for label columns such as the HWS phase.
bool looks_numeric(std::string_view field) {
  double v = 0.0;
  const char* first = field.data() + (field.front() == '+' ? 1 : 0);
  const auto r = std::from_chars(first, field.data() + field.size(), v);
  return r.ptr == field.data() + field.size();
}

std::string header_block(const std::vector<std::pair<std::string, std::string>>& header) {
  std::string out;
  for (const auto& [k, v] : header) out += "# " + k + ": " + v + "\n";
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFileError("cannot open " + path.string());
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw InputFileError("cannot read " + path.string());
  return s;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputFileError("cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw OutputFileError("cannot write " + path.string());
}

std::optional<std::size_t> CsvTable::find(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> CsvTable::column(std::size_t index) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(index));
  return out;
}

CsvTable parse_csv_table(std::string_view text) {
  CsvTable t;
  bool have_header = false;
  for (const auto& [no, raw] : lines_of(text)) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.emplace_back(trim(line.substr(1)));
      continue;
    }
    const auto fields = split(line);
    if (!have_header) {
      for (auto f : fields) t.columns.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != t.columns.size())
      throw InputFileError("line " + std::to_string(no) + ": expected " +
                           std::to_string(t.columns.size()) + " fields, found " +
                           std::to_string(fields.size()));
    if (t.text.empty()) t.text.assign(t.columns.size(), 0);
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (t.rows.empty() && !fields[c].empty() && !looks_numeric(fields[c])) t.text[c] = 1;
      row.push_back(t.text[c] ? std::nan("")
                              : parse_number(fields[c], no, t.columns[c]).value_or(std::nan("")));
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw InputFileError("empty file: no header row");
  return t;
}

IngestResult parse_trace_csv(std::string_view text, const ColumnMap& columns, const CsvUnits& units) {
  std::vector<std::string> header;
  std::size_t it = 0, iT = 0;
  std::optional<std::size_t> ir;
  IngestResult res;
  auto& tr = res.trace;
  ExperimentalSource src;
  bool have_header = false;
  const double time_scale = units.time == TimeUnit::Minutes ? 60.0 : 1.0;
  const double T_offset = units.temperature == TemperatureUnit::Celsius ? 273.15 : 0.0;
  std::vector<double> rates;
  std::size_t prev_line = 0;

  for (const auto& [no, raw] : lines_of(text)) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') continue;
    const auto fields = split(line);
    if (!have_header) {
      for (auto f : fields) header.emplace_back(f);
      auto locate = [&](const std::string& name) -> std::optional<std::size_t> {
        const auto p = std::find(header.begin(), header.end(), name);
        if (p == header.end()) return std::nullopt;
        return static_cast<std::size_t>(p - header.begin());
      };
      auto require = [&](const std::string& name) {
        const auto i = locate(name);
        if (!i) {
          std::string have;
          for (const auto& h : header) have += (have.empty() ? "" : ", ") + h;
          throw InputFileError("line " + std::to_string(no) + ": missing column '" + name +
                               "' (header has: " + have + ")");
        }
        return *i;
      };
      it = require(columns.time);
      iT = require(columns.temperature);
      if (!columns.rate.empty()) ir = locate(columns.rate);
      have_header = true;
      continue;
    }
    if (fields.size() != header.size())
      throw InputFileError("line " + std::to_string(no) + ": expected " +
                           std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    const auto t = parse_number(fields[it], no, header[it]);
    const auto T = parse_number(fields[iT], no, header[iT]);
    std::optional<double> r;
    if (ir) r = parse_number(fields[*ir], no, header[*ir]);
    if (!t || !T || (ir && !r)) {
      ++res.dropped_rows;
      continue;
    }
    const double ts = *t * time_scale;
    if (!tr.times.empty()) {
      if (ts == tr.times.back())
        throw InputFileError("line " + std::to_string(no) + ": duplicate timestamp " +
                             format_double(*t) + " (also on line " + std::to_string(prev_line) + ")");
      if (ts < tr.times.back())
        throw InputFileError("line " + std::to_string(no) + ", column '" + header[it] +
                             "': time decreases from line " + std::to_string(prev_line));
    }
    tr.times.push_back(ts);
    tr.temperatures.push_back(*T + T_offset);
    if (ir) rates.push_back(*r / 60.0);
    prev_line = no;
  }
  if (!have_header) throw InputFileError("empty file: no header row");
  if (tr.times.empty()) throw InputFileError("no data rows");
  if (ir) tr.rates = std::move(rates);
  tr.provenance = src;
  return res;
}

IngestResult ingest_csv(const std::filesystem::path& path, const ColumnMap& columns,
                        const CsvUnits& units) {
  const auto text = read_file(path);
  IngestResult res;
  try {
    res = parse_trace_csv(text, columns, units);
  } catch (const InputFileError& e) {
    throw InputFileError(path.string() + ": " + e.what());
  }
  ExperimentalSource src;
  src.path = path.string();
  src.sha256 = sha256_hex(text);
  res.trace.provenance = src;
  return res;
}

std::vector<std::pair<std::string, std::string>> provenance_lines(const Provenance& p) {
  std::vector<std::pair<std::string, std::string>> out;
  if (const auto* e = std::get_if<ExperimentalSource>(&p)) {
    out.emplace_back("source", "experimental");
    if (!e->path.empty()) out.emplace_back("path", e->path);
    if (!e->sha256.empty()) out.emplace_back("sha256", e->sha256);
  } else if (const auto* s = std::get_if<SyntheticSource>(&p)) {
    out.emplace_back("source", "synthetic");
    out.emplace_back("seed", std::to_string(s->seed));
    for (const auto& kv : s->generator) out.push_back(kv);
  }
  return out;
}

std::string trace_csv(const ArcTrace& trace,
                      const std::vector<std::pair<std::string, std::string>>& header) {
  std::string out = header_block(header);
  const bool rates = trace.rates.has_value();
  out += rates ? "time_s,temp_C,rate_C_per_min\n" : "time_s,temp_C\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_double(trace.times[i]);
    out += ',';
    out += format_double(trace.temperatures[i] - 273.15);
    if (rates) {
      out += ',';
      out += format_double((*trace.rates)[i] * 60.0);
    }
    out += '\n';
  }
  return out;
}

void export_csv(const ArcTrace& trace, const std::filesystem::path& path,
                const std::vector<std::pair<std::string, std::string>>& header) {
  write_file(path, trace_csv(trace, header));
}

std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<std::pair<std::string, std::string>>& header,
                           const std::vector<std::string>& extra_names,
                           const std::vector<std::vector<std::string>>& extra_values) {
  std::string out = header_block(header);
  const std::size_t n = traj.dimension() - 1;
  out += "time_s,temp_K,dTdt_K_per_s";
  for (std::size_t i = 0; i < n; ++i) out += ",c_" + std::to_string(i + 1);
  for (const auto& e : extra_names) out += "," + e;
  out += '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto y = traj.state(k);
    out += format_double(traj.time(k));
    out += ',';
    out += format_double(y[n]);
    out += ',';
    out += format_double(traj.derivative(k)[n]);
    for (std::size_t i = 0; i < n; ++i) {
      out += ',';
      out += format_double(y[i]);
    }
    for (const auto& col : extra_values) {
      out += ',';
      out += col.at(k);
    }
    out += '\n';
  }
  return out;
}

}  // namespace arcfit
