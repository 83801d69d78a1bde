// Copyright 2026 The contactig Authors
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

// Measured (or simulated) position/force time series and its CSV form:
//   t,q1,f[,q2,mode_id]
// in SI units, 17 significant digits.

#ifndef CONTACTIG_TRACE_HPP_
#define CONTACTIG_TRACE_HPP_

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "contactig/errors.hpp"

namespace contactig {

struct Trace {
  std::vector<double> t;
  std::vector<double> q1;
  std::vector<double> f;
  std::optional<std::vector<double>> q2;
  std::optional<std::vector<int>> mode_id;

  std::size_t size() const { return t.size(); }

  double sample_period() const {
    validate();
    return (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  }

  void validate() const {
    const std::size_t n = t.size();
    if (n < 2) throw ArgumentError("Trace: need at least 2 samples");
    if (q1.size() != n || f.size() != n || (q2 && q2->size() != n) ||
        (mode_id && mode_id->size() != n)) {
      throw ArgumentError("Trace: columns have different lengths");
    }
    const double ts = (t.back() - t.front()) / static_cast<double>(n - 1);
    if (!(ts > 0.0)) throw ArgumentError("Trace: time is not increasing");
    for (std::size_t i = 1; i < n; ++i) {
      const double dt = t[i] - t[i - 1];
      if (!(dt > 0.0)) {
        throw ArgumentError("Trace: time not strictly increasing at row " +
                            std::to_string(i));
      }
      // jitter is judged against the absolute time stamp, which is what
      // 17-digit CSV round trips preserve
      if (std::abs(t[i] - (t.front() + static_cast<double>(i) * ts)) >
          1e-9 * std::max(std::abs(t[i]), ts)) {
        throw ArgumentError("Trace: non-uniform sampling at row " +
                            std::to_string(i));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(t[i]) || !std::isfinite(q1[i]) ||
          !std::isfinite(f[i]) || (q2 && !std::isfinite((*q2)[i]))) {
        throw ArgumentError("Trace: non-finite value at row " +
                            std::to_string(i));
      }
    }
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    cells.push_back(cell);
  }
  return cells;
}

inline double parse_double(const std::string& s, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ArgumentError("Trace CSV: bad number '" + s + "' on line " +
                        std::to_string(row));
  }
  return v;
}

}  // namespace detail

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  trace.validate();
  os << "t,q1,f";
  if (trace.q2) os << ",q2";
  if (trace.mode_id) os << ",mode_id";
  os << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << detail::format_double(trace.t[i]) << ','
       << detail::format_double(trace.q1[i]) << ','
       << detail::format_double(trace.f[i]);
    if (trace.q2) os << ',' << detail::format_double((*trace.q2)[i]);
    if (trace.mode_id) os << ',' << (*trace.mode_id)[i];
    os << '\n';
  }
}

inline void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  write_trace_csv(os, trace);
}

inline Trace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("Trace CSV: empty input");
  const std::vector<std::string> header = detail::split_csv_line(line);
  const bool has_q2 = header.size() >= 4 && header[3] == "q2";
  const bool has_mode = (header.size() == 4 && header[3] == "mode_id") ||
                        (header.size() == 5 && header[4] == "mode_id");
  const std::size_t want = 3 + (has_q2 ? 1 : 0) + (has_mode ? 1 : 0);
  if (header.size() < 3 || header[0] != "t" || header[1] != "q1" ||
      header[2] != "f" || header.size() != want) {
    throw ArgumentError("Trace CSV: header must be t,q1,f[,q2][,mode_id], got '" +
                        line + "'");
  }
  Trace trace;
  if (has_q2) trace.q2.emplace();
  if (has_mode) trace.mode_id.emplace();
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != want) {
      throw ArgumentError("Trace CSV: line " + std::to_string(row) + " has " +
                          std::to_string(cells.size()) + " fields, expected " +
                          std::to_string(want));
    }
    trace.t.push_back(detail::parse_double(cells[0], row));
    trace.q1.push_back(detail::parse_double(cells[1], row));
    trace.f.push_back(detail::parse_double(cells[2], row));
    std::size_t col = 3;
    if (has_q2) trace.q2->push_back(detail::parse_double(cells[col++], row));
    if (has_mode) {
      const double id = detail::parse_double(cells[col], row);
      if (id != std::floor(id) || id < 0) {
        throw ArgumentError("Trace CSV: mode_id must be a nonnegative integer on line " +
                            std::to_string(row));
      }
      trace.mode_id->push_back(static_cast<int>(id));
    }
  }
  trace.validate();
  return trace;
}

inline Trace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot open trace file '" + path + "'");
  return read_trace_csv(is);
}

}  // namespace contactig

#endif  // CONTACTIG_TRACE_HPP_
