// Copyright 2026 The dice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dice/trace.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dice/errors.hpp"

namespace dice {
namespace {

double parse_double(const std::string& cell, const std::string& path,
                    std::size_t lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw DataError("trace " + path + ": bad numeric field '" + cell +
                    "' at line " + std::to_string(lineno));
  }
}

std::size_t parse_index(const std::string& cell, const std::string& path,
                        std::size_t lineno) {
  const double v = parse_double(cell, path, lineno);
  if (v < 0.0 || v != std::floor(v)) {
    throw DataError("trace " + path + ": expected integer field at line " +
                    std::to_string(lineno));
  }
  return static_cast<std::size_t>(v);
}

void check_row_finite(const TraceRow& r) {
  if (!std::isfinite(r.loss) || !std::isfinite(r.grad_norm) ||
      !std::isfinite(r.alpha_e) || !std::isfinite(r.e_norm) ||
      !std::isfinite(r.clip_fraction)) {
    throw NumericalError("trace row " + std::to_string(r.t) +
                         " has a non-finite field");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<TraceRow> rows_from_reports(
    const std::vector<StepReport>& reports) {
  std::vector<TraceRow> rows;
  rows.reserve(reports.size());
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const StepReport& s = reports[t];
    rows.push_back(TraceRow{t, s.loss, s.grad_norm, s.alpha_e, s.e_norm,
                            s.clip_fraction, s.realized_batch});
  }
  return rows;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw DataError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);  // atomic within a filesystem
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << kTraceCsvHeader << "\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const TraceRow& r = rows[t];
    if (r.t != t) {
      throw DataError("write_trace_csv: row " + std::to_string(t) +
                      " carries step index " + std::to_string(r.t));
    }
    check_row_finite(r);
    out << r.t << ',' << format_double(r.loss) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.alpha_e)
        << ',' << format_double(r.e_norm) << ','
        << format_double(r.clip_fraction) << ',' << r.realized_batch << "\n";
  }
  write_file_atomic(path, out.str());
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("read_trace_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw DataError("read_trace_csv: " + path + " has a wrong header");
  }
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) {
      throw DataError("read_trace_csv: " + path + " line " +
                      std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " fields, want 7");
    }
    TraceRow r;
    r.t = parse_index(cells[0], path, lineno);
    r.loss = parse_double(cells[1], path, lineno);
    r.grad_norm = parse_double(cells[2], path, lineno);
    r.alpha_e = parse_double(cells[3], path, lineno);
    r.e_norm = parse_double(cells[4], path, lineno);
    r.clip_fraction = parse_double(cells[5], path, lineno);
    r.realized_batch = parse_index(cells[6], path, lineno);
    if (r.t != rows.size()) {
      throw DataError("read_trace_csv: " + path + " line " +
                      std::to_string(lineno) + " breaks the step sequence");
    }
    check_row_finite(r);
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> alpha_e_suffix_weights(
    const std::vector<double>& alpha_e) {
  for (double a : alpha_e) {
    if (!(a > 0.0) || a > 1.0) {
      throw DataError(
          "alpha_e_suffix_weights: factors must lie in (0, 1], got " +
          format_double(a));
    }
  }
  const std::size_t T = alpha_e.size();
  std::vector<double> weights(T, 0.0);
  if (T == 0) return weights;
  // Suffix products accumulate from the tail; the final weight stays at the
  // empty-product value 0.
  double suffix = 1.0;
  weights[T - 1] = 0.0;
  for (std::size_t k = T - 1; k-- > 0;) {
    suffix *= 1.0 - alpha_e[k + 1];
    weights[k] = 1.0 - suffix;
  }
  return weights;
}

WeightedSummary weighted_grad_summary(const std::vector<TraceRow>& rows) {
  if (rows.empty()) {
    throw DataError("weighted_grad_summary: empty trace");
  }
  std::vector<double> alpha(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) alpha[t] = rows[t].alpha_e;
  const std::vector<double> weights = alpha_e_suffix_weights(alpha);
  double wsum = 0.0;
  double acc = 0.0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    wsum += weights[t];
    acc += weights[t] * rows[t].grad_norm * rows[t].grad_norm;
  }
  if (wsum == 0.0) {
    throw DataError(
        "weighted_grad_summary: all weights are zero (degenerate trace)");
  }
  WeightedSummary s;
  s.weighted_mean_sq_grad_norm = acc / wsum;
  const double g = rows.back().grad_norm;
  s.final_sq_grad_norm = g * g;
  s.weight_total = wsum;
  s.last_weight_is_empty_product = true;
  return s;
}

}  // namespace dice
