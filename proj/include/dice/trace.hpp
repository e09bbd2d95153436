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

#ifndef DICE_TRACE_HPP_
#define DICE_TRACE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "dice/optimizers.hpp"

namespace dice {

// Column order of a persisted trace row. Header and order are frozen; the
// reader rejects anything else.
inline constexpr const char* kTraceCsvHeader =
    "t,loss,grad_norm,alpha_e,e_norm,clip_fraction,realized_batch";

struct TraceRow {
  std::size_t t = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double alpha_e = 1.0;
  double e_norm = 0.0;
  double clip_fraction = 0.0;
  std::size_t realized_batch = 0;
};

std::vector<TraceRow> rows_from_reports(const std::vector<StepReport>& reports);

// Serializes doubles with "%.17g" so that write -> read reproduces every
// value exactly. Writing is atomic: a temp file in the same directory is
// renamed over the target. Rows must be finite with t == row index.
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(const std::string& path);

// Atomic small-file write (temp + rename), used for JSON sidecars too.
void write_file_atomic(const std::string& path, const std::string& contents);

// Exact round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

// Suffix weights over a per-step contraction-factor sequence:
//   weight[t] = 1 - prod_{u = t+1}^{T-1} (1 - alpha_e[u]).
// The last weight is always the empty-product value 0. Factors outside
// (0, 1] are a data error.
std::vector<double> alpha_e_suffix_weights(const std::vector<double>& alpha_e);

struct WeightedSummary {
  double weighted_mean_sq_grad_norm = 0.0;  // sum_t w_t g_t^2 / sum_t w_t
  double final_sq_grad_norm = 0.0;          // g_{T-1}^2
  double weight_total = 0.0;
  bool last_weight_is_empty_product = true;  // weight[T-1] == 0 by definition
};

// Weighted average of squared gradient norms along a trace using the suffix
// weights above. A trace whose weights are all zero (e.g. a single-step
// trace) is a data error.
WeightedSummary weighted_grad_summary(const std::vector<TraceRow>& rows);

}  // namespace dice

#endif  // DICE_TRACE_HPP_
