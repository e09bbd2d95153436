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

#ifndef DICE_HARNESS_HPP_
#define DICE_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dice/accountant.hpp"
#include "dice/optimizers.hpp"
#include "dice/problem.hpp"
#include "dice/trace.hpp"

namespace dice {

using Json = nlohmann::json;

// Problem construction recipe. `kind` selects which fields apply:
//   "counterexample":      threshold
//   "quadratic":           dim, n, condition, spread, data_seed
//   "synthetic_logistic":  dim, n, separation, data_seed
//   "csv":                 csv_path
struct ProblemConfig {
  std::string kind = "quadratic";
  double threshold = 1.0;
  std::size_t dim = 1;
  std::size_t n = 1;
  double condition = 1.0;
  double spread = 0.0;
  double separation = 1.0;
  std::uint64_t data_seed = 20177;
  std::string csv_path;
};

std::unique_ptr<Problem> build_problem(const ProblemConfig& cfg);

// Full experiment recipe. When `budget` is present, sigma1 is computed by
// the accountant and may not be hand-set in the config. For dpsgd_gc, sigma1
// scales the sum-level noise (the update divides it by B); for the other
// algorithms it is the mean-level scale.
struct ExperimentConfig {
  std::string label = "run";
  Algorithm algorithm = Algorithm::kDiceSgd;
  ProblemConfig problem;
  HyperParams hp;
  SamplingMode mode = SamplingMode::kPoisson;
  std::size_t batch = 1;
  std::vector<std::uint64_t> seeds = {1};
  std::optional<PrivacyBudget> budget;
  std::optional<double> cal_sum_threshold;  // default: hp.clip.c1
  std::optional<double> cal_g_prime;        // default: +infinity
  std::optional<Vector> x0_values;          // explicit start point
  std::optional<double> x0_fill;            // constant-fill start point
};

// JSON round-trip. config_to_json(config_from_json(j)) reproduces the
// canonical form losslessly (doubles survive exactly).
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);

std::string algorithm_name(Algorithm alg);
Algorithm algorithm_from_name(const std::string& name);

struct RunOutput {
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
  Json metadata;          // sidecar contents
  std::string csv_path;   // empty when not persisted
  std::string sidecar_path;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  Vector final_x;
};

struct ExperimentResult {
  double sigma1 = 0.0;  // the scale actually used (calibrated or configured)
  std::optional<CalibrationResult> calibration;
  std::vector<RunOutput> runs;  // one per seed, in config order
};

// Runs the experiment once per seed. Each run derives its sampling and noise
// streams from that seed, so a (config, seed) pair reproduces its trace and
// sidecar byte for byte. When output_dir is nonempty, writes
// <label>_seed<seed>.csv and .json atomically. Sidecars carry the full
// canonical config, the problem descriptor, the privacy record when a budget
// is present, and the final state, so a run can be re-verified from disk.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& output_dir);

struct SweepCell {
  double c1 = 0.0;
  double multiplier = 0.0;  // effective stepsize m; the run uses eta = m/c1
  double c2_ratio = 0.0;    // c2 = ratio * c1
  double eta = 0.0;
  std::vector<double> final_losses;  // per seed
  double median_final_loss = 0.0;
  std::string error;  // nonempty when the cell failed; other cells still run
};

// Cross product of the grids, one experiment per cell, all cells reusing the
// base config (and its seeds) so cells differ only in (c1, m, ratio). A
// failed cell records its error and does not abort the sweep. A singleton
// grid {c1 = base c1, m = base eta * c1, ratio = base c2/c1} reduces to the
// plain run.
std::vector<SweepCell> effective_stepsize_sweep(
    const ExperimentConfig& base, const std::vector<double>& c1_grid,
    const std::vector<double>& multiplier_grid,
    const std::vector<double>& c2_ratio_grid);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepCell>& cells);

struct CompareReport {
  std::string label_a, label_b;
  std::string algorithm_a, algorithm_b;
  double final_loss_a = 0.0, final_loss_b = 0.0;
  double final_grad_norm_a = 0.0, final_grad_norm_b = 0.0;
  double bias_gap = 0.0;  // || final_x_a - final_x_b ||
  std::optional<double> weighted_mean_sq_grad_a, weighted_mean_sq_grad_b;
};

// Side-by-side comparison of two persisted runs (CSV paths; sidecars are
// looked up next to them). Refuses to compare runs with different problem
// descriptors or horizons.
CompareReport compare_runs(const std::string& csv_a, const std::string& csv_b);

Json compare_to_json(const CompareReport& report);

}  // namespace dice

#endif  // DICE_HARNESS_HPP_
