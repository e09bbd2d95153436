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

// Command-line front end: run experiments from a JSON config, calibrate
// noise for a privacy budget, sweep effective stepsizes, locate clipped
// fixed points of the built-in counterexample, and compare two saved runs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dice/errors.hpp"
#include "dice/harness.hpp"
#include "dice/oracle.hpp"

namespace {

dice::Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw dice::ConfigError("cannot open config file " + path);
  }
  try {
    return dice::Json::parse(in, /*cb=*/nullptr, /*allow_exceptions=*/true,
                             /*ignore_comments=*/true);
  } catch (const dice::Json::exception& ex) {
    throw dice::ConfigError("config file " + path +
                            " is not valid JSON: " + ex.what());
  }
}

int run_command(const std::string& config_path, const std::string& out_dir) {
  const dice::ExperimentConfig cfg =
      dice::config_from_json(load_json_file(config_path));
  const dice::ExperimentResult res = dice::run_experiment(cfg, out_dir);
  dice::Json summary;
  summary["label"] = cfg.label;
  summary["algorithm"] = dice::algorithm_name(cfg.algorithm);
  summary["sigma1"] = res.sigma1;
  summary["runs"] = dice::Json::array();
  for (const dice::RunOutput& run : res.runs) {
    dice::Json rj;
    rj["seed"] = run.seed;
    rj["final_loss"] = run.final_loss;
    rj["final_grad_norm"] = run.final_grad_norm;
    if (!run.csv_path.empty()) {
      rj["csv"] = run.csv_path;
      rj["sidecar"] = run.sidecar_path;
    }
    summary["runs"].push_back(rj);
  }
  std::cout << summary.dump(1) << "\n";
  return 0;
}

int calibrate_command(const std::string& config_path) {
  const dice::ExperimentConfig cfg =
      dice::config_from_json(load_json_file(config_path));
  if (!cfg.budget.has_value()) {
    throw dice::ConfigError("calibrate: config has no privacy budget");
  }
  dice::CalibrationInputs inputs;
  const auto problem = dice::build_problem(cfg.problem);
  inputs.horizon = cfg.hp.horizon;
  inputs.dataset_size = problem->size();
  inputs.batch = cfg.batch;
  inputs.clip = cfg.hp.clip;
  inputs.sum_threshold = cfg.cal_sum_threshold.value_or(cfg.hp.clip.c1);
  inputs.g_prime = cfg.cal_g_prime.value_or(
      std::numeric_limits<double>::infinity());
  dice::CalibrationResult cal;
  switch (cfg.algorithm) {
    case dice::Algorithm::kDpsgdGc:
      cal = dice::calibrate_dpsgd_gc(inputs, *cfg.budget);
      break;
    case dice::Algorithm::kDiceSgd:
    case dice::Algorithm::kAdamDiceSgd:
      cal = dice::calibrate_dicesgd(inputs, *cfg.budget);
      break;
    case dice::Algorithm::kAutomaticDiceSgd: {
      cal.sigma1 = dice::calibrate_automatic(cfg.hp.horizon, problem->size(),
                                             *cfg.budget, /*threshold=*/1.0);
      cal.g_tilde = 3.0;
      const dice::ConvertedBound check = dice::composed_two_clip_check(
          cal.sigma1, cal.g_tilde, cfg.hp.horizon, problem->size(),
          cfg.budget->delta);
      cal.alpha_star = check.alpha;
      cal.epsilon_check = check.epsilon;
      cal.threshold_cap_ok = 1.0 <= 1.0 / static_cast<double>(cfg.batch);
      break;
    }
  }
  dice::Json j;
  j["algorithm"] = dice::algorithm_name(cfg.algorithm);
  j["epsilon"] = cfg.budget->epsilon;
  j["delta"] = cfg.budget->delta;
  j["sigma1"] = cal.sigma1;
  j["g_tilde"] = cal.g_tilde;
  j["alpha_star"] = cal.alpha_star;
  j["epsilon_check"] = cal.epsilon_check;
  j["threshold_cap_ok"] = cal.threshold_cap_ok;
  std::cout << j.dump(1) << "\n";
  return 0;
}

int sweep_command(const std::string& config_path,
                  const std::vector<double>& c1_grid,
                  const std::vector<double>& mult_grid,
                  const std::vector<double>& ratio_grid,
                  const std::string& out_path) {
  const dice::ExperimentConfig cfg =
      dice::config_from_json(load_json_file(config_path));
  const std::vector<dice::SweepCell> cells =
      dice::effective_stepsize_sweep(cfg, c1_grid, mult_grid, ratio_grid);
  dice::write_sweep_csv(out_path, cells);
  std::size_t failed = 0;
  for (const dice::SweepCell& c : cells) {
    if (!c.error.empty()) ++failed;
  }
  std::cout << "wrote " << cells.size() << " cells to " << out_path;
  if (failed != 0) std::cout << " (" << failed << " failed)";
  std::cout << "\n";
  return 0;
}

int fixed_point_command(double threshold) {
  const dice::CounterexampleProblem problem =
      dice::build_counterexample(threshold);
  const dice::FixedPointReport clipped =
      dice::clipped_fixed_point(problem, threshold);
  const dice::FixedPointReport unclipped = dice::clipped_fixed_point(
      problem, std::numeric_limits<double>::infinity());
  const auto roots_json = [](const dice::FixedPointReport& rep) {
    dice::Json arr = dice::Json::array();
    for (const dice::FixedPointReport::Root& r : rep.roots) {
      arr.push_back(dice::Json{{"x", r.x}, {"residual", r.residual}});
    }
    return dice::Json{{"roots", arr},
                      {"scan_lo", rep.scan_lo},
                      {"scan_hi", rep.scan_hi},
                      {"grid_step", rep.grid_step},
                      {"method", rep.method}};
  };
  dice::Json j;
  j["threshold"] = threshold;
  j["saturation"] = problem.saturation();
  j["n"] = problem.size();
  j["clipped"] = roots_json(clipped);
  j["unclipped"] = roots_json(unclipped);
  std::cout << j.dump(1) << "\n";
  return 0;
}

int compare_command(const std::string& csv_a, const std::string& csv_b) {
  const dice::CompareReport rep = dice::compare_runs(csv_a, csv_b);
  std::cout << dice::compare_to_json(rep).dump(1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clipped error-feedback SGD experiment driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run an experiment from a config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir,
                  "directory for trace CSVs and metadata sidecars");

  std::string cal_config;
  auto* cal = app.add_subcommand(
      "calibrate", "report the noise level implied by a privacy budget");
  cal->add_option("config", cal_config, "JSON config file")->required();

  std::string sweep_config;
  std::string sweep_out = "sweep.csv";
  std::vector<double> c1_grid{1.0};
  std::vector<double> mult_grid{0.1};
  std::vector<double> ratio_grid{1.0};
  auto* sweep = app.add_subcommand(
      "sweep", "grid over clip thresholds at fixed effective stepsize");
  sweep->add_option("config", sweep_config, "JSON config file")->required();
  sweep->add_option("--c1", c1_grid, "per-sample clip thresholds");
  sweep->add_option("--multiplier", mult_grid,
                    "effective stepsizes (eta = multiplier / c1)");
  sweep->add_option("--c2-ratio", ratio_grid, "c2 as a multiple of c1");
  sweep->add_option("--out", sweep_out, "output CSV path");

  double fp_threshold = 1.0;
  auto* fp = app.add_subcommand(
      "fixed-point",
      "locate stationary points of the clipped counterexample objective");
  fp->add_option("--C,--threshold", fp_threshold, "clip threshold")
      ->required();

  std::string cmp_a;
  std::string cmp_b;
  auto* cmp = app.add_subcommand("compare", "compare two saved runs");
  cmp->add_option("trace_a", cmp_a, "first trace CSV")->required();
  cmp->add_option("trace_b", cmp_b, "second trace CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return run_command(config_path, out_dir);
    if (cal->parsed()) return calibrate_command(cal_config);
    if (sweep->parsed()) {
      return sweep_command(sweep_config, c1_grid, mult_grid, ratio_grid,
                           sweep_out);
    }
    if (fp->parsed()) return fixed_point_command(fp_threshold);
    if (cmp->parsed()) return compare_command(cmp_a, cmp_b);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const dice::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const dice::DataError& ex) {
    std::cerr << "data error: " << ex.what() << "\n";
    return 2;
  } catch (const dice::CalibrationError& ex) {
    std::cerr << "calibration error: " << ex.what() << "\n";
    return 3;
  } catch (const dice::NumericalError& ex) {
    std::cerr << "numerical error: " << ex.what() << "\n";
    return 4;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
