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

#include "dice/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dice/errors.hpp"
#include "dice/hash.hpp"
#include "dice/oracle.hpp"

namespace dice {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// --- JSON parsing helpers (strict: unknown keys are config errors) ---------

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) {
    throw ConfigError(std::string(where) + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError(std::string(where) + ": unknown key '" + item.key() +
                        "'");
    }
  }
}

template <typename T>
T require_field(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) {
    throw ConfigError(std::string(where) + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string(where) + ": key '" + key +
                      "' has the wrong type");
  }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback,
                 const char* where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string(where) + ": key '" + key +
                      "' has the wrong type");
  }
}

const char* schedule_name(StepsizeSchedule s) {
  switch (s) {
    case StepsizeSchedule::kConstant:
      return "constant";
    case StepsizeSchedule::kLinearDecay:
      return "linear_decay";
    case StepsizeSchedule::kWarmupThenDecay:
      return "warmup_then_decay";
  }
  throw ConfigError("unknown stepsize schedule");
}

StepsizeSchedule schedule_from_name(const std::string& name) {
  if (name == "constant") return StepsizeSchedule::kConstant;
  if (name == "linear_decay") return StepsizeSchedule::kLinearDecay;
  if (name == "warmup_then_decay") return StepsizeSchedule::kWarmupThenDecay;
  throw ConfigError("unknown stepsize schedule '" + name + "'");
}

const char* sampling_name(SamplingMode m) {
  return m == SamplingMode::kPoisson ? "poisson" : "uniform";
}

SamplingMode sampling_from_name(const std::string& name) {
  if (name == "poisson") return SamplingMode::kPoisson;
  if (name == "uniform") return SamplingMode::kUniformNoReplacement;
  throw ConfigError("unknown sampling mode '" + name + "'");
}

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(ok ? c : '-');
  }
  return out.empty() ? std::string("run") : out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) throw DataError("median of empty sample");
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::kDpsgdGc:
      return "dpsgd_gc";
    case Algorithm::kDiceSgd:
      return "dicesgd";
    case Algorithm::kAdamDiceSgd:
      return "adam_dicesgd";
    case Algorithm::kAutomaticDiceSgd:
      return "automatic";
  }
  throw ConfigError("unknown algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "dpsgd_gc") return Algorithm::kDpsgdGc;
  if (name == "dicesgd") return Algorithm::kDiceSgd;
  if (name == "adam_dicesgd") return Algorithm::kAdamDiceSgd;
  if (name == "automatic") return Algorithm::kAutomaticDiceSgd;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::unique_ptr<Problem> build_problem(const ProblemConfig& cfg) {
  if (cfg.kind == "counterexample") {
    return std::make_unique<CounterexampleProblem>(cfg.threshold);
  }
  if (cfg.kind == "quadratic") {
    return std::make_unique<QuadraticProblem>(
        make_quadratic(cfg.dim, cfg.n, cfg.condition, cfg.spread,
                       cfg.data_seed));
  }
  if (cfg.kind == "synthetic_logistic") {
    return std::make_unique<LogisticProblem>(
        make_synthetic_logistic(cfg.dim, cfg.n, cfg.separation,
                                cfg.data_seed));
  }
  if (cfg.kind == "csv") {
    return std::make_unique<LogisticProblem>(load_problem_csv(cfg.csv_path));
  }
  throw ConfigError("unknown problem kind '" + cfg.kind + "'");
}

ExperimentConfig config_from_json(const Json& j) {
  check_keys(j,
             {"algorithm", "batch", "budget", "calibration", "hyper", "label",
              "problem", "sampling", "seeds", "x0"},
             "config");
  ExperimentConfig cfg;
  cfg.label = optional_field<std::string>(j, "label", "run", "config");
  cfg.algorithm =
      algorithm_from_name(require_field<std::string>(j, "algorithm", "config"));
  cfg.batch = require_field<std::size_t>(j, "batch", "config");
  cfg.seeds = require_field<std::vector<std::uint64_t>>(j, "seeds", "config");
  cfg.mode = sampling_from_name(
      optional_field<std::string>(j, "sampling", "poisson", "config"));

  if (!j.contains("problem")) {
    throw ConfigError("config: missing key 'problem'");
  }
  const Json& pj = j.at("problem");
  check_keys(pj,
             {"kind", "threshold", "dim", "n", "condition", "spread",
              "separation", "data_seed", "path"},
             "config.problem");
  cfg.problem.kind = require_field<std::string>(pj, "kind", "config.problem");
  if (cfg.problem.kind == "counterexample") {
    cfg.problem.threshold =
        require_field<double>(pj, "threshold", "config.problem");
  } else if (cfg.problem.kind == "quadratic") {
    cfg.problem.dim = require_field<std::size_t>(pj, "dim", "config.problem");
    cfg.problem.n = require_field<std::size_t>(pj, "n", "config.problem");
    cfg.problem.condition =
        optional_field<double>(pj, "condition", 1.0, "config.problem");
    cfg.problem.spread =
        optional_field<double>(pj, "spread", 1.0, "config.problem");
    cfg.problem.data_seed = optional_field<std::uint64_t>(
        pj, "data_seed", 20177, "config.problem");
  } else if (cfg.problem.kind == "synthetic_logistic") {
    cfg.problem.dim = require_field<std::size_t>(pj, "dim", "config.problem");
    cfg.problem.n = require_field<std::size_t>(pj, "n", "config.problem");
    cfg.problem.separation =
        optional_field<double>(pj, "separation", 1.0, "config.problem");
    cfg.problem.data_seed = optional_field<std::uint64_t>(
        pj, "data_seed", 20177, "config.problem");
  } else if (cfg.problem.kind == "csv") {
    cfg.problem.csv_path =
        require_field<std::string>(pj, "path", "config.problem");
  } else {
    throw ConfigError("config.problem: unknown kind '" + cfg.problem.kind +
                      "'");
  }

  if (!j.contains("hyper")) {
    throw ConfigError("config: missing key 'hyper'");
  }
  const Json& hj = j.at("hyper");
  check_keys(hj,
             {"adam", "c1", "c2", "eta", "horizon", "schedule", "sigma1",
              "warmup_steps"},
             "config.hyper");
  cfg.hp.eta = require_field<double>(hj, "eta", "config.hyper");
  cfg.hp.horizon = require_field<std::size_t>(hj, "horizon", "config.hyper");
  cfg.hp.clip.c1 = require_field<double>(hj, "c1", "config.hyper");
  cfg.hp.clip.c2 = require_field<double>(hj, "c2", "config.hyper");
  cfg.hp.schedule = schedule_from_name(
      optional_field<std::string>(hj, "schedule", "constant", "config.hyper"));
  cfg.hp.warmup_steps =
      optional_field<std::size_t>(hj, "warmup_steps", 0, "config.hyper");
  if (hj.contains("adam")) {
    const Json& aj = hj.at("adam");
    check_keys(aj, {"beta1", "beta2", "eps1"}, "config.hyper.adam");
    cfg.hp.adam.beta1 =
        optional_field<double>(aj, "beta1", 0.9, "config.hyper.adam");
    cfg.hp.adam.beta2 =
        optional_field<double>(aj, "beta2", 0.999, "config.hyper.adam");
    cfg.hp.adam.eps1 =
        optional_field<double>(aj, "eps1", 1e-8, "config.hyper.adam");
  }

  if (j.contains("budget") && !j.at("budget").is_null()) {
    const Json& bj = j.at("budget");
    check_keys(bj, {"epsilon", "delta"}, "config.budget");
    PrivacyBudget b;
    b.epsilon = require_field<double>(bj, "epsilon", "config.budget");
    b.delta = require_field<double>(bj, "delta", "config.budget");
    cfg.budget = b;
    if (hj.contains("sigma1")) {
      throw ConfigError(
          "config: sigma1 is derived from the privacy budget and may not be "
          "hand-set alongside one");
    }
  } else {
    cfg.hp.sigma1 = optional_field<double>(hj, "sigma1", 0.0, "config.hyper");
  }

  if (j.contains("calibration")) {
    const Json& cj = j.at("calibration");
    check_keys(cj, {"sum_threshold", "g_prime"}, "config.calibration");
    if (cj.contains("sum_threshold")) {
      cfg.cal_sum_threshold =
          require_field<double>(cj, "sum_threshold", "config.calibration");
    }
    if (cj.contains("g_prime") && !cj.at("g_prime").is_null()) {
      cfg.cal_g_prime =
          require_field<double>(cj, "g_prime", "config.calibration");
    }
  }

  if (j.contains("x0")) {
    const Json& xj = j.at("x0");
    check_keys(xj, {"fill", "values"}, "config.x0");
    if (xj.contains("fill") && xj.contains("values")) {
      throw ConfigError("config.x0: give either 'fill' or 'values', not both");
    }
    if (xj.contains("fill")) {
      cfg.x0_fill = require_field<double>(xj, "fill", "config.x0");
    } else if (xj.contains("values")) {
      cfg.x0_values = require_field<Vector>(xj, "values", "config.x0");
    }
  }
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["label"] = cfg.label;
  j["algorithm"] = algorithm_name(cfg.algorithm);
  j["batch"] = cfg.batch;
  j["seeds"] = cfg.seeds;
  j["sampling"] = sampling_name(cfg.mode);

  Json pj;
  pj["kind"] = cfg.problem.kind;
  if (cfg.problem.kind == "counterexample") {
    pj["threshold"] = cfg.problem.threshold;
  } else if (cfg.problem.kind == "quadratic") {
    pj["dim"] = cfg.problem.dim;
    pj["n"] = cfg.problem.n;
    pj["condition"] = cfg.problem.condition;
    pj["spread"] = cfg.problem.spread;
    pj["data_seed"] = cfg.problem.data_seed;
  } else if (cfg.problem.kind == "synthetic_logistic") {
    pj["dim"] = cfg.problem.dim;
    pj["n"] = cfg.problem.n;
    pj["separation"] = cfg.problem.separation;
    pj["data_seed"] = cfg.problem.data_seed;
  } else if (cfg.problem.kind == "csv") {
    pj["path"] = cfg.problem.csv_path;
  } else {
    throw ConfigError("config_to_json: unknown problem kind '" +
                      cfg.problem.kind + "'");
  }
  j["problem"] = pj;

  Json hj;
  hj["eta"] = cfg.hp.eta;
  hj["horizon"] = cfg.hp.horizon;
  hj["c1"] = cfg.hp.clip.c1;
  hj["c2"] = cfg.hp.clip.c2;
  hj["schedule"] = schedule_name(cfg.hp.schedule);
  if (cfg.hp.warmup_steps != 0) hj["warmup_steps"] = cfg.hp.warmup_steps;
  if (!cfg.budget.has_value()) hj["sigma1"] = cfg.hp.sigma1;
  if (cfg.algorithm == Algorithm::kAdamDiceSgd) {
    hj["adam"] = Json{{"beta1", cfg.hp.adam.beta1},
                      {"beta2", cfg.hp.adam.beta2},
                      {"eps1", cfg.hp.adam.eps1}};
  }
  j["hyper"] = hj;

  if (cfg.budget.has_value()) {
    j["budget"] = Json{{"epsilon", cfg.budget->epsilon},
                       {"delta", cfg.budget->delta}};
  }
  if (cfg.cal_sum_threshold.has_value() || cfg.cal_g_prime.has_value()) {
    Json cj = Json::object();
    if (cfg.cal_sum_threshold.has_value()) {
      cj["sum_threshold"] = *cfg.cal_sum_threshold;
    }
    if (cfg.cal_g_prime.has_value()) cj["g_prime"] = *cfg.cal_g_prime;
    j["calibration"] = cj;
  }
  if (cfg.x0_values.has_value()) {
    j["x0"] = Json{{"values", *cfg.x0_values}};
  } else if (cfg.x0_fill.has_value()) {
    j["x0"] = Json{{"fill", *cfg.x0_fill}};
  }
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& output_dir) {
  const Json canonical = config_to_json(cfg);
  const std::string canonical_text = canonical.dump();
  const std::string config_hash =
      hex64(fnv1a64(canonical_text.data(), canonical_text.size()));

  const std::unique_ptr<Problem> problem = build_problem(cfg.problem);
  const std::size_t n = problem->size();
  const std::size_t dim = problem->dimension();
  if (cfg.seeds.empty()) {
    throw ConfigError("run_experiment: need at least one seed");
  }

  Vector x0;
  if (cfg.x0_values.has_value()) {
    x0 = *cfg.x0_values;
    if (x0.size() != dim) {
      throw ConfigError("run_experiment: x0 has dimension " +
                        std::to_string(x0.size()) + ", problem expects " +
                        std::to_string(dim));
    }
  } else if (cfg.x0_fill.has_value()) {
    x0 = Vector(dim, *cfg.x0_fill);
  } else {
    x0 = zeros(dim);
  }

  HyperParams hp = cfg.hp;
  ExperimentResult result;
  Json privacy = Json();
  if (cfg.budget.has_value()) {
    CalibrationInputs inputs;
    inputs.horizon = hp.horizon;
    inputs.dataset_size = n;
    inputs.batch = cfg.batch;
    inputs.clip = hp.clip;
    inputs.sum_threshold = cfg.cal_sum_threshold.value_or(hp.clip.c1);
    inputs.g_prime = cfg.cal_g_prime.value_or(kInf);
    CalibrationResult cal;
    switch (cfg.algorithm) {
      case Algorithm::kDpsgdGc:
        cal = calibrate_dpsgd_gc(inputs, *cfg.budget);
        break;
      case Algorithm::kDiceSgd:
      case Algorithm::kAdamDiceSgd:
        cal = calibrate_dicesgd(inputs, *cfg.budget);
        break;
      case Algorithm::kAutomaticDiceSgd: {
        cal.sigma1 = calibrate_automatic(hp.horizon, n, *cfg.budget,
                                         /*threshold=*/1.0);
        cal.g_tilde = 3.0;
        const ConvertedBound check = composed_two_clip_check(
            cal.sigma1, cal.g_tilde, hp.horizon, n, cfg.budget->delta);
        cal.alpha_star = check.alpha;
        cal.epsilon_check = check.epsilon;
        cal.threshold_cap_ok =
            1.0 <= 1.0 / static_cast<double>(cfg.batch);
        break;
      }
    }
    hp.sigma1 = cal.sigma1;
    result.calibration = cal;
    privacy = Json{{"algorithm", algorithm_name(cfg.algorithm)},
                   {"epsilon", cfg.budget->epsilon},
                   {"delta", cfg.budget->delta},
                   {"sigma1", cal.sigma1},
                   {"horizon", hp.horizon},
                   {"dataset_size", n},
                   {"batch", cfg.batch},
                   {"alpha_star", cal.alpha_star},
                   {"epsilon_check", cal.epsilon_check},
                   {"g_tilde", cal.g_tilde},
                   {"threshold_cap_ok", cal.threshold_cap_ok},
                   {"sum_threshold", inputs.sum_threshold}};
    // JSON has no infinity; an absent g_prime means "unbounded".
    if (std::isfinite(inputs.g_prime)) privacy["g_prime"] = inputs.g_prime;
  }
  result.sigma1 = hp.sigma1;

  Json meta_common;
  meta_common["format"] = 1;
  meta_common["config"] = canonical;
  meta_common["config_hash"] = config_hash;
  meta_common["problem"] = Json{{"descriptor", problem->descriptor()},
                                {"n", n},
                                {"dim", dim}};
  meta_common["sigma1"] = hp.sigma1;
  const ProblemHints hints = problem->hints();
  if (hints.gradient_spread.has_value()) {
    meta_common["c2_margin_ok"] =
        c2_threshold_ok(hp.clip, *hints.gradient_spread, cfg.batch);
  } else {
    meta_common["c2_margin_ok"] = nullptr;
  }
  if (!privacy.is_null()) meta_common["privacy"] = privacy;

  namespace fs = std::filesystem;
  for (const std::uint64_t seed : cfg.seeds) {
    const RunResult rr = run_loop(cfg.algorithm, *problem, hp, x0, cfg.mode,
                                  cfg.batch, seed, seed);
    RunOutput out;
    out.seed = seed;
    out.rows = rows_from_reports(rr.reports);
    out.final_x = rr.state.x;
    out.final_loss = average_loss(*problem, rr.state.x);
    out.final_grad_norm = norm(full_gradient(*problem, rr.state.x));

    Json meta = meta_common;
    meta["seed"] = seed;
    Vector state_bits = rr.state.x;
    state_bits.insert(state_bits.end(), rr.state.e.begin(), rr.state.e.end());
    meta["final"] = Json{{"loss", out.final_loss},
                         {"grad_norm", out.final_grad_norm},
                         {"e_norm", norm(rr.state.e)},
                         {"x", rr.state.x},
                         {"checksum", hex64(fnv1a64_doubles(state_bits))}};
    try {
      const WeightedSummary ws = weighted_grad_summary(out.rows);
      meta["weighted_summary"] =
          Json{{"weighted_mean_sq_grad_norm", ws.weighted_mean_sq_grad_norm},
               {"final_sq_grad_norm", ws.final_sq_grad_norm},
               {"weight_total", ws.weight_total},
               {"last_weight_is_empty_product",
                ws.last_weight_is_empty_product}};
    } catch (const DataError&) {
      meta["weighted_summary"] = nullptr;
    }
    out.metadata = meta;

    if (!output_dir.empty()) {
      const std::string stem =
          sanitize_label(cfg.label) + "_seed" + std::to_string(seed);
      const fs::path csv = fs::path(output_dir) / (stem + ".csv");
      const fs::path sidecar = fs::path(output_dir) / (stem + ".json");
      write_trace_csv(csv.string(), out.rows);
      write_file_atomic(sidecar.string(), meta.dump(1) + "\n");
      out.csv_path = csv.string();
      out.sidecar_path = sidecar.string();
    }
    result.runs.push_back(std::move(out));
  }
  return result;
}

std::vector<SweepCell> effective_stepsize_sweep(
    const ExperimentConfig& base, const std::vector<double>& c1_grid,
    const std::vector<double>& multiplier_grid,
    const std::vector<double>& c2_ratio_grid) {
  if (c1_grid.empty() || multiplier_grid.empty() || c2_ratio_grid.empty()) {
    throw ConfigError("effective_stepsize_sweep: grids must be nonempty");
  }
  std::vector<SweepCell> cells;
  for (const double c1 : c1_grid) {
    for (const double m : multiplier_grid) {
      for (const double ratio : c2_ratio_grid) {
        SweepCell cell;
        cell.c1 = c1;
        cell.multiplier = m;
        cell.c2_ratio = ratio;
        cell.eta = m / c1;
        try {
          ExperimentConfig cfg = base;
          cfg.hp.clip.c1 = c1;
          cfg.hp.clip.c2 = ratio * c1;
          cfg.hp.eta = cell.eta;
          const ExperimentResult res = run_experiment(cfg, "");
          for (const RunOutput& run : res.runs) {
            cell.final_losses.push_back(run.final_loss);
          }
          cell.median_final_loss = median_of(cell.final_losses);
        } catch (const std::exception& ex) {
          cell.error = ex.what();
          cell.final_losses.clear();
          cell.median_final_loss =
              std::numeric_limits<double>::quiet_NaN();
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "c1,multiplier,c2_ratio,eta,median_final_loss,num_seeds,error\n";
  for (const SweepCell& c : cells) {
    std::string err = c.error;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << format_double(c.c1) << ',' << format_double(c.multiplier) << ','
        << format_double(c.c2_ratio) << ',' << format_double(c.eta) << ','
        << format_double(c.median_final_loss) << ',' << c.final_losses.size()
        << ',' << err << "\n";
  }
  write_file_atomic(path, out.str());
}

CompareReport compare_runs(const std::string& csv_a,
                           const std::string& csv_b) {
  namespace fs = std::filesystem;
  const auto load_sidecar = [](const std::string& csv_path) -> Json {
    fs::path sidecar(csv_path);
    sidecar.replace_extension(".json");
    std::ifstream in(sidecar);
    if (!in) {
      throw DataError("compare_runs: cannot open sidecar " + sidecar.string());
    }
    try {
      return Json::parse(in);
    } catch (const Json::exception& ex) {
      throw DataError("compare_runs: bad sidecar " + sidecar.string() + ": " +
                      ex.what());
    }
  };
  const Json ma = load_sidecar(csv_a);
  const Json mb = load_sidecar(csv_b);
  const std::vector<TraceRow> ra = read_trace_csv(csv_a);
  const std::vector<TraceRow> rb = read_trace_csv(csv_b);

  const std::string desc_a = ma.at("problem").at("descriptor").get<std::string>();
  const std::string desc_b = mb.at("problem").at("descriptor").get<std::string>();
  if (desc_a != desc_b) {
    throw ConfigError("compare_runs: runs solve different problems (" +
                      desc_a + " vs " + desc_b + ")");
  }
  if (ra.size() != rb.size()) {
    throw ConfigError("compare_runs: runs have different horizons (" +
                      std::to_string(ra.size()) + " vs " +
                      std::to_string(rb.size()) + ")");
  }

  CompareReport rep;
  rep.label_a = ma.at("config").at("label").get<std::string>();
  rep.label_b = mb.at("config").at("label").get<std::string>();
  rep.algorithm_a = ma.at("config").at("algorithm").get<std::string>();
  rep.algorithm_b = mb.at("config").at("algorithm").get<std::string>();
  rep.final_loss_a = ma.at("final").at("loss").get<double>();
  rep.final_loss_b = mb.at("final").at("loss").get<double>();
  rep.final_grad_norm_a = ma.at("final").at("grad_norm").get<double>();
  rep.final_grad_norm_b = mb.at("final").at("grad_norm").get<double>();
  const Vector xa = ma.at("final").at("x").get<Vector>();
  const Vector xb = mb.at("final").at("x").get<Vector>();
  rep.bias_gap = norm(sub(xa, xb));
  try {
    rep.weighted_mean_sq_grad_a =
        weighted_grad_summary(ra).weighted_mean_sq_grad_norm;
  } catch (const DataError&) {
  }
  try {
    rep.weighted_mean_sq_grad_b =
        weighted_grad_summary(rb).weighted_mean_sq_grad_norm;
  } catch (const DataError&) {
  }
  return rep;
}

Json compare_to_json(const CompareReport& r) {
  Json j;
  j["a"] = Json{{"label", r.label_a},
                {"algorithm", r.algorithm_a},
                {"final_loss", r.final_loss_a},
                {"final_grad_norm", r.final_grad_norm_a}};
  j["b"] = Json{{"label", r.label_b},
                {"algorithm", r.algorithm_b},
                {"final_loss", r.final_loss_b},
                {"final_grad_norm", r.final_grad_norm_b}};
  if (r.weighted_mean_sq_grad_a.has_value()) {
    j["a"]["weighted_mean_sq_grad_norm"] = *r.weighted_mean_sq_grad_a;
  }
  if (r.weighted_mean_sq_grad_b.has_value()) {
    j["b"]["weighted_mean_sq_grad_norm"] = *r.weighted_mean_sq_grad_b;
  }
  j["bias_gap"] = r.bias_gap;
  return j;
}

}  // namespace dice
