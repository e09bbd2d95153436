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

#include <atomic>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dice/accountant.hpp"
#include "dice/errors.hpp"
#include "dice/harness.hpp"
#include "dice/optimizers.hpp"
#include "dice/trace.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;

// Unique scratch directory, removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("dice_harness_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<dice::TraceRow> sample_rows() {
  std::vector<dice::TraceRow> rows;
  rows.push_back({0, 0.1, 1.0 / 3.0, 1.0, 0.0, 0.25, 10});
  rows.push_back({1, 1e-300, 2.5e17, 0.37, 7.000000000000001, 0.0, 0});
  rows.push_back({2, -4.25, 0.0, 1e-12, 123.456, 1.0, 3});
  return rows;
}

dice::ExperimentConfig quadratic_config() {
  dice::ExperimentConfig cfg;
  cfg.label = "unit";
  cfg.algorithm = dice::Algorithm::kDiceSgd;
  cfg.problem.kind = "quadratic";
  cfg.problem.dim = 3;
  cfg.problem.n = 20;
  cfg.problem.condition = 5.0;
  cfg.problem.spread = 1.0;
  cfg.problem.data_seed = 77;
  cfg.hp.eta = 0.1;
  cfg.hp.horizon = 12;
  cfg.hp.clip = {0.5, 1.0};
  cfg.hp.sigma1 = 0.05;
  cfg.mode = dice::SamplingMode::kPoisson;
  cfg.batch = 5;
  cfg.seeds = {11};
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("trace csv round-trips every double exactly") {
  TempDir dir;
  const std::string path = dir.file("trace.csv");
  const std::vector<dice::TraceRow> rows = sample_rows();
  dice::write_trace_csv(path, rows);

  // The header line is frozen.
  std::ifstream in(path);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == std::string(dice::kTraceCsvHeader));

  const std::vector<dice::TraceRow> back = dice::read_trace_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    CHECK(back[t].t == rows[t].t);
    CHECK(back[t].loss == rows[t].loss);
    CHECK(back[t].grad_norm == rows[t].grad_norm);
    CHECK(back[t].alpha_e == rows[t].alpha_e);
    CHECK(back[t].e_norm == rows[t].e_norm);
    CHECK(back[t].clip_fraction == rows[t].clip_fraction);
    CHECK(back[t].realized_batch == rows[t].realized_batch);
  }

  // Empty traces persist as a bare header and read back empty.
  const std::string empty_path = dir.file("empty.csv");
  dice::write_trace_csv(empty_path, {});
  CHECK(dice::read_trace_csv(empty_path).empty());
}

TEST_CASE("trace csv writer rejects malformed rows") {
  TempDir dir;
  std::vector<dice::TraceRow> rows = sample_rows();
  rows[1].t = 5;  // breaks t == row index
  CHECK_THROWS_AS(dice::write_trace_csv(dir.file("bad.csv"), rows),
                  dice::DataError);

  rows = sample_rows();
  rows[2].loss = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(dice::write_trace_csv(dir.file("bad.csv"), rows),
                  dice::NumericalError);
}

TEST_CASE("trace csv reader rejects corrupt files") {
  TempDir dir;
  const auto write_raw = [&](const std::string& name,
                             const std::string& text) {
    dice::write_file_atomic(dir.file(name), text);
    return dir.file(name);
  };

  CHECK_THROWS_AS(dice::read_trace_csv(dir.file("absent.csv")),
                  dice::DataError);
  CHECK_THROWS_AS(
      dice::read_trace_csv(write_raw("h.csv", "time,loss\n0,1\n")),
      dice::DataError);
  const std::string hdr = std::string(dice::kTraceCsvHeader) + "\n";
  CHECK_THROWS_AS(
      dice::read_trace_csv(write_raw("f.csv", hdr + "0,1,2,3\n")),
      dice::DataError);
  CHECK_THROWS_AS(dice::read_trace_csv(write_raw(
                      "seq.csv", hdr + "1,0,0,1,0,0,1\n")),
                  dice::DataError);
  CHECK_THROWS_AS(dice::read_trace_csv(write_raw(
                      "junk.csv", hdr + "0,0,zap,1,0,0,1\n")),
                  dice::DataError);
  CHECK_THROWS_AS(dice::read_trace_csv(write_raw(
                      "inf.csv", hdr + "0,inf,0,1,0,0,1\n")),
                  dice::NumericalError);
}

TEST_CASE("atomic writes create parent directories and leave no temp files") {
  TempDir dir;
  const std::string nested = (dir.path / "a" / "b" / "out.txt").string();
  dice::write_file_atomic(nested, "payload");
  CHECK(slurp(nested) == "payload");
  CHECK_FALSE(fs::exists(nested + ".tmp"));
}

TEST_CASE("suffix weights follow the tail-product definition") {
  // Factors of one zero out every suffix product: all weights one except
  // the final empty product.
  const std::vector<double> ones = dice::alpha_e_suffix_weights({1.0, 1.0,
                                                                 1.0, 1.0});
  CHECK(ones == std::vector<double>{1.0, 1.0, 1.0, 0.0});

  const std::vector<double> halves =
      dice::alpha_e_suffix_weights({0.5, 0.5, 0.5});
  REQUIRE(halves.size() == 3);
  CHECK(halves[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(halves[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(halves[2] == 0.0);

  CHECK(dice::alpha_e_suffix_weights({0.9}) == std::vector<double>{0.0});
  CHECK(dice::alpha_e_suffix_weights({}).empty());

  CHECK_THROWS_AS(dice::alpha_e_suffix_weights({0.5, 0.0}), dice::DataError);
  CHECK_THROWS_AS(dice::alpha_e_suffix_weights({1.1}), dice::DataError);
  CHECK_THROWS_AS(dice::alpha_e_suffix_weights({-0.2}), dice::DataError);
}

TEST_CASE("suffix weights agree with a log-space recomputation over 2000") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  std::vector<double> alpha(2000);
  for (double& a : alpha) a = u(rng);
  const std::vector<double> weights = dice::alpha_e_suffix_weights(alpha);
  // Accumulate the suffix product in log space from the tail, which cannot
  // underflow the way a direct product can.
  double log_suffix = 0.0;
  for (std::size_t k = alpha.size(); k-- > 0;) {
    const double expect = k + 1 == alpha.size() ? 0.0
                                                : 1.0 - std::exp(log_suffix);
    CHECK(std::abs(weights[k] - expect) <= 1e-12);
    log_suffix += std::log1p(-alpha[k]);
  }
}

TEST_CASE("weighted gradient summary averages with suffix weights") {
  const auto row = [](std::size_t t, double g, double a) {
    dice::TraceRow r;
    r.t = t;
    r.grad_norm = g;
    r.alpha_e = a;
    return r;
  };
  // Constant gradient norm: any weighting returns its square.
  const dice::WeightedSummary flat = dice::weighted_grad_summary(
      {row(0, 3.0, 1.0), row(1, 3.0, 1.0), row(2, 3.0, 1.0)});
  CHECK(flat.weighted_mean_sq_grad_norm == doctest::Approx(9.0));
  CHECK(flat.final_sq_grad_norm == doctest::Approx(9.0));
  CHECK(flat.weight_total == doctest::Approx(2.0));
  CHECK(flat.last_weight_is_empty_product);

  // A unit factor right after step 0 concentrates nearly all weight there.
  const dice::WeightedSummary front = dice::weighted_grad_summary(
      {row(0, 5.0, 0.3), row(1, 9.0, 1.0), row(2, 1.0, 1e-12)});
  CHECK(front.weighted_mean_sq_grad_norm == doctest::Approx(25.0).epsilon(1e-9));

  // Hand-checked mixed case.
  const dice::WeightedSummary mixed = dice::weighted_grad_summary(
      {row(0, 2.0, 0.5), row(1, 4.0, 0.5), row(2, 1.0, 0.5)});
  CHECK(mixed.weighted_mean_sq_grad_norm ==
        doctest::Approx((0.75 * 4.0 + 0.5 * 16.0) / 1.25).epsilon(1e-12));

  CHECK_THROWS_AS(dice::weighted_grad_summary({}), dice::DataError);
  // Single-step traces have only the empty-product weight.
  CHECK_THROWS_AS(dice::weighted_grad_summary({row(0, 1.0, 0.5)}),
                  dice::DataError);
}

TEST_CASE("config json round-trips losslessly") {
  dice::ExperimentConfig cfg;
  cfg.label = "roundtrip";
  cfg.algorithm = dice::Algorithm::kAdamDiceSgd;
  cfg.problem.kind = "synthetic_logistic";
  cfg.problem.dim = 7;
  cfg.problem.n = 240;
  cfg.problem.separation = 0.1 + 0.2;  // deliberately non-representable
  cfg.problem.data_seed = 123456789012345ull;
  cfg.hp.eta = 1.0 / 3.0;
  cfg.hp.horizon = 33;
  cfg.hp.clip = {0.123456789012345678, 2.0};
  cfg.hp.schedule = dice::StepsizeSchedule::kWarmupThenDecay;
  cfg.hp.warmup_steps = 5;
  cfg.hp.adam = {0.95, 0.9995, 1e-7};
  cfg.mode = dice::SamplingMode::kUniformNoReplacement;
  cfg.batch = 16;
  cfg.seeds = {3, 1, 4};
  cfg.budget = dice::PrivacyBudget{1.7, 1e-6};
  cfg.cal_sum_threshold = 0.7;
  cfg.cal_g_prime = 5.5;
  cfg.x0_values = dice::Vector{0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7};

  const dice::Json j = dice::config_to_json(cfg);
  const dice::ExperimentConfig back = dice::config_from_json(j);
  CHECK(dice::config_to_json(back) == j);
  CHECK(back.hp.eta == cfg.hp.eta);
  CHECK(back.problem.separation == cfg.problem.separation);
  CHECK(back.hp.clip.c1 == cfg.hp.clip.c1);
  REQUIRE(back.budget.has_value());
  CHECK(back.budget->epsilon == 1.7);
  REQUIRE(back.x0_values.has_value());
  CHECK(back.x0_values.value() == cfg.x0_values.value());

  // The x0_fill variant survives too.
  dice::ExperimentConfig fill = quadratic_config();
  fill.x0_fill = 0.25;
  const dice::Json jf = dice::config_to_json(fill);
  CHECK(dice::config_to_json(dice::config_from_json(jf)) == jf);
}

TEST_CASE("config parser enforces its schema strictly") {
  const auto base = [] {
    return dice::Json{
        {"algorithm", "dicesgd"},
        {"batch", 4},
        {"seeds", {1, 2}},
        {"problem", {{"kind", "quadratic"}, {"dim", 2}, {"n", 10}}},
        {"hyper",
         {{"eta", 0.1}, {"horizon", 5}, {"c1", 1.0}, {"c2", 2.0}}},
    };
  };
  CHECK_NOTHROW(dice::config_from_json(base()));

  dice::Json unknown = base();
  unknown["typo_key"] = 1;
  CHECK_THROWS_AS(dice::config_from_json(unknown), dice::ConfigError);

  dice::Json unknown_nested = base();
  unknown_nested["hyper"]["momentum"] = 0.9;
  CHECK_THROWS_AS(dice::config_from_json(unknown_nested), dice::ConfigError);

  dice::Json missing_alg = base();
  missing_alg.erase("algorithm");
  CHECK_THROWS_AS(dice::config_from_json(missing_alg), dice::ConfigError);

  dice::Json missing_problem = base();
  missing_problem.erase("problem");
  CHECK_THROWS_AS(dice::config_from_json(missing_problem), dice::ConfigError);

  dice::Json missing_hyper = base();
  missing_hyper.erase("hyper");
  CHECK_THROWS_AS(dice::config_from_json(missing_hyper), dice::ConfigError);

  dice::Json bad_type = base();
  bad_type["batch"] = "four";
  CHECK_THROWS_AS(dice::config_from_json(bad_type), dice::ConfigError);

  dice::Json bad_alg = base();
  bad_alg["algorithm"] = "sgd";
  CHECK_THROWS_AS(dice::config_from_json(bad_alg), dice::ConfigError);

  dice::Json bad_mode = base();
  bad_mode["sampling"] = "bernoulli";
  CHECK_THROWS_AS(dice::config_from_json(bad_mode), dice::ConfigError);

  dice::Json bad_schedule = base();
  bad_schedule["hyper"]["schedule"] = "cosine";
  CHECK_THROWS_AS(dice::config_from_json(bad_schedule), dice::ConfigError);

  dice::Json bad_kind = base();
  bad_kind["problem"]["kind"] = "mystery";
  CHECK_THROWS_AS(dice::config_from_json(bad_kind), dice::ConfigError);

  // A privacy budget owns sigma1; hand-setting both is contradictory.
  dice::Json both = base();
  both["budget"] = {{"epsilon", 2.0}, {"delta", 1e-5}};
  both["hyper"]["sigma1"] = 0.3;
  CHECK_THROWS_AS(dice::config_from_json(both), dice::ConfigError);
  both["hyper"].erase("sigma1");
  CHECK_NOTHROW(dice::config_from_json(both));

  dice::Json both_x0 = base();
  both_x0["x0"] = {{"fill", 0.0}, {"values", {1.0, 2.0}}};
  CHECK_THROWS_AS(dice::config_from_json(both_x0), dice::ConfigError);

  CHECK_THROWS_AS(dice::algorithm_from_name("nope"), dice::ConfigError);
  CHECK(dice::algorithm_from_name("automatic") ==
        dice::Algorithm::kAutomaticDiceSgd);
  CHECK(dice::algorithm_name(dice::Algorithm::kDpsgdGc) == "dpsgd_gc");
}

TEST_CASE("build_problem dispatches on kind") {
  dice::ProblemConfig pc;
  pc.kind = "counterexample";
  pc.threshold = 1.0;
  CHECK(dice::build_problem(pc)->size() == 3);

  pc = {};
  pc.kind = "quadratic";
  pc.dim = 4;
  pc.n = 9;
  pc.condition = 2.0;
  pc.spread = 1.0;
  const auto quad = dice::build_problem(pc);
  CHECK(quad->dimension() == 4);
  CHECK(quad->size() == 9);

  pc = {};
  pc.kind = "synthetic_logistic";
  pc.dim = 3;
  pc.n = 14;
  const auto logit = dice::build_problem(pc);
  CHECK(logit->dimension() == 3);
  CHECK(logit->size() == 14);

  TempDir dir;
  dice::write_file_atomic(dir.file("data.csv"),
                          "label,f1,f2\n1,1.0,2.0\n-1,0.5,-1.0\n");
  pc = {};
  pc.kind = "csv";
  pc.csv_path = dir.file("data.csv");
  const auto fromcsv = dice::build_problem(pc);
  CHECK(fromcsv->dimension() == 2);
  CHECK(fromcsv->size() == 2);

  pc = {};
  pc.kind = "mystery";
  CHECK_THROWS_AS(dice::build_problem(pc), dice::ConfigError);
}

TEST_CASE("experiments reproduce byte-identical artifacts") {
  const dice::ExperimentConfig cfg = quadratic_config();
  TempDir a, b;
  const dice::ExperimentResult ra = dice::run_experiment(cfg, a.str());
  const dice::ExperimentResult rb = dice::run_experiment(cfg, b.str());
  REQUIRE(ra.runs.size() == 1);
  REQUIRE(rb.runs.size() == 1);
  CHECK(slurp(ra.runs[0].csv_path) == slurp(rb.runs[0].csv_path));
  CHECK(slurp(ra.runs[0].sidecar_path) == slurp(rb.runs[0].sidecar_path));
  CHECK(fs::path(ra.runs[0].csv_path).filename().string() ==
        "unit_seed11.csv");

  // Without an output directory nothing is persisted.
  const dice::ExperimentResult dry = dice::run_experiment(cfg, "");
  CHECK(dry.runs[0].csv_path.empty());
  CHECK(dry.runs[0].sidecar_path.empty());
  CHECK(dry.runs[0].rows.size() == cfg.hp.horizon);
}

TEST_CASE("sidecars carry enough to re-verify the run") {
  dice::ExperimentConfig cfg = quadratic_config();
  cfg.seeds = {11, 12};
  TempDir dir;
  const dice::ExperimentResult res = dice::run_experiment(cfg, dir.str());
  REQUIRE(res.runs.size() == 2);

  const dice::Json meta = dice::Json::parse(slurp(res.runs[0].sidecar_path));
  CHECK(meta.at("format").get<int>() == 1);
  CHECK(meta.at("config_hash").get<std::string>().size() == 16);
  CHECK(meta.at("config") == dice::config_to_json(cfg));
  CHECK(meta.at("problem").at("descriptor").get<std::string>().find(
            "quadratic") != std::string::npos);
  CHECK(meta.at("problem").at("n").get<std::size_t>() == 20);
  CHECK(meta.at("sigma1").get<double>() == cfg.hp.sigma1);
  CHECK(meta.at("seed").get<std::uint64_t>() == 11);
  // Quadratics publish a gradient-spread hint, so the margin check is a
  // definite boolean rather than null.
  CHECK(meta.at("c2_margin_ok").is_boolean());
  CHECK(meta.at("final").at("checksum").get<std::string>().size() == 16);
  CHECK(meta.at("final").at("x").get<dice::Vector>() == res.runs[0].final_x);
  CHECK(meta.at("weighted_summary").is_object());
  CHECK_FALSE(meta.contains("privacy"));

  // Different seeds: same config hash, different traces.
  const dice::Json meta2 = dice::Json::parse(slurp(res.runs[1].sidecar_path));
  CHECK(meta2.at("config_hash") == meta.at("config_hash"));
  CHECK(slurp(res.runs[0].csv_path) != slurp(res.runs[1].csv_path));

  // The persisted trace reads back exactly as the in-memory rows.
  const std::vector<dice::TraceRow> rows =
      dice::read_trace_csv(res.runs[0].csv_path);
  REQUIRE(rows.size() == res.runs[0].rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    CHECK(rows[t].loss == res.runs[0].rows[t].loss);
    CHECK(rows[t].alpha_e == res.runs[0].rows[t].alpha_e);
  }
}

TEST_CASE("a privacy budget drives calibration into the sidecar") {
  dice::ExperimentConfig cfg = quadratic_config();
  cfg.problem.n = 200;
  cfg.batch = 20;
  cfg.hp.sigma1 = 0.0;
  cfg.budget = dice::PrivacyBudget{2.0, 1e-5};
  cfg.cal_sum_threshold = 2.0;
  TempDir dir;
  const dice::ExperimentResult res = dice::run_experiment(cfg, dir.str());
  REQUIRE(res.calibration.has_value());
  CHECK(res.sigma1 == res.calibration->sigma1);
  CHECK(res.sigma1 > 0.0);

  // The sidecar's privacy record re-verifies against the accountant.
  const dice::Json meta = dice::Json::parse(slurp(res.runs[0].sidecar_path));
  const dice::Json priv = meta.at("privacy");
  dice::CalibrationInputs in;
  in.horizon = priv.at("horizon").get<std::size_t>();
  in.dataset_size = priv.at("dataset_size").get<std::size_t>();
  in.batch = priv.at("batch").get<std::size_t>();
  in.clip = cfg.hp.clip;
  in.sum_threshold = priv.at("sum_threshold").get<double>();
  const dice::CalibrationResult again = dice::calibrate_dicesgd(
      in, {priv.at("epsilon").get<double>(), priv.at("delta").get<double>()});
  CHECK(priv.at("sigma1").get<double>() == again.sigma1);
  CHECK(priv.at("g_tilde").get<double>() == again.g_tilde);
  CHECK(priv.at("alpha_star").get<double>() == again.alpha_star);
  CHECK(priv.at("epsilon_check").get<double>() == again.epsilon_check);
  // Unbounded residual norm: the key is simply absent.
  CHECK_FALSE(priv.contains("g_prime"));

  // The automatic variant calibrates off the closed form with threshold 1.
  dice::ExperimentConfig autocfg = cfg;
  autocfg.algorithm = dice::Algorithm::kAutomaticDiceSgd;
  autocfg.cal_sum_threshold.reset();
  const dice::ExperimentResult autores = dice::run_experiment(autocfg, "");
  CHECK(autores.sigma1 ==
        dice::calibrate_automatic(cfg.hp.horizon, 200, *cfg.budget, 1.0));

  // And the baseline calibrates through the subsampled-Gaussian bisection.
  dice::ExperimentConfig gccfg = cfg;
  gccfg.algorithm = dice::Algorithm::kDpsgdGc;
  const dice::ExperimentResult gcres = dice::run_experiment(gccfg, "");
  dice::CalibrationInputs gcin = in;
  const dice::CalibrationResult gc_again =
      dice::calibrate_dpsgd_gc(gcin, *cfg.budget);
  CHECK(gcres.sigma1 == gc_again.sigma1);
}

TEST_CASE("degenerate experiment shapes stay well-defined") {
  dice::ExperimentConfig cfg = quadratic_config();
  cfg.hp.horizon = 0;
  cfg.x0_fill = 0.25;
  TempDir dir;
  const dice::ExperimentResult res = dice::run_experiment(cfg, dir.str());
  CHECK(res.runs[0].rows.empty());
  CHECK(res.runs[0].final_x == dice::Vector(3, 0.25));
  CHECK(dice::read_trace_csv(res.runs[0].csv_path).empty());
  const dice::Json meta = dice::Json::parse(slurp(res.runs[0].sidecar_path));
  CHECK(meta.at("weighted_summary").is_null());

  // A single step also lacks a usable weighted summary (its only suffix
  // weight is the empty product).
  dice::ExperimentConfig one = quadratic_config();
  one.hp.horizon = 1;
  const dice::ExperimentResult res1 = dice::run_experiment(one, "");
  CHECK(res1.runs[0].metadata.at("weighted_summary").is_null());

  dice::ExperimentConfig no_seeds = quadratic_config();
  no_seeds.seeds.clear();
  CHECK_THROWS_AS(dice::run_experiment(no_seeds, ""), dice::ConfigError);

  dice::ExperimentConfig bad_x0 = quadratic_config();
  bad_x0.x0_values = dice::Vector{1.0, 2.0};  // problem dimension is 3
  CHECK_THROWS_AS(dice::run_experiment(bad_x0, ""), dice::ConfigError);
}

TEST_CASE("stepsize sweep reduces to the plain run on a singleton grid") {
  dice::ExperimentConfig base = quadratic_config();
  base.seeds = {1, 2, 3};
  const dice::ExperimentResult plain = dice::run_experiment(base, "");
  std::vector<double> losses;
  for (const dice::RunOutput& r : plain.runs) {
    losses.push_back(r.final_loss);
  }
  std::sort(losses.begin(), losses.end());

  const std::vector<dice::SweepCell> cells = dice::effective_stepsize_sweep(
      base, {base.hp.clip.c1}, {base.hp.eta * base.hp.clip.c1},
      {base.hp.clip.c2 / base.hp.clip.c1});
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].error.empty());
  CHECK(cells[0].eta == doctest::Approx(base.hp.eta).epsilon(1e-15));
  CHECK(cells[0].final_losses.size() == 3);
  CHECK(cells[0].median_final_loss == doctest::Approx(losses[1]));
}

TEST_CASE("stepsize sweep walks the grid and tolerates failing cells") {
  dice::ExperimentConfig base = quadratic_config();
  base.seeds = {1, 2, 3, 4};  // even count: median averages the middle pair
  base.hp.horizon = 6;
  const std::vector<dice::SweepCell> cells = dice::effective_stepsize_sweep(
      base, {0.1, 0.2, -1.0}, {0.05}, {2.0});
  REQUIRE(cells.size() == 3);

  // Fixed effective stepsize: doubling c1 halves eta.
  CHECK(cells[0].eta == doctest::Approx(0.5));
  CHECK(cells[1].eta == doctest::Approx(0.25));
  CHECK(cells[0].error.empty());
  CHECK(cells[1].error.empty());
  for (int i : {0, 1}) {
    REQUIRE(cells[i].final_losses.size() == 4);
    std::vector<double> sorted = cells[i].final_losses;
    std::sort(sorted.begin(), sorted.end());
    CHECK(cells[i].median_final_loss ==
          doctest::Approx(0.5 * (sorted[1] + sorted[2])).epsilon(1e-15));
  }

  // The negative threshold cell fails validation but the sweep continues.
  CHECK_FALSE(cells[2].error.empty());
  CHECK(cells[2].final_losses.empty());
  CHECK(std::isnan(cells[2].median_final_loss));

  TempDir dir;
  dice::write_sweep_csv(dir.file("sweep.csv"), cells);
  std::ifstream in(dir.file("sweep.csv"));
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "c1,multiplier,c2_ratio,eta,median_final_loss,num_seeds,error");
  std::string line;
  std::size_t body_lines = 0;
  bool saw_error_text = false;
  while (std::getline(in, line)) {
    ++body_lines;
    // Error text keeps the row at exactly seven columns.
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
    if (line.find("c1") != std::string::npos && !cells[2].error.empty()) {
      saw_error_text = true;
    }
  }
  CHECK(body_lines == 3);
  CHECK(saw_error_text);

  CHECK_THROWS_AS(dice::effective_stepsize_sweep(base, {}, {0.05}, {2.0}),
                  dice::ConfigError);
}

TEST_CASE("run comparison reads persisted artifacts back") {
  TempDir dir;
  dice::ExperimentConfig a = quadratic_config();
  a.label = "left";
  dice::ExperimentConfig b = a;
  b.label = "right";
  const dice::ExperimentResult ra = dice::run_experiment(a, dir.str());
  const dice::ExperimentResult rb = dice::run_experiment(b, dir.str());

  const dice::CompareReport same =
      dice::compare_runs(ra.runs[0].csv_path, rb.runs[0].csv_path);
  CHECK(same.label_a == "left");
  CHECK(same.label_b == "right");
  CHECK(same.algorithm_a == "dicesgd");
  CHECK(same.bias_gap == 0.0);
  CHECK(same.final_loss_a == same.final_loss_b);
  REQUIRE(same.weighted_mean_sq_grad_a.has_value());
  CHECK(same.weighted_mean_sq_grad_a == same.weighted_mean_sq_grad_b);

  const dice::Json cj = dice::compare_to_json(same);
  CHECK(cj.at("bias_gap").get<double>() == 0.0);
  CHECK(cj.at("a").at("label") == "left");

  // Different problem: refuse.
  dice::ExperimentConfig other = a;
  other.label = "otherdata";
  other.problem.data_seed = 78;
  const dice::ExperimentResult ro = dice::run_experiment(other, dir.str());
  CHECK_THROWS_AS(
      dice::compare_runs(ra.runs[0].csv_path, ro.runs[0].csv_path),
      dice::ConfigError);

  // Different horizon: refuse.
  dice::ExperimentConfig longer = a;
  longer.label = "longer";
  longer.hp.horizon = 20;
  const dice::ExperimentResult rl = dice::run_experiment(longer, dir.str());
  CHECK_THROWS_AS(
      dice::compare_runs(ra.runs[0].csv_path, rl.runs[0].csv_path),
      dice::ConfigError);
}

TEST_CASE("comparison surfaces the clipping bias gap on the counterexample") {
  TempDir dir;
  dice::ExperimentConfig gc;
  gc.label = "gc";
  gc.algorithm = dice::Algorithm::kDpsgdGc;
  gc.problem.kind = "counterexample";
  gc.problem.threshold = 1.0;
  gc.hp.eta = 0.01;
  gc.hp.horizon = 4000;
  gc.hp.clip = {1.0, 1.0};
  gc.hp.sigma1 = 0.0;
  gc.mode = dice::SamplingMode::kUniformNoReplacement;
  gc.batch = 3;  // full batch
  gc.seeds = {5};
  gc.x0_values = dice::Vector{1.0};

  dice::ExperimentConfig dicesgd = gc;
  dicesgd.label = "dice";
  dicesgd.algorithm = dice::Algorithm::kDiceSgd;

  const dice::ExperimentResult rgc = dice::run_experiment(gc, dir.str());
  const dice::ExperimentResult rdice =
      dice::run_experiment(dicesgd, dir.str());
  const dice::CompareReport rep =
      dice::compare_runs(rgc.runs[0].csv_path, rdice.runs[0].csv_path);
  // The single-clip baseline parks at the biased stationary point while the
  // error-feedback run converges to the true optimum.
  CHECK(rep.bias_gap >= 0.4);
  CHECK(rep.final_grad_norm_b <= 1e-3);
  CHECK(rep.final_grad_norm_a >= 0.33);
}

}  // TEST_SUITE("harness")
