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

#include "dice/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dice/errors.hpp"
#include "dice/hash.hpp"
#include "dice/random.hpp"

namespace dice {
namespace {

void check_access(const Problem& p, const Vector& x, std::size_t index,
                  const char* where) {
  if (x.size() != p.dimension()) {
    throw ConfigError(std::string(where) + ": point has dimension " +
                      std::to_string(x.size()) + ", problem expects " +
                      std::to_string(p.dimension()));
  }
  if (index >= p.size()) {
    throw ConfigError(std::string(where) + ": sample index " +
                      std::to_string(index) + " out of range (N=" +
                      std::to_string(p.size()) + ")");
  }
}

// log(1 + exp(-m)) without overflow for large |m|.
double softplus_neg(double m) {
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

// sigmoid(-m) = 1 / (1 + exp(m)) without overflow.
double sigmoid_neg(double m) {
  if (m >= 0.0) {
    const double t = std::exp(-m);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(m));
}

std::uint64_t hash_rows(const std::vector<Vector>& rows, std::uint64_t h0) {
  std::uint64_t h = h0;
  for (const Vector& r : rows) {
    const std::uint64_t rh = fnv1a64_doubles(r);
    h = fnv1a64(&rh, sizeof(rh), h);
  }
  return h;
}

}  // namespace

double per_sample_loss(const Problem& p, const Vector& x, std::size_t index) {
  check_access(p, x, index, "per_sample_loss");
  const double v = p.sample_loss(x, index);
  if (!std::isfinite(v)) {
    throw NumericalError("per_sample_loss: non-finite loss at sample " +
                         std::to_string(index));
  }
  return v;
}

Vector per_sample_gradient(const Problem& p, const Vector& x,
                           std::size_t index) {
  check_access(p, x, index, "per_sample_gradient");
  Vector g = p.sample_gradient(x, index);
  if (!all_finite(g)) {
    throw NumericalError("per_sample_gradient: non-finite gradient at sample " +
                         std::to_string(index));
  }
  return g;
}

double average_loss(const Problem& p, const Vector& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += per_sample_loss(p, x, i);
  return sum / static_cast<double>(p.size());
}

Vector full_gradient(const Problem& p, const Vector& x) {
  Vector sum = zeros(p.dimension());
  for (std::size_t i = 0; i < p.size(); ++i) {
    axpy(sum, 1.0, per_sample_gradient(p, x, i));
  }
  return scale(sum, 1.0 / static_cast<double>(p.size()));
}

// ---------------------------------------------------------------------------
// QuadraticProblem

QuadraticProblem::QuadraticProblem(std::vector<Vector> centers,
                                   Vector curvature)
    : centers_(std::move(centers)), curvature_(std::move(curvature)) {
  if (centers_.empty()) {
    throw ConfigError("QuadraticProblem: needs at least one sample");
  }
  for (const Vector& c : centers_) {
    require_same_dim(c, curvature_, "QuadraticProblem centers");
    require_finite(c, "QuadraticProblem centers");
  }
  require_finite(curvature_, "QuadraticProblem curvature");
  for (double l : curvature_) {
    if (l <= 0.0) {
      throw ConfigError("QuadraticProblem: curvature must be positive");
    }
  }
}

double QuadraticProblem::sample_loss(const Vector& x,
                                     std::size_t index) const {
  const Vector& c = centers_[index];
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - c[j];
    s += curvature_[j] * d * d;
  }
  return 0.5 * s;
}

Vector QuadraticProblem::sample_gradient(const Vector& x,
                                         std::size_t index) const {
  const Vector& c = centers_[index];
  Vector g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    g[j] = curvature_[j] * (x[j] - c[j]);
  }
  return g;
}

ProblemHints QuadraticProblem::hints() const {
  ProblemHints h;
  h.smoothness = *std::max_element(curvature_.begin(), curvature_.end());

  // Per-sample gradients differ from the mean by lambda .* (xi_bar - xi_i),
  // independent of x, so the deviation bound is exact. The minimizer is the
  // center of mass; the optimal value is the residual spread energy.
  const double n = static_cast<double>(centers_.size());
  Vector mean = zeros(dimension());
  for (const Vector& c : centers_) axpy(mean, 1.0 / n, c);
  double mean_sq_dev = 0.0;
  double fstar = 0.0;
  for (const Vector& c : centers_) {
    double dev = 0.0;
    double energy = 0.0;
    for (std::size_t j = 0; j < dimension(); ++j) {
      const double d = mean[j] - c[j];
      dev += curvature_[j] * curvature_[j] * d * d;
      energy += curvature_[j] * d * d;
    }
    mean_sq_dev += dev / n;
    fstar += 0.5 * energy / n;
  }
  h.gradient_spread = std::sqrt(n * mean_sq_dev);
  h.optimal_value = fstar;
  return h;
}

std::string QuadraticProblem::descriptor() const {
  std::uint64_t h = fnv1a64_doubles(curvature_);
  h = hash_rows(centers_, h);
  return "quadratic(n=" + std::to_string(size()) +
         ",d=" + std::to_string(dimension()) + ",data=" + hex64(h) + ")";
}

// ---------------------------------------------------------------------------
// LogisticProblem

LogisticProblem::LogisticProblem(std::vector<Vector> features,
                                 std::vector<double> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.empty() || features_.size() != labels_.size()) {
    throw ConfigError("LogisticProblem: need equal, nonzero feature/label counts");
  }
  dim_ = features_.front().size();
  if (dim_ == 0) throw ConfigError("LogisticProblem: zero feature dimension");
  double max_sq = 0.0;
  double mean_norm = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].size() != dim_) {
      throw ConfigError("LogisticProblem: inconsistent feature dimension at row " +
                        std::to_string(i));
    }
    require_finite(features_[i], "LogisticProblem features");
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw ConfigError("LogisticProblem: labels must be +-1 (row " +
                        std::to_string(i) + ")");
    }
    const double sq = squared_norm(features_[i]);
    max_sq = std::max(max_sq, sq);
    mean_norm += std::sqrt(sq);
  }
  max_feature_sq_norm_ = max_sq;
  mean_feature_norm_ = mean_norm / static_cast<double>(features_.size());
}

double LogisticProblem::sample_loss(const Vector& x, std::size_t index) const {
  const double m = labels_[index] * dot(x, features_[index]);
  return softplus_neg(m);
}

Vector LogisticProblem::sample_gradient(const Vector& x,
                                        std::size_t index) const {
  const double y = labels_[index];
  const double m = y * dot(x, features_[index]);
  const double s = sigmoid_neg(m);
  return scale(features_[index], -y * s);
}

ProblemHints LogisticProblem::hints() const {
  ProblemHints h;
  h.smoothness = max_feature_sq_norm_ / 4.0;
  // ||g_i|| <= ||a_i||, so the mean feature norm bounds the full gradient.
  h.gradient_bound = mean_feature_norm_;
  // Conservative: ||g_i - grad f|| <= ||a_i|| + mean_j ||a_j|| for every x.
  double mean_sq = 0.0;
  for (const Vector& a : features_) {
    const double b = norm(a) + mean_feature_norm_;
    mean_sq += b * b / static_cast<double>(features_.size());
  }
  h.gradient_spread =
      std::sqrt(static_cast<double>(features_.size()) * mean_sq);
  return h;
}

std::string LogisticProblem::descriptor() const {
  std::uint64_t h = fnv1a64_doubles(labels_);
  h = hash_rows(features_, h);
  return "logistic(n=" + std::to_string(size()) +
         ",d=" + std::to_string(dimension()) + ",data=" + hex64(h) + ")";
}

// ---------------------------------------------------------------------------
// Generators and CSV loading

QuadraticProblem make_quadratic(std::size_t dim, std::size_t n,
                                double condition, double spread,
                                std::uint64_t seed) {
  if (dim == 0 || n == 0) {
    throw ConfigError("make_quadratic: dim and n must be >= 1");
  }
  if (!std::isfinite(condition) || condition < 1.0) {
    throw ConfigError("make_quadratic: condition must be >= 1");
  }
  if (!std::isfinite(spread) || spread < 0.0) {
    throw ConfigError("make_quadratic: spread must be >= 0");
  }
  Vector curvature(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double frac =
        dim == 1 ? 0.0
                 : static_cast<double>(j) / static_cast<double>(dim - 1);
    curvature[j] = std::exp(frac * std::log(condition));
  }
  NoiseSource noise(seed, /*stream_id=*/0);
  std::vector<Vector> centers(n);
  for (std::size_t i = 0; i < n; ++i) {
    centers[i] = noise.gaussian_vector(dim, spread);
  }
  return QuadraticProblem(std::move(centers), std::move(curvature));
}

LogisticProblem make_synthetic_logistic(std::size_t dim, std::size_t n,
                                        double separation,
                                        std::uint64_t seed) {
  if (dim == 0 || n == 0) {
    throw ConfigError("make_synthetic_logistic: dim and n must be >= 1");
  }
  if (!std::isfinite(separation) || separation < 0.0) {
    throw ConfigError("make_synthetic_logistic: separation must be >= 0");
  }
  NoiseSource noise(seed, /*stream_id=*/0);
  BitSource coin(seed, /*stream_id=*/1);
  const double mu = separation / std::sqrt(static_cast<double>(dim));
  std::vector<Vector> features(n);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = coin.uniform01() < 0.5 ? 1.0 : -1.0;
    Vector a = noise.gaussian_vector(dim, 1.0);
    for (double& v : a) v += y * mu;
    features[i] = std::move(a);
    labels[i] = y;
  }
  return LogisticProblem(std::move(features), std::move(labels));
}

LogisticProblem load_problem_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_problem_csv: cannot open " + path);
  std::vector<Vector> features;
  std::vector<double> labels;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        fields.push_back(v);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      // A single non-numeric leading line is treated as a header.
      if (labels.empty() && dim == 0) continue;
      throw ConfigError("load_problem_csv: non-numeric field at line " +
                        std::to_string(lineno));
    }
    if (fields.size() < 2) {
      throw ConfigError("load_problem_csv: need label plus features at line " +
                        std::to_string(lineno));
    }
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      throw ConfigError("load_problem_csv: row length mismatch at line " +
                        std::to_string(lineno) + " (got " +
                        std::to_string(fields.size() - 1) + " features, want " +
                        std::to_string(dim) + ")");
    }
    double y = fields[0];
    if (y == 0.0) y = -1.0;
    if (y != 1.0 && y != -1.0) {
      throw ConfigError("load_problem_csv: label must be in {-1,0,+1} at line " +
                        std::to_string(lineno));
    }
    labels.push_back(y);
    features.emplace_back(fields.begin() + 1, fields.end());
  }
  if (labels.empty()) {
    throw ConfigError("load_problem_csv: no data rows in " + path);
  }
  return LogisticProblem(std::move(features), std::move(labels));
}

}  // namespace dice
