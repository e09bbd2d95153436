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

#ifndef DICE_PROBLEM_HPP_
#define DICE_PROBLEM_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "dice/vector.hpp"

namespace dice {

// Optional analytic facts about a problem instance. Absent means unknown,
// never zero. Consumers must treat these as upper bounds (smoothness,
// gradient_bound, gradient_spread) or exact values (optimal_value).
struct ProblemHints {
  std::optional<double> smoothness;        // L: gradient Lipschitz constant
  std::optional<double> gradient_bound;    // G: sup_x ||grad f(x)||
  std::optional<double> gradient_spread;   // sigma: per-sample deviation scale,
                                           // mean_i ||g_i - grad f||^2 <= sigma^2/N
  std::optional<double> optimal_value;     // f* = min_x f(x)
};

// Finite-sum objective f(x) = (1/N) sum_i f(x; xi_i) exposing per-sample
// losses and gradients. Implementations must be deterministic functions of
// (x, index).
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t size() const = 0;       // N, number of samples
  virtual std::size_t dimension() const = 0;  // d

  virtual double sample_loss(const Vector& x, std::size_t index) const = 0;
  virtual Vector sample_gradient(const Vector& x, std::size_t index) const = 0;

  virtual ProblemHints hints() const { return {}; }

  // Canonical identity string (kind, shape, content fingerprint). Two runs
  // are comparable only if their problem descriptors match.
  virtual std::string descriptor() const = 0;
};

// Checked accessors. Index out of range or dimension mismatch is a config
// error; a non-finite result is a numerical error naming the sample.
double per_sample_loss(const Problem& p, const Vector& x, std::size_t index);
Vector per_sample_gradient(const Problem& p, const Vector& x,
                           std::size_t index);

// Mean loss / gradient over all samples, accumulated in index order so the
// result is bit-reproducible.
double average_loss(const Problem& p, const Vector& x);
Vector full_gradient(const Problem& p, const Vector& x);

// f(x; xi_i) = 1/2 sum_j lambda_j (x_j - xi_ij)^2. Smoothness, spread, and
// the optimal value are exact.
class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(std::vector<Vector> centers, Vector curvature);

  std::size_t size() const override { return centers_.size(); }
  std::size_t dimension() const override { return curvature_.size(); }
  double sample_loss(const Vector& x, std::size_t index) const override;
  Vector sample_gradient(const Vector& x, std::size_t index) const override;
  ProblemHints hints() const override;
  std::string descriptor() const override;

  const Vector& center(std::size_t i) const { return centers_[i]; }

 private:
  std::vector<Vector> centers_;
  Vector curvature_;
};

// Binary logistic regression: f(x; (y, a)) = log(1 + exp(-y <x, a>)) with
// labels y in {-1, +1}.
class LogisticProblem final : public Problem {
 public:
  LogisticProblem(std::vector<Vector> features, std::vector<double> labels);

  std::size_t size() const override { return labels_.size(); }
  std::size_t dimension() const override { return dim_; }
  double sample_loss(const Vector& x, std::size_t index) const override;
  Vector sample_gradient(const Vector& x, std::size_t index) const override;
  ProblemHints hints() const override;
  std::string descriptor() const override;

 private:
  std::vector<Vector> features_;
  std::vector<double> labels_;
  std::size_t dim_;
  double max_feature_sq_norm_;
  double mean_feature_norm_;
};

// Quadratic with log-spaced curvature spectrum [1, condition] and Gaussian
// centers of scale `spread`, fully determined by `seed`.
QuadraticProblem make_quadratic(std::size_t dim, std::size_t n,
                                double condition, double spread,
                                std::uint64_t seed);

// Two-class Gaussian blobs at +-separation * mu (mu the normalized all-ones
// direction), unit within-class covariance, balanced random labels. Fully
// determined by (dim, n, separation, seed); no files touched.
LogisticProblem make_synthetic_logistic(std::size_t dim, std::size_t n,
                                        double separation, std::uint64_t seed);

// Loads "label,feature_1,...,feature_d" rows. Labels may be {-1, +1} or
// {0, 1} (0 maps to -1). An optional first header line is skipped. Ragged or
// non-numeric rows are config errors naming the line.
LogisticProblem load_problem_csv(const std::string& path);

}  // namespace dice

#endif  // DICE_PROBLEM_HPP_
