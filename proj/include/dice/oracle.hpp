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

#ifndef DICE_ORACLE_HPP_
#define DICE_ORACLE_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dice/clipper.hpp"
#include "dice/problem.hpp"

namespace dice {

// Reference-side machinery for falsifying or validating optimizer behavior.
// Everything here recomputes clipping and updates with its own local
// arithmetic, deliberately sharing no code with the optimizer or clipper
// modules, so a bug cannot hide on both sides of a comparison.

// One-dimensional finite-sum instance on which single-threshold clipping
// provably biases the stationary point: per-sample losses are Huber-shaped
// with saturation radius sat = ceil(threshold) + 1, built over sat copies of
// xi = -1 and one sample at xi = sat. The unclipped objective is stationary
// at 0; the clipped mean gradient is not.
class CounterexampleProblem final : public Problem {
 public:
  explicit CounterexampleProblem(double threshold);

  std::size_t size() const override { return samples_.size(); }
  std::size_t dimension() const override { return 1; }
  double sample_loss(const Vector& x, std::size_t index) const override;
  Vector sample_gradient(const Vector& x, std::size_t index) const override;
  ProblemHints hints() const override;
  std::string descriptor() const override;

  double saturation() const { return saturation_; }  // sat = ceil(C) + 1
  double threshold() const { return threshold_; }

 private:
  double threshold_;
  double saturation_;
  std::vector<double> samples_;
};

CounterexampleProblem build_counterexample(double threshold);

struct FixedPointReport {
  struct Root {
    double x = 0.0;
    double residual = 0.0;  // |mean clipped gradient| at x
  };
  std::vector<Root> roots;  // ascending; empty when no sign change was found
  double scan_lo = 0.0;
  double scan_hi = 0.0;
  double grid_step = 0.0;
  std::string method = "grid-scan+bisection";
};

// Finds all roots of the mean clipped gradient x -> (1/N) sum_i
// clip(grad f(x; xi_i), threshold) of a 1-D problem by scanning
// [lo, hi] on a 1e-3 grid and bisecting each sign change to width 1e-12.
// threshold = +infinity gives the unclipped stationary points. Assumption
// free: no convexity or monotonicity is used.
FixedPointReport clipped_fixed_point(const Problem& problem, double threshold,
                                     double lo, double hi);

// Same, with the scan range [-2G - 1, 2G + 1] derived from the problem's
// gradient-bound hint (config error when the hint is absent).
FixedPointReport clipped_fixed_point(const Problem& problem, double threshold);

// Residuals of the two-clip stationarity conditions at (x, e):
// first = || (1/N) sum_i clip(g_i(x), c1) + clip(e, c2) ||  (update residual)
// second = || grad f(x) ||                                  (true residual)
std::pair<double, double> dicesgd_fixed_point_check(const Problem& problem,
                                                    const ClipConfig& clip,
                                                    const Vector& x,
                                                    const Vector& e);

// Straight-line transcription of the two-clip error-feedback recursion
// (full batch, no noise), returning the iterate after each of `horizon`
// steps. Local arithmetic only.
std::vector<Vector> reference_dicesgd_trajectory(const Problem& problem,
                                                 const ClipConfig& clip,
                                                 double eta,
                                                 std::size_t horizon,
                                                 const Vector& x0);

// Runs the production two-clip step (full batch, sigma1 = 0) against the
// transcription above and returns the maximum absolute per-coordinate
// deviation across the whole trajectory.
double small_instance_equivalence(const Problem& problem,
                                  const ClipConfig& clip, double eta,
                                  std::size_t horizon, const Vector& x0);

}  // namespace dice

#endif  // DICE_ORACLE_HPP_
