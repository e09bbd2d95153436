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

#ifndef DICE_OPTIMIZERS_HPP_
#define DICE_OPTIMIZERS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dice/clipper.hpp"
#include "dice/problem.hpp"
#include "dice/random.hpp"
#include "dice/vector.hpp"

namespace dice {

enum class Algorithm {
  kDpsgdGc,            // single-threshold clipped SGD with Gaussian noise
  kDiceSgd,            // two-threshold clipped SGD with clipped error feedback
  kAdamDiceSgd,        // Adam moments driven by the noised two-clip direction
  kAutomaticDiceSgd,   // normalization in place of clipping, unit thresholds
};

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps1 = 1e-8;
};

enum class StepsizeSchedule {
  kConstant,         // eta
  kLinearDecay,      // eta * (1 - t/T)
  kWarmupThenDecay,  // ramp to eta over warmup_steps, then linear decay
};

struct HyperParams {
  double eta = 0.1;
  StepsizeSchedule schedule = StepsizeSchedule::kConstant;
  std::size_t warmup_steps = 0;
  double sigma1 = 0.0;   // Gaussian noise scale (see each step's placement)
  ClipConfig clip;
  AdamParams adam;
  std::size_t horizon = 1;  // T, number of steps
};

void validate(const HyperParams& hp);

// Stepsize for 0-based iteration t under hp.schedule. Always positive for
// t < horizon.
double stepsize_at(const HyperParams& hp, std::size_t t);

struct OptimizerState {
  Vector x;        // iterate
  Vector e;        // clipped-error feedback state (zero for the baseline)
  Vector m1, m2;   // Adam moment accumulators (zero unless Adam variant)
  std::size_t step = 0;  // 0-based count of completed steps
};

OptimizerState make_state(const Vector& x0);

// Snapshot of one step. loss and grad_norm are full-dataset values at the
// iterate the step started from; alpha_e is the contraction factor applied
// to the error state this step (1 when nothing contracted, including the
// baseline with no error state); clip_fraction is the share of the realized
// batch whose per-sample gradient was shrunk (0 for an empty batch).
struct StepReport {
  double loss = 0.0;
  double grad_norm = 0.0;
  double alpha_e = 1.0;
  double e_norm = 0.0;
  double clip_fraction = 0.0;
  std::size_t realized_batch = 0;
};

// One step of each algorithm. All four:
//   * draw a minibatch, clip (or normalize) per-sample gradients at c1,
//     summing in ascending index order and dividing by the nominal batch
//     size (an empty Poisson batch contributes a zero sum; noise is still
//     injected so output distributions do not reveal emptiness);
//   * advance state.step and return the report.
// Differences:
//   * dpsgd_gc_step adds sum-level noise: x <- x - eta/B (sum_clip + w),
//     single threshold c1, no error state.
//   * dicesgd_step forms v = clipped_mean + clip(e, c2), adds mean-level
//     noise w to the update, and feeds back e <- e + raw_mean - v.
//   * adam_dicesgd_step runs Adam moments on v + w (bias correction uses
//     exponent step+1) but updates e from the noiseless direction.
//   * automatic_dicesgd_step replaces both clips with unit-radius full
//     normalization (zero vectors stay zero).
StepReport dpsgd_gc_step(OptimizerState& state, const Problem& problem,
                         MinibatchSampler& sampler, NoiseSource& noise,
                         const HyperParams& hp);
StepReport dicesgd_step(OptimizerState& state, const Problem& problem,
                        MinibatchSampler& sampler, NoiseSource& noise,
                        const HyperParams& hp);
StepReport adam_dicesgd_step(OptimizerState& state, const Problem& problem,
                             MinibatchSampler& sampler, NoiseSource& noise,
                             const HyperParams& hp);
StepReport automatic_dicesgd_step(OptimizerState& state,
                                  const Problem& problem,
                                  MinibatchSampler& sampler,
                                  NoiseSource& noise, const HyperParams& hp);

StepReport take_step(Algorithm alg, OptimizerState& state,
                     const Problem& problem, MinibatchSampler& sampler,
                     NoiseSource& noise, const HyperParams& hp);

struct RunResult {
  std::vector<StepReport> reports;  // one per step, length hp.horizon
  OptimizerState state;             // final state after the last step
};

// Runs hp.horizon steps from x0. Sampling and noise use separate seeded
// streams so a sigma sweep never perturbs the subsampling pattern. Any
// non-finite loss or iterate raises a numerical error naming the step.
RunResult run_loop(Algorithm alg, const Problem& problem,
                   const HyperParams& hp, const Vector& x0, SamplingMode mode,
                   std::size_t batch, std::uint64_t sampling_seed,
                   std::uint64_t noise_seed);

// Stepsize eta = sqrt(2 (f0 - fstar) / (T L (2 c1^2 + 3 c2^2 + d sigma1^2)))
// from the convergence analysis of the two-clip method.
double analytic_stepsize(double f0_minus_fstar, double smoothness,
                         std::size_t horizon, const ClipConfig& clip,
                         std::size_t dim, double sigma1);

// Sufficient-margin condition on the error threshold: c2 >= 3 c1 + sigma/B.
// Recorded in run metadata, never enforced.
bool c2_threshold_ok(const ClipConfig& clip, double gradient_spread,
                     std::size_t batch);

}  // namespace dice

#endif  // DICE_OPTIMIZERS_HPP_
