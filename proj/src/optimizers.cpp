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

#include "dice/optimizers.hpp"

#include <cmath>
#include <string>

#include "dice/errors.hpp"

namespace dice {
namespace {

constexpr std::uint64_t kSamplingStream = 0;
constexpr std::uint64_t kNoiseStream = 1;

struct BatchDirections {
  Vector clipped_mean;   // (1/B) sum clip(g_i, c1) (or unit-normalized)
  Vector raw_mean;       // (1/B) sum g_i (only when requested)
  double clip_fraction = 0.0;
  std::size_t realized = 0;
};

// Per-sample gradients over one minibatch, reduced in ascending index order.
// Divides by the nominal batch size rather than the realized one so empty or
// short Poisson batches keep the mechanism's sensitivity accounting intact.
BatchDirections batch_directions(const Problem& problem, const Vector& x,
                                 const std::vector<std::size_t>& batch,
                                 double c1, std::size_t nominal_batch,
                                 bool want_raw, bool normalize) {
  BatchDirections out;
  out.realized = batch.size();
  out.clipped_mean = zeros(problem.dimension());
  if (want_raw) out.raw_mean = zeros(problem.dimension());
  std::size_t shrunk = 0;
  for (std::size_t i : batch) {
    const Vector g = per_sample_gradient(problem, x, i);
    if (normalize) {
      if (norm(g) > c1) ++shrunk;
      axpy(out.clipped_mean, 1.0, normalize_to(g, c1));
    } else {
      const ClipResult c = clip(g, c1);
      if (c.was_clipped) ++shrunk;
      axpy(out.clipped_mean, 1.0, c.vector);
    }
    if (want_raw) axpy(out.raw_mean, 1.0, g);
  }
  const double inv_b = 1.0 / static_cast<double>(nominal_batch);
  out.clipped_mean = scale(out.clipped_mean, inv_b);
  if (want_raw) out.raw_mean = scale(out.raw_mean, inv_b);
  out.clip_fraction = out.realized == 0
                          ? 0.0
                          : static_cast<double>(shrunk) /
                                static_cast<double>(out.realized);
  return out;
}

StepReport begin_report(const Problem& problem, const OptimizerState& state) {
  StepReport r;
  r.loss = average_loss(problem, state.x);
  r.grad_norm = norm(full_gradient(problem, state.x));
  r.e_norm = norm(state.e);
  return r;
}

void finish_step(OptimizerState& state) {
  if (!all_finite(state.x)) {
    throw NumericalError("step " + std::to_string(state.step) +
                         ": iterate became non-finite");
  }
  if (!all_finite(state.e)) {
    throw NumericalError("step " + std::to_string(state.step) +
                         ": error state became non-finite");
  }
  ++state.step;
}

}  // namespace

void validate(const HyperParams& hp) {
  // eta == 0 is legal (a frozen iterate); negative or non-finite is not.
  if (!std::isfinite(hp.eta) || hp.eta < 0.0) {
    throw ConfigError("HyperParams: eta must be finite and >= 0");
  }
  if (!std::isfinite(hp.sigma1) || hp.sigma1 < 0.0) {
    throw ConfigError("HyperParams: sigma1 must be finite and >= 0");
  }
  validate(hp.clip);
  // horizon == 0 is legal and means an empty run.
  if (hp.schedule == StepsizeSchedule::kWarmupThenDecay &&
      hp.warmup_steps > hp.horizon) {
    throw ConfigError("HyperParams: warmup_steps exceeds horizon");
  }
  if (hp.adam.beta1 < 0.0 || hp.adam.beta1 >= 1.0 || hp.adam.beta2 < 0.0 ||
      hp.adam.beta2 >= 1.0) {
    throw ConfigError("HyperParams: Adam betas must lie in [0, 1)");
  }
  if (!std::isfinite(hp.adam.eps1) || hp.adam.eps1 <= 0.0) {
    throw ConfigError("HyperParams: Adam eps1 must be positive");
  }
}

double stepsize_at(const HyperParams& hp, std::size_t t) {
  const double T = static_cast<double>(hp.horizon);
  switch (hp.schedule) {
    case StepsizeSchedule::kConstant:
      return hp.eta;
    case StepsizeSchedule::kLinearDecay:
      return hp.eta * (1.0 - static_cast<double>(t) / T);
    case StepsizeSchedule::kWarmupThenDecay: {
      const std::size_t w = hp.warmup_steps;
      if (t < w) {
        return hp.eta * static_cast<double>(t + 1) / static_cast<double>(w);
      }
      const double rest = static_cast<double>(hp.horizon - w);
      return hp.eta * (1.0 - static_cast<double>(t - w) / rest);
    }
  }
  throw ConfigError("stepsize_at: unknown schedule");
}

OptimizerState make_state(const Vector& x0) {
  OptimizerState s;
  s.x = x0;
  s.e = zeros(x0.size());
  s.m1 = zeros(x0.size());
  s.m2 = zeros(x0.size());
  return s;
}

StepReport dpsgd_gc_step(OptimizerState& state, const Problem& problem,
                         MinibatchSampler& sampler, NoiseSource& noise,
                         const HyperParams& hp) {
  StepReport r = begin_report(problem, state);
  const std::vector<std::size_t> batch = sampler.draw(problem.size());
  const std::size_t b = sampler.nominal_batch();
  const BatchDirections d = batch_directions(problem, state.x, batch,
                                             hp.clip.c1, b,
                                             /*want_raw=*/false,
                                             /*normalize=*/false);
  // Sum-level noise: x <- x - eta/B (sum of clipped gradients + w).
  const Vector w = noise.gaussian_vector(problem.dimension(), hp.sigma1);
  const double eta = stepsize_at(hp, state.step);
  Vector update = d.clipped_mean;  // already sum/B
  axpy(update, 1.0 / static_cast<double>(b), w);
  axpy(state.x, -eta, update);
  r.alpha_e = 1.0;
  r.clip_fraction = d.clip_fraction;
  r.realized_batch = d.realized;
  finish_step(state);
  return r;
}

StepReport dicesgd_step(OptimizerState& state, const Problem& problem,
                        MinibatchSampler& sampler, NoiseSource& noise,
                        const HyperParams& hp) {
  StepReport r = begin_report(problem, state);
  const std::vector<std::size_t> batch = sampler.draw(problem.size());
  const std::size_t b = sampler.nominal_batch();
  const BatchDirections d = batch_directions(problem, state.x, batch,
                                             hp.clip.c1, b,
                                             /*want_raw=*/true,
                                             /*normalize=*/false);
  const ClipResult ec = clip(state.e, hp.clip.c2);
  const Vector v = add(d.clipped_mean, ec.vector);
  const Vector w = noise.gaussian_vector(problem.dimension(), hp.sigma1);
  const double eta = stepsize_at(hp, state.step);
  // Mean-level noise: x <- x - eta (v + w); e <- e + raw_mean - v.
  Vector update = add(v, w);
  axpy(state.x, -eta, update);
  axpy(state.e, 1.0, sub(d.raw_mean, v));
  r.alpha_e = ec.factor;
  r.clip_fraction = d.clip_fraction;
  r.realized_batch = d.realized;
  finish_step(state);
  return r;
}

StepReport adam_dicesgd_step(OptimizerState& state, const Problem& problem,
                             MinibatchSampler& sampler, NoiseSource& noise,
                             const HyperParams& hp) {
  StepReport r = begin_report(problem, state);
  const std::vector<std::size_t> batch = sampler.draw(problem.size());
  const std::size_t b = sampler.nominal_batch();
  const BatchDirections d = batch_directions(problem, state.x, batch,
                                             hp.clip.c1, b,
                                             /*want_raw=*/true,
                                             /*normalize=*/false);
  const ClipResult ec = clip(state.e, hp.clip.c2);
  const Vector direction = add(d.clipped_mean, ec.vector);
  const Vector w = noise.gaussian_vector(problem.dimension(), hp.sigma1);
  const Vector v = add(direction, w);

  const double b1 = hp.adam.beta1;
  const double b2 = hp.adam.beta2;
  // state.step counts completed steps, so the first update uses exponent 1.
  const double age = static_cast<double>(state.step + 1);
  const double corr1 = 1.0 - std::pow(b1, age);
  const double corr2 = 1.0 - std::pow(b2, age);
  const double eta = stepsize_at(hp, state.step);
  for (std::size_t j = 0; j < state.x.size(); ++j) {
    state.m1[j] = b1 * state.m1[j] + (1.0 - b1) * v[j];
    state.m2[j] = b2 * state.m2[j] + (1.0 - b2) * v[j] * v[j];
    const double m1_hat = state.m1[j] / corr1;
    const double m2_hat = state.m2[j] / corr2;
    state.x[j] -= eta * m1_hat / (std::sqrt(m2_hat) + hp.adam.eps1);
  }
  // The error state never sees the noise: feed back against the noiseless
  // direction at the same iterate.
  axpy(state.e, 1.0, sub(d.raw_mean, direction));
  r.alpha_e = ec.factor;
  r.clip_fraction = d.clip_fraction;
  r.realized_batch = d.realized;
  finish_step(state);
  return r;
}

StepReport automatic_dicesgd_step(OptimizerState& state,
                                  const Problem& problem,
                                  MinibatchSampler& sampler,
                                  NoiseSource& noise, const HyperParams& hp) {
  StepReport r = begin_report(problem, state);
  const std::vector<std::size_t> batch = sampler.draw(problem.size());
  const std::size_t b = sampler.nominal_batch();
  const BatchDirections d = batch_directions(problem, state.x, batch,
                                             /*c1=*/1.0, b,
                                             /*want_raw=*/true,
                                             /*normalize=*/true);
  const double e_norm = norm(state.e);
  const Vector en = normalize_to(state.e, 1.0);
  const Vector v = add(d.clipped_mean, en);
  const Vector w = noise.gaussian_vector(problem.dimension(), hp.sigma1);
  const double eta = stepsize_at(hp, state.step);
  Vector update = add(v, w);
  axpy(state.x, -eta, update);
  axpy(state.e, 1.0, sub(d.raw_mean, v));
  // Contraction component of the normalization factor: inflation of a
  // sub-unit error state reports 1 (no contraction) so the value stays in
  // (0, 1] for downstream weighting.
  r.alpha_e = e_norm == 0.0 ? 1.0 : std::min(1.0, 1.0 / e_norm);
  r.clip_fraction = d.clip_fraction;
  r.realized_batch = d.realized;
  finish_step(state);
  return r;
}

StepReport take_step(Algorithm alg, OptimizerState& state,
                     const Problem& problem, MinibatchSampler& sampler,
                     NoiseSource& noise, const HyperParams& hp) {
  switch (alg) {
    case Algorithm::kDpsgdGc:
      return dpsgd_gc_step(state, problem, sampler, noise, hp);
    case Algorithm::kDiceSgd:
      return dicesgd_step(state, problem, sampler, noise, hp);
    case Algorithm::kAdamDiceSgd:
      return adam_dicesgd_step(state, problem, sampler, noise, hp);
    case Algorithm::kAutomaticDiceSgd:
      return automatic_dicesgd_step(state, problem, sampler, noise, hp);
  }
  throw ConfigError("take_step: unknown algorithm");
}

RunResult run_loop(Algorithm alg, const Problem& problem,
                   const HyperParams& hp, const Vector& x0, SamplingMode mode,
                   std::size_t batch, std::uint64_t sampling_seed,
                   std::uint64_t noise_seed) {
  validate(hp);
  if (batch == 0) {
    throw ConfigError("run_loop: batch must be >= 1");
  }
  if (x0.size() != problem.dimension()) {
    throw ConfigError("run_loop: x0 dimension " + std::to_string(x0.size()) +
                      " does not match problem dimension " +
                      std::to_string(problem.dimension()));
  }
  require_finite(x0, "run_loop x0");
  MinibatchSampler sampler(mode, batch, sampling_seed, kSamplingStream);
  NoiseSource noise(noise_seed, kNoiseStream);
  RunResult result;
  result.state = make_state(x0);
  result.reports.reserve(hp.horizon);
  for (std::size_t t = 0; t < hp.horizon; ++t) {
    result.reports.push_back(
        take_step(alg, result.state, problem, sampler, noise, hp));
  }
  return result;
}

double analytic_stepsize(double f0_minus_fstar, double smoothness,
                         std::size_t horizon, const ClipConfig& clip,
                         std::size_t dim, double sigma1) {
  if (!std::isfinite(f0_minus_fstar) || f0_minus_fstar <= 0.0) {
    throw ConfigError("analytic_stepsize: f0 - fstar must be positive");
  }
  if (!std::isfinite(smoothness) || smoothness <= 0.0) {
    throw ConfigError("analytic_stepsize: smoothness must be positive");
  }
  if (horizon == 0) throw ConfigError("analytic_stepsize: horizon must be >= 1");
  validate(clip);
  if (!std::isfinite(sigma1) || sigma1 < 0.0) {
    throw ConfigError("analytic_stepsize: sigma1 must be >= 0");
  }
  const double scale = 2.0 * clip.c1 * clip.c1 + 3.0 * clip.c2 * clip.c2 +
                       static_cast<double>(dim) * sigma1 * sigma1;
  return std::sqrt(2.0 * f0_minus_fstar /
                   (static_cast<double>(horizon) * smoothness * scale));
}

bool c2_threshold_ok(const ClipConfig& clip, double gradient_spread,
                     std::size_t batch) {
  validate(clip);
  if (!std::isfinite(gradient_spread) || gradient_spread < 0.0) {
    throw ConfigError("c2_threshold_ok: gradient_spread must be >= 0");
  }
  if (batch == 0) throw ConfigError("c2_threshold_ok: batch must be >= 1");
  // A hair of relative slack so that decimal-literal boundaries (e.g. 0.3
  // against 3 * 0.1) count as meeting the threshold.
  const double needed = 3.0 * clip.c1 + gradient_spread / static_cast<double>(batch);
  return clip.c2 >= needed - 1e-12 * std::max(1.0, needed);
}

}  // namespace dice
