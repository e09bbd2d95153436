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

#include "dice/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dice/errors.hpp"
#include "dice/hash.hpp"
#include "dice/optimizers.hpp"

namespace dice {
namespace {

constexpr double kGridStep = 1e-3;
constexpr double kBisectWidth = 1e-12;

// Local norm clipping, independent of the clipper module on purpose.
double clip_scalar(double v, double threshold) {
  return std::clamp(v, -threshold, threshold);
}

Vector clip_vector_local(const Vector& v, double threshold) {
  double sq = 0.0;
  for (double c : v) sq += c * c;
  const double n = std::sqrt(sq);
  if (n <= threshold) return v;
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * (threshold / n);
  return out;
}

double mean_clipped_gradient_1d(const Problem& problem, double x,
                                double threshold) {
  const Vector point{x};
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    sum += clip_scalar(problem.sample_gradient(point, i)[0], threshold);
  }
  return sum / static_cast<double>(problem.size());
}

}  // namespace

CounterexampleProblem::CounterexampleProblem(double threshold)
    : threshold_(threshold) {
  if (!std::isfinite(threshold) || threshold <= 0.0) {
    throw ConfigError("CounterexampleProblem: threshold must be positive");
  }
  saturation_ = std::ceil(threshold) + 1.0;
  const std::size_t copies = static_cast<std::size_t>(saturation_);
  samples_.assign(copies, -1.0);
  samples_.push_back(saturation_);
}

double CounterexampleProblem::sample_loss(const Vector& x,
                                          std::size_t index) const {
  const double d = x[0] - samples_[index];
  const double s = saturation_;
  if (std::abs(d) <= s) return 0.5 * d * d;
  return s * std::abs(d) - 0.5 * s * s;
}

Vector CounterexampleProblem::sample_gradient(const Vector& x,
                                              std::size_t index) const {
  return Vector{clip_scalar(x[0] - samples_[index], saturation_)};
}

ProblemHints CounterexampleProblem::hints() const {
  ProblemHints h;
  h.smoothness = 1.0;  // each piece has curvature at most 1
  h.gradient_bound = saturation_;
  // Conservative deviation bound: per-sample gradients live in
  // [-sat, sat], so mean squared deviation is at most (2 sat)^2.
  h.gradient_spread = 2.0 * saturation_ *
                      std::sqrt(static_cast<double>(samples_.size()));
  // The unclipped mean gradient is nondecreasing in x and vanishes at 0, so
  // 0 minimizes the objective.
  double f0 = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    f0 += sample_loss(Vector{0.0}, i);
  }
  h.optimal_value = f0 / static_cast<double>(samples_.size());
  return h;
}

std::string CounterexampleProblem::descriptor() const {
  std::uint64_t h = fnv1a64_doubles(samples_);
  const std::uint64_t th = fnv1a64_doubles({threshold_});
  h = fnv1a64(&th, sizeof(th), h);
  return "counterexample(n=" + std::to_string(size()) +
         ",d=1,data=" + hex64(h) + ")";
}

CounterexampleProblem build_counterexample(double threshold) {
  return CounterexampleProblem(threshold);
}

FixedPointReport clipped_fixed_point(const Problem& problem, double threshold,
                                     double lo, double hi) {
  if (problem.dimension() != 1) {
    throw ConfigError("clipped_fixed_point: problem must be one-dimensional");
  }
  if (std::isnan(threshold) || threshold <= 0.0) {
    throw ConfigError("clipped_fixed_point: threshold must be positive");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi) {
    throw ConfigError("clipped_fixed_point: need finite lo < hi");
  }
  FixedPointReport report;
  report.scan_lo = lo;
  report.scan_hi = hi;
  report.grid_step = kGridStep;

  const auto h = [&](double x) {
    return mean_clipped_gradient_1d(problem, x, threshold);
  };

  double prev_x = lo;
  double prev_h = h(lo);
  for (double x = lo + kGridStep; prev_x < hi; x += kGridStep) {
    if (x > hi) x = hi;
    const double hx = h(x);
    const bool bracketed = (prev_h == 0.0) || (prev_h * hx < 0.0);
    if (bracketed) {
      double a = prev_x, b = x;
      double ha = prev_h;
      if (ha == 0.0) {
        b = a;
      } else {
        while (b - a > kBisectWidth) {
          const double m = 0.5 * (a + b);
          const double hm = h(m);
          if (hm == 0.0) {
            a = b = m;
            break;
          }
          if (ha * hm < 0.0) {
            b = m;
          } else {
            a = m;
            ha = hm;
          }
        }
      }
      const double root = 0.5 * (a + b);
      if (report.roots.empty() ||
          std::abs(report.roots.back().x - root) > 1e-9) {
        report.roots.push_back({root, std::abs(h(root))});
      }
    }
    prev_x = x;
    prev_h = hx;
    if (x == hi) break;
  }
  // Endpoint root not caught by a sign change.
  if (prev_h == 0.0 &&
      (report.roots.empty() || std::abs(report.roots.back().x - hi) > 1e-9)) {
    report.roots.push_back({hi, 0.0});
  }
  return report;
}

FixedPointReport clipped_fixed_point(const Problem& problem,
                                     double threshold) {
  const ProblemHints hints = problem.hints();
  if (!hints.gradient_bound.has_value()) {
    throw ConfigError(
        "clipped_fixed_point: default scan range needs a gradient-bound hint");
  }
  const double g = hints.gradient_bound.value();
  return clipped_fixed_point(problem, threshold, -2.0 * g - 1.0,
                             2.0 * g + 1.0);
}

std::pair<double, double> dicesgd_fixed_point_check(const Problem& problem,
                                                    const ClipConfig& clip_cfg,
                                                    const Vector& x,
                                                    const Vector& e) {
  if (x.size() != problem.dimension() || e.size() != problem.dimension()) {
    throw ConfigError("dicesgd_fixed_point_check: dimension mismatch");
  }
  const double n = static_cast<double>(problem.size());
  Vector clipped_sum = zeros(problem.dimension());
  Vector raw_sum = zeros(problem.dimension());
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const Vector g = problem.sample_gradient(x, i);
    const Vector gc = clip_vector_local(g, clip_cfg.c1);
    for (std::size_t j = 0; j < g.size(); ++j) {
      clipped_sum[j] += gc[j];
      raw_sum[j] += g[j];
    }
  }
  const Vector ec = clip_vector_local(e, clip_cfg.c2);
  double v_sq = 0.0, g_sq = 0.0;
  for (std::size_t j = 0; j < clipped_sum.size(); ++j) {
    const double vj = clipped_sum[j] / n + ec[j];
    v_sq += vj * vj;
    const double gj = raw_sum[j] / n;
    g_sq += gj * gj;
  }
  return {std::sqrt(v_sq), std::sqrt(g_sq)};
}

std::vector<Vector> reference_dicesgd_trajectory(const Problem& problem,
                                                 const ClipConfig& clip_cfg,
                                                 double eta,
                                                 std::size_t horizon,
                                                 const Vector& x0) {
  const std::size_t d = problem.dimension();
  const double n = static_cast<double>(problem.size());
  Vector x = x0;
  Vector e(d, 0.0);
  std::vector<Vector> trajectory;
  trajectory.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    Vector raw_sum(d, 0.0);
    Vector clipped_sum(d, 0.0);
    for (std::size_t i = 0; i < problem.size(); ++i) {
      const Vector g = problem.sample_gradient(x, i);
      const Vector gc = clip_vector_local(g, clip_cfg.c1);
      for (std::size_t j = 0; j < d; ++j) {
        raw_sum[j] += g[j];
        clipped_sum[j] += gc[j];
      }
    }
    const Vector ec = clip_vector_local(e, clip_cfg.c2);
    Vector v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = clipped_sum[j] / n + ec[j];
    for (std::size_t j = 0; j < d; ++j) x[j] -= eta * v[j];
    for (std::size_t j = 0; j < d; ++j) e[j] += raw_sum[j] / n - v[j];
    trajectory.push_back(x);
  }
  return trajectory;
}

double small_instance_equivalence(const Problem& problem,
                                  const ClipConfig& clip_cfg, double eta,
                                  std::size_t horizon, const Vector& x0) {
  const std::vector<Vector> reference =
      reference_dicesgd_trajectory(problem, clip_cfg, eta, horizon, x0);

  HyperParams hp;
  hp.eta = eta;
  hp.sigma1 = 0.0;
  hp.clip = clip_cfg;
  hp.horizon = horizon;
  // Full batch without replacement: the production path must consume the
  // whole dataset each step for the trajectories to be comparable.
  MinibatchSampler sampler(SamplingMode::kUniformNoReplacement, problem.size(),
                           /*seed=*/0);
  NoiseSource noise(/*seed=*/0);
  OptimizerState state = make_state(x0);
  double max_dev = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    dicesgd_step(state, problem, sampler, noise, hp);
    const Vector& ref = reference[t];
    for (std::size_t j = 0; j < ref.size(); ++j) {
      max_dev = std::max(max_dev, std::abs(state.x[j] - ref[j]));
    }
  }
  return max_dev;
}

}  // namespace dice
