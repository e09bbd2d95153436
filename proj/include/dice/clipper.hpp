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

#ifndef DICE_CLIPPER_HPP_
#define DICE_CLIPPER_HPP_

#include <cstddef>

#include "dice/vector.hpp"

namespace dice {

// Thresholds for the two-clip update: c1 bounds each per-sample gradient,
// c2 bounds the fed-back error state. Both must be positive and finite.
struct ClipConfig {
  double c1 = 1.0;
  double c2 = 1.0;
};

void validate(const ClipConfig& cfg);

// The privacy analysis assumes the error threshold dominates the gradient
// threshold. Recorded in run metadata; never enforced.
inline bool privacy_consistent(const ClipConfig& cfg) {
  return cfg.c2 >= cfg.c1;
}

struct ClipResult {
  Vector vector;      // min{1, threshold/||v||} * v
  double factor;      // the multiplier applied (1 when inside the ball)
  bool was_clipped;   // true iff factor < 1
};

// Norm clipping. The zero vector and any vector with ||v|| <= threshold pass
// through with factor 1. threshold must be positive (+infinity allowed, which
// makes clipping a no-op).
ClipResult clip(const Vector& v, double threshold);

// v - clip(v, threshold): zero inside the ball, (1 - threshold/||v||) v
// outside. Non-expansive in v, with ||clip_residual(v)|| = max(0, ||v|| - c).
Vector clip_residual(const Vector& v, double threshold);

// Full normalization (threshold/||v||) * v: shrinks large vectors AND
// inflates small ones onto the radius-threshold sphere. The zero vector maps
// to itself.
Vector normalize_to(const Vector& v, double threshold);

// Lower bound on the error-clip factor after t steps when per-sample
// gradients are bounded: min{1, c2 / (c2 + t * max{0, g_prime - c2})} with
// g_prime = max{0, G + sigma - c1} supplied by the caller. g_prime may be
// +infinity (bound degenerates to 0 for t >= 1).
double alpha_e_lower_bound(std::size_t t, double c2, double g_prime);

}  // namespace dice

#endif  // DICE_CLIPPER_HPP_
