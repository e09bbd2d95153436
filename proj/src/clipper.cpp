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

#include "dice/clipper.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "dice/errors.hpp"

namespace dice {
namespace {

void check_threshold(double threshold, const char* where) {
  // +infinity is a legal no-op threshold; NaN and non-positive values are not.
  if (std::isnan(threshold) || threshold <= 0.0) {
    throw ConfigError(std::string(where) + ": threshold must be positive");
  }
}

// Splits v into factor*v and (1-factor)*v so the two pieces re-add to v with
// no rounding: the larger piece is scaled directly and the smaller recovered
// by subtraction, which is exact when the operands are within a factor of
// two of each other (Sterbenz). Either output may be null when unwanted.
void split_at_factor(const Vector& v, double factor, Vector* clipped,
                     Vector* residual) {
  if (factor >= 0.5) {
    Vector c = scale(v, factor);
    if (residual != nullptr) *residual = sub(v, c);
    if (clipped != nullptr) *clipped = std::move(c);
  } else {
    Vector r = scale(v, 1.0 - factor);
    if (clipped != nullptr) *clipped = sub(v, r);
    if (residual != nullptr) *residual = std::move(r);
  }
}

}  // namespace

void validate(const ClipConfig& cfg) {
  if (!std::isfinite(cfg.c1) || cfg.c1 <= 0.0) {
    throw ConfigError("ClipConfig: c1 must be finite and positive");
  }
  if (!std::isfinite(cfg.c2) || cfg.c2 <= 0.0) {
    throw ConfigError("ClipConfig: c2 must be finite and positive");
  }
}

ClipResult clip(const Vector& v, double threshold) {
  check_threshold(threshold, "clip");
  require_finite(v, "clip");
  const double n = norm(v);
  if (n <= threshold) {
    return ClipResult{v, 1.0, false};
  }
  const double factor = threshold / n;
  Vector clipped;
  split_at_factor(v, factor, &clipped, nullptr);
  return ClipResult{std::move(clipped), factor, true};
}

Vector clip_residual(const Vector& v, double threshold) {
  check_threshold(threshold, "clip_residual");
  require_finite(v, "clip_residual");
  const double n = norm(v);
  if (n <= threshold) return zeros(v.size());
  Vector residual;
  split_at_factor(v, threshold / n, nullptr, &residual);
  return residual;
}

Vector normalize_to(const Vector& v, double threshold) {
  check_threshold(threshold, "normalize_to");
  if (!std::isfinite(threshold)) {
    throw ConfigError("normalize_to: threshold must be finite");
  }
  require_finite(v, "normalize_to");
  const double n = norm(v);
  if (n == 0.0) return zeros(v.size());
  return scale(v, threshold / n);
}

double alpha_e_lower_bound(std::size_t t, double c2, double g_prime) {
  if (!std::isfinite(c2) || c2 <= 0.0) {
    throw ConfigError("alpha_e_lower_bound: c2 must be finite and positive");
  }
  if (std::isnan(g_prime) || g_prime < 0.0) {
    throw ConfigError("alpha_e_lower_bound: g_prime must be >= 0");
  }
  const double excess = std::max(0.0, g_prime - c2);
  if (t == 0 || excess == 0.0) return 1.0;
  // c2 / (c2 + t * excess); excess may be +infinity, giving a vacuous 0.
  const double denom = c2 + static_cast<double>(t) * excess;
  return std::min(1.0, c2 / denom);
}

}  // namespace dice
