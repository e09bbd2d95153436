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

#ifndef DICE_VECTOR_HPP_
#define DICE_VECTOR_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dice/errors.hpp"

namespace dice {

// Dense real vector with value semantics. All elementwise helpers check
// dimensions; mismatches are configuration errors, not undefined behavior.
using Vector = std::vector<double>;

inline void require_same_dim(const Vector& a, const Vector& b,
                             const char* where) {
  if (a.size() != b.size()) {
    throw ConfigError(std::string(where) + ": dimension mismatch (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
}

inline bool all_finite(const Vector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require_finite(const Vector& v, const char* where) {
  if (!all_finite(v)) {
    throw NumericalError(std::string(where) + ": non-finite component");
  }
}

inline Vector zeros(std::size_t dim) { return Vector(dim, 0.0); }

inline Vector add(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vector sub(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "sub");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector scale(const Vector& a, double s) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

// a += s * b, in place.
inline void axpy(Vector& a, double s, const Vector& b) {
  require_same_dim(a, b, "axpy");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

inline double dot(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const Vector& a) { return dot(a, a); }

inline double norm(const Vector& a) { return std::sqrt(squared_norm(a)); }

}  // namespace dice

#endif  // DICE_VECTOR_HPP_
