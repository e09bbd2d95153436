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

#include "dice/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "dice/errors.hpp"

namespace dice {

std::uint64_t BitSource::uniform_below(std::uint64_t bound) {
  if (bound == 0) {
    throw ConfigError("uniform_below: bound must be positive");
  }
  // Reject draws from the incomplete final copy of [0, bound) so every value
  // is exactly equally likely.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (max % bound + 1) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = bits();
    if (rem == 0 || r <= max - rem) return r % bound;
  }
}

double NoiseSource::standard_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * bits_.uniform01() - 1.0;
    v = 2.0 * bits_.uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * m;
  has_cached_ = true;
  return u * m;
}

Vector NoiseSource::gaussian_vector(std::size_t dim, double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw ConfigError("gaussian_vector: sigma must be finite and >= 0");
  }
  if (sigma == 0.0) return zeros(dim);
  Vector out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = sigma * standard_normal();
  return out;
}

MinibatchSampler::MinibatchSampler(SamplingMode mode, std::size_t nominal_batch,
                                   std::uint64_t seed, std::uint64_t stream_id)
    : mode_(mode), nominal_batch_(nominal_batch), bits_(seed, stream_id) {}

std::vector<std::size_t> MinibatchSampler::draw(std::size_t population) {
  if (population == 0) {
    throw ConfigError("MinibatchSampler: population must be >= 1");
  }
  if (nominal_batch_ > population) {
    throw ConfigError("MinibatchSampler: batch " +
                      std::to_string(nominal_batch_) + " exceeds population " +
                      std::to_string(population));
  }
  std::vector<std::size_t> out;
  if (nominal_batch_ == 0) return out;  // p = 0: always the empty batch
  if (mode_ == SamplingMode::kPoisson) {
    // One uniform per index, consumed in index order, so the draw sequence
    // does not depend on which indices end up included.
    const double p = static_cast<double>(nominal_batch_) /
                     static_cast<double>(population);
    for (std::size_t i = 0; i < population; ++i) {
      if (bits_.uniform01() < p) out.push_back(i);
    }
    return out;  // already ascending
  }
  // Partial Fisher-Yates: the first nominal_batch_ slots end up a uniform
  // sample without replacement.
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t j = 0; j < nominal_batch_; ++j) {
    const std::size_t k =
        j + static_cast<std::size_t>(bits_.uniform_below(population - j));
    std::swap(idx[j], idx[k]);
  }
  out.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(nominal_batch_));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dice
