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

#ifndef DICE_RANDOM_HPP_
#define DICE_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dice/vector.hpp"

namespace dice {

// All randomness in the project flows through the two sources below so that
// a (seed, stream_id) pair fully determines every draw, bit for bit, across
// platforms. The generation algorithms are pinned:
//   * engine: std::mt19937_64 (state evolution is standard-mandated),
//     seeded by two rounds of the splitmix64 mix over (seed, stream_id);
//   * uniforms: top 53 bits of one engine output, scaled by 2^-53, in [0,1);
//   * normals: Marsaglia polar method over those uniforms (pairs cached);
//   * bounded integers: rejection sampling on raw engine outputs (unbiased).
// Gaussian noise and minibatch selection must use distinct stream ids so that
// changing the noise scale never perturbs the subsampling pattern.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Collapses (seed, stream_id) into one engine seed. Distinct stream ids give
// statistically unrelated engine states for the same user-facing seed.
inline std::uint64_t derive_stream_seed(std::uint64_t seed,
                                        std::uint64_t stream_id) {
  std::uint64_t state = seed;
  std::uint64_t mixed = splitmix64_next(state);
  state = mixed ^ (stream_id * 0xD1B54A32D192ED03ULL);
  return splitmix64_next(state);
}

// Deterministic uniform bit/real source (see pinning note above).
class BitSource {
 public:
  explicit BitSource(std::uint64_t seed, std::uint64_t stream_id = 0)
      : engine_(derive_stream_seed(seed, stream_id)) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform double in [0, 1), 53 random bits.
  double uniform01() {
    return static_cast<double>(bits() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound); bound must be positive. Unbiased.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Deterministic Gaussian source (Marsaglia polar method, pairs cached).
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed, std::uint64_t stream_id = 0)
      : bits_(seed, stream_id) {}

  double standard_normal();

  // Vector of dim i.i.d. N(0, sigma^2) draws. sigma == 0 returns the zero
  // vector exactly and consumes no randomness; sigma < 0 or non-finite is a
  // configuration error.
  Vector gaussian_vector(std::size_t dim, double sigma);

 private:
  BitSource bits_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

enum class SamplingMode {
  kPoisson,               // include each index independently with p = B/N
  kUniformNoReplacement,  // exactly B distinct indices, uniform
};

// Draws minibatch index sets over a population of size N. Indices are
// returned in ascending order; downstream reductions sum in that order so
// traces are bit-reproducible. A fixed (mode, batch, seed, stream) produces
// the same sequence of draws regardless of what the caller does with them.
class MinibatchSampler {
 public:
  MinibatchSampler(SamplingMode mode, std::size_t nominal_batch,
                   std::uint64_t seed, std::uint64_t stream_id = 0);

  // One minibatch over indices {0, ..., population-1}. Poisson mode returns
  // a set of random size (possibly empty); uniform mode returns exactly
  // nominal_batch indices. A zero nominal batch always yields the empty set
  // (inclusion probability 0); nominal_batch > population is a config error.
  std::vector<std::size_t> draw(std::size_t population);

  SamplingMode mode() const { return mode_; }
  std::size_t nominal_batch() const { return nominal_batch_; }

 private:
  SamplingMode mode_;
  std::size_t nominal_batch_;
  BitSource bits_;
};

}  // namespace dice

#endif  // DICE_RANDOM_HPP_
