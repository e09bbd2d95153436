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

#ifndef DICE_ACCOUNTANT_HPP_
#define DICE_ACCOUNTANT_HPP_

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "dice/clipper.hpp"

namespace dice {

// All logarithms in this module are natural logarithms.

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;
};

void validate(const PrivacyBudget& budget);

struct RdpPoint {
  double alpha = 2.0;
  double epsilon = 0.0;
};

// Ordered (alpha, eps) samples of a Renyi-DP curve. Alphas must be strictly
// increasing and > 1, epsilons finite and >= 0.
struct RdpCurve {
  std::vector<RdpPoint> points;
};

void validate(const RdpCurve& curve);

// Integer Renyi orders scanned by calibrators and conversion minimizers.
inline constexpr int kAlphaGridMin = 2;
inline constexpr int kAlphaGridMax = 256;

// Renyi divergence of order alpha between N(0, sigma^2 I) shifted by a
// vector of length `distance`: alpha * distance^2 / (2 sigma^2).
double gaussian_rdp(double distance, double sigma, double alpha);

// Triangle-style composition of two Renyi bounds with free weight beta > 0:
// (1 + beta) eps_ac + (1 + 1/beta) eps_cb.
double rdp_triangle(double eps_ac, double eps_cb, double beta);

// Renyi bound for the subsampled Gaussian mechanism at sampling rate `rate`,
// query sensitivity `sensitivity`, noise scale sigma, order alpha:
// 2 rate^2 sensitivity^2 alpha / sigma^2, valid only when
//   rate <= 1/5, sigma > 4 * sensitivity, and
//   alpha <= sigma^2 c3 / 2 - 2 ln(sigma) and
//   alpha <= (sigma^2 c3^2 / 2 - ln 5 - 2 ln sigma) /
//            (c3 + ln(rate * alpha) + 1/(2 sigma^2)),
// with c3 = 1 + 1/(rate (alpha - 1)). Out-of-validity inputs return nullopt
// (a value, not an error); rate == 0 or sensitivity == 0 return 0.
std::optional<double> subsampled_gaussian_rdp(double rate, double sensitivity,
                                              double sigma, double alpha);

// Standard conversion: eps_dp = eps_rdp + ln(1/delta) / (alpha - 1).
double rdp_to_dp(double alpha, double rdp_epsilon, double delta);

// Smallest converted (eps, delta)-DP value over the integer alpha grid for a
// curve of total Renyi costs. Returns (epsilon, alpha) of the argmin.
struct ConvertedBound {
  double epsilon = 0.0;
  double alpha = 0.0;
};
ConvertedBound best_converted_bound(const RdpCurve& curve, double delta);

// Converted bound at the best grid order for the T-composed two-clip curve
// alpha -> 16 alpha T g_tilde / (sigma1^2 N^2). Used for run-metadata
// self-checks.
ConvertedBound composed_two_clip_check(double sigma1, double g_tilde,
                                       std::size_t horizon,
                                       std::size_t dataset_size, double delta);

enum class PerStepRdpVariant {
  kMeanThreshold,  // error term capped by min{c2^2, g_prime^2}
  kBatchScaled,    // tighter cap min{c2^2 B^2, g_prime^2} / B^2
};

// Per-step Renyi cost of the two-clip method at 0-based step t:
//   (16 alpha / (sigma1^2 N^2)) * (c1^2 + ratio(t) * cap)
// where ratio(t) = (r (t+1) + 2) / (max{r (t-1), 0} + 1) with
// r = max{g_prime - c2, 0} / c2, and cap as selected by the variant.
// g_prime may be +infinity: the cost is +infinity for t <= 1 and follows the
// limit ratio (t+1)/(t-1) afterwards. ratio == 2 whenever g_prime <= c2.
double dicesgd_per_step_rdp(std::size_t t, double alpha, double sigma1,
                            std::size_t dataset_size, const ClipConfig& clip,
                            double g_prime,
                            PerStepRdpVariant variant =
                                PerStepRdpVariant::kMeanThreshold,
                            std::size_t batch = 1);

struct CalibrationInputs {
  std::size_t horizon = 1;       // T
  std::size_t dataset_size = 1;  // N
  std::size_t batch = 1;         // B
  ClipConfig clip;               // c1, c2
  double sum_threshold = 1.0;    // C: single threshold (baseline clip level
                                 // and the cap in the g_tilde term)
  double g_prime = std::numeric_limits<double>::infinity();  // G'; +inf means
                                 // "unknown", which keeps the conservative
                                 // min{C^2, G'^2} = C^2 branch
};

struct CalibrationResult {
  double sigma1 = 0.0;
  double g_tilde = 0.0;        // c1^2 + 2 min{C^2, g_prime^2} (two-clip only)
  double alpha_star = 0.0;     // grid order minimizing the converted bound
  double epsilon_check = 0.0;  // converted bound of the T-composed Renyi
                               // cost at alpha_star (self-check; see below)
  bool threshold_cap_ok = true;  // c2 <= C / B (recorded, not enforced)
};

// Closed-form noise scale for the two-clip method:
//   sigma1 = sqrt(32 T g_tilde ln(1/delta) / (N^2 eps^2)),
// g_tilde = c1^2 + 2 min{C^2, g_prime^2}. Requires B <= N and B/N <= 1/5
// (calibration error otherwise). c2 <= C/B is recorded in threshold_cap_ok
// rather than enforced; the constant is derived under that cap but the
// reference instantiations themselves take c2 = C with B > 1.
//
// epsilon_check reports min over the alpha grid of
// rdp_to_dp(alpha, 16 alpha T g_tilde / (sigma1^2 N^2), delta). With this
// closed form the minimum equals sqrt(2) eps + eps^2 / (2 ln(1/delta)),
// which exceeds eps for every budget: the constant is tight only per step,
// not through the final conversion. The value is surfaced so callers can see
// the slack; it is informational, not an acceptance gate.
CalibrationResult calibrate_dicesgd(const CalibrationInputs& inputs,
                                    const PrivacyBudget& budget);

// Minimal sigma1 (relative tolerance 1e-6, bisection) such that some grid
// alpha has T * subsampled_gaussian_rdp(B/N, C, sigma1, alpha) converting to
// at most eps. Sensitivity is the sum-form threshold C. Raises a calibration
// error if no sigma1 <= 1e6 * C works.
CalibrationResult calibrate_dpsgd_gc(const CalibrationInputs& inputs,
                                     const PrivacyBudget& budget);

// Noise scale for the normalized variant: sigma1 =
// sqrt(96 T ln(1/delta)) * threshold / (N eps). Identical to
// calibrate_dicesgd with c1 = c2 = C and unknown g_prime (g_tilde = 3 C^2).
double calibrate_automatic(std::size_t horizon, std::size_t dataset_size,
                           const PrivacyBudget& budget,
                           double threshold = 1.0);

}  // namespace dice

#endif  // DICE_ACCOUNTANT_HPP_
