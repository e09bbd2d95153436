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

#include "dice/accountant.hpp"

#include <cmath>
#include <string>

#include "dice/errors.hpp"

namespace dice {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxSubsamplingRate = 0.2;            // "rate <= 1/5"
constexpr double kSigmaFloorMultiple = 4.0;            // "sigma > 4 * sens"
constexpr double kGcSearchRelTol = 1e-6;               // bisection stop
constexpr double kGcSearchCeilingMultiple = 1e6;       // sigma <= 1e6 * C

void check_order(double alpha, const char* where) {
  if (std::isnan(alpha) || alpha <= 1.0) {
    throw ConfigError(std::string(where) + ": order alpha must exceed 1");
  }
}

void validate_inputs(const CalibrationInputs& in) {
  if (in.horizon == 0) {
    throw ConfigError("CalibrationInputs: horizon must be >= 1");
  }
  if (in.dataset_size == 0) {
    throw ConfigError("CalibrationInputs: dataset_size must be >= 1");
  }
  if (in.batch == 0 || in.batch > in.dataset_size) {
    throw ConfigError("CalibrationInputs: need 1 <= batch <= dataset_size");
  }
  validate(in.clip);
  if (!std::isfinite(in.sum_threshold) || in.sum_threshold <= 0.0) {
    throw ConfigError("CalibrationInputs: sum_threshold must be positive");
  }
  if (std::isnan(in.g_prime) || in.g_prime < 0.0) {
    throw ConfigError("CalibrationInputs: g_prime must be >= 0");
  }
}

double subsampling_rate(const CalibrationInputs& in) {
  return static_cast<double>(in.batch) / static_cast<double>(in.dataset_size);
}

}  // namespace

void validate(const PrivacyBudget& budget) {
  if (!std::isfinite(budget.epsilon) || budget.epsilon <= 0.0) {
    throw ConfigError("PrivacyBudget: epsilon must be finite and positive");
  }
  if (!(budget.delta > 0.0) || !(budget.delta < 1.0)) {
    throw ConfigError("PrivacyBudget: delta must lie in (0, 1)");
  }
}

void validate(const RdpCurve& curve) {
  double prev = 1.0;
  for (const RdpPoint& p : curve.points) {
    if (std::isnan(p.alpha) || p.alpha <= prev) {
      throw DataError("RdpCurve: alphas must be strictly increasing and > 1");
    }
    if (!std::isfinite(p.epsilon) || p.epsilon < 0.0) {
      throw DataError("RdpCurve: epsilons must be finite and >= 0");
    }
    prev = p.alpha;
  }
}

double gaussian_rdp(double distance, double sigma, double alpha) {
  check_order(alpha, "gaussian_rdp");
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw ConfigError("gaussian_rdp: sigma must be positive");
  }
  if (!std::isfinite(distance) || distance < 0.0) {
    throw ConfigError("gaussian_rdp: distance must be >= 0");
  }
  return alpha * distance * distance / (2.0 * sigma * sigma);
}

double rdp_triangle(double eps_ac, double eps_cb, double beta) {
  if (!std::isfinite(eps_ac) || eps_ac < 0.0 || !std::isfinite(eps_cb) ||
      eps_cb < 0.0) {
    throw ConfigError("rdp_triangle: component bounds must be >= 0");
  }
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw ConfigError("rdp_triangle: beta must be positive");
  }
  return (1.0 + beta) * eps_ac + (1.0 + 1.0 / beta) * eps_cb;
}

std::optional<double> subsampled_gaussian_rdp(double rate, double sensitivity,
                                              double sigma, double alpha) {
  if (std::isnan(rate) || rate < 0.0 || rate > 1.0) {
    throw ConfigError("subsampled_gaussian_rdp: rate must lie in [0, 1]");
  }
  if (!std::isfinite(sensitivity) || sensitivity < 0.0) {
    throw ConfigError("subsampled_gaussian_rdp: sensitivity must be >= 0");
  }
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw ConfigError("subsampled_gaussian_rdp: sigma must be positive");
  }
  if (std::isnan(alpha) || alpha < 1.0) {
    throw ConfigError("subsampled_gaussian_rdp: alpha must be >= 1");
  }
  // Touching no data, or a zero-sensitivity query, costs nothing.
  if (rate == 0.0 || sensitivity == 0.0) return 0.0;
  if (alpha == 1.0) return std::nullopt;
  if (rate > kMaxSubsamplingRate) return std::nullopt;
  if (!(sigma > kSigmaFloorMultiple * sensitivity)) return std::nullopt;
  const double c3 = 1.0 + 1.0 / (rate * (alpha - 1.0));
  const double log_sigma = std::log(sigma);
  if (!(alpha <= sigma * sigma * c3 / 2.0 - 2.0 * log_sigma)) {
    return std::nullopt;
  }
  const double numer =
      sigma * sigma * c3 * c3 / 2.0 - std::log(5.0) - 2.0 * log_sigma;
  const double denom =
      c3 + std::log(rate * alpha) + 1.0 / (2.0 * sigma * sigma);
  if (!(denom > 0.0) || !(alpha <= numer / denom)) return std::nullopt;
  return 2.0 * rate * rate * sensitivity * sensitivity * alpha /
         (sigma * sigma);
}

double rdp_to_dp(double alpha, double rdp_epsilon, double delta) {
  check_order(alpha, "rdp_to_dp");
  if (std::isnan(rdp_epsilon) || rdp_epsilon < 0.0) {
    throw ConfigError("rdp_to_dp: rdp_epsilon must be >= 0");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw ConfigError("rdp_to_dp: delta must lie in (0, 1)");
  }
  return rdp_epsilon + std::log(1.0 / delta) / (alpha - 1.0);
}

ConvertedBound best_converted_bound(const RdpCurve& curve, double delta) {
  validate(curve);
  if (curve.points.empty()) {
    throw ConfigError("best_converted_bound: empty curve");
  }
  ConvertedBound best{kInf, 0.0};
  for (const RdpPoint& p : curve.points) {
    const double eps = rdp_to_dp(p.alpha, p.epsilon, delta);
    if (eps < best.epsilon) best = ConvertedBound{eps, p.alpha};
  }
  return best;
}

ConvertedBound composed_two_clip_check(double sigma1, double g_tilde,
                                       std::size_t horizon,
                                       std::size_t dataset_size,
                                       double delta) {
  if (!std::isfinite(sigma1) || sigma1 <= 0.0) {
    throw ConfigError("composed_two_clip_check: sigma1 must be positive");
  }
  if (!std::isfinite(g_tilde) || g_tilde <= 0.0) {
    throw ConfigError("composed_two_clip_check: g_tilde must be positive");
  }
  if (horizon == 0 || dataset_size == 0) {
    throw ConfigError("composed_two_clip_check: horizon and N must be >= 1");
  }
  const double T = static_cast<double>(horizon);
  const double n = static_cast<double>(dataset_size);
  RdpCurve curve;
  for (int a = kAlphaGridMin; a <= kAlphaGridMax; ++a) {
    const double alpha = static_cast<double>(a);
    curve.points.push_back(
        RdpPoint{alpha, 16.0 * alpha * T * g_tilde / (sigma1 * sigma1 * n * n)});
  }
  return best_converted_bound(curve, delta);
}

double dicesgd_per_step_rdp(std::size_t t, double alpha, double sigma1,
                            std::size_t dataset_size, const ClipConfig& clip,
                            double g_prime, PerStepRdpVariant variant,
                            std::size_t batch) {
  check_order(alpha, "dicesgd_per_step_rdp");
  if (!std::isfinite(sigma1) || sigma1 <= 0.0) {
    throw ConfigError("dicesgd_per_step_rdp: sigma1 must be positive");
  }
  if (dataset_size == 0) {
    throw ConfigError("dicesgd_per_step_rdp: dataset_size must be >= 1");
  }
  if (batch == 0) {
    throw ConfigError("dicesgd_per_step_rdp: batch must be >= 1");
  }
  validate(clip);
  if (std::isnan(g_prime) || g_prime < 0.0) {
    throw ConfigError("dicesgd_per_step_rdp: g_prime must be >= 0");
  }

  const double c2 = clip.c2;
  double ratio;
  if (!(g_prime > c2)) {
    ratio = 2.0;
  } else if (std::isinf(g_prime)) {
    // Limit of (r (t+1) + 2) / (r (t-1) + 1) as r -> infinity.
    ratio = t <= 1 ? kInf
                   : static_cast<double>(t + 1) / static_cast<double>(t - 1);
  } else {
    const double r = (g_prime - c2) / c2;
    const double numer = r * static_cast<double>(t + 1) + 2.0;
    const double denom =
        t <= 1 ? 1.0 : r * static_cast<double>(t - 1) + 1.0;
    ratio = numer / denom;
  }

  double cap;
  if (variant == PerStepRdpVariant::kMeanThreshold) {
    cap = std::min(c2 * c2, g_prime * g_prime);
  } else {
    const double b = static_cast<double>(batch);
    cap = std::min(c2 * c2 * b * b, g_prime * g_prime) / (b * b);
  }

  const double n = static_cast<double>(dataset_size);
  return 16.0 * alpha * (clip.c1 * clip.c1 + ratio * cap) /
         (sigma1 * sigma1 * n * n);
}

CalibrationResult calibrate_dicesgd(const CalibrationInputs& inputs,
                                    const PrivacyBudget& budget) {
  validate_inputs(inputs);
  validate(budget);
  const double rate = subsampling_rate(inputs);
  if (rate > kMaxSubsamplingRate) {
    throw CalibrationError(
        "calibrate_dicesgd: subsampling rate B/N = " + std::to_string(rate) +
        " exceeds 1/5, outside the validity of the subsampled Gaussian bound");
  }
  CalibrationResult out;
  out.threshold_cap_ok =
      inputs.clip.c2 <=
      inputs.sum_threshold / static_cast<double>(inputs.batch);

  const double c = inputs.sum_threshold;
  const double cap = std::min(c * c, inputs.g_prime * inputs.g_prime);
  out.g_tilde = inputs.clip.c1 * inputs.clip.c1 + 2.0 * cap;

  const double n = static_cast<double>(inputs.dataset_size);
  const double T = static_cast<double>(inputs.horizon);
  const double log_inv_delta = std::log(1.0 / budget.delta);
  out.sigma1 = std::sqrt(32.0 * T * out.g_tilde * log_inv_delta /
                         (n * n * budget.epsilon * budget.epsilon));

  // Self-check: convert the T-composed Renyi cost at the best grid order.
  const ConvertedBound best = composed_two_clip_check(
      out.sigma1, out.g_tilde, inputs.horizon, inputs.dataset_size,
      budget.delta);
  out.alpha_star = best.alpha;
  out.epsilon_check = best.epsilon;
  return out;
}

CalibrationResult calibrate_dpsgd_gc(const CalibrationInputs& inputs,
                                     const PrivacyBudget& budget) {
  validate_inputs(inputs);
  validate(budget);
  const double rate = subsampling_rate(inputs);
  if (rate > kMaxSubsamplingRate) {
    throw CalibrationError(
        "calibrate_dpsgd_gc: subsampling rate B/N = " + std::to_string(rate) +
        " exceeds 1/5, outside the validity of the subsampled Gaussian bound");
  }
  const double sens = inputs.sum_threshold;  // clipped-sum sensitivity
  const double T = static_cast<double>(inputs.horizon);

  // Converted bound at a given sigma, minimized over valid grid orders;
  // +infinity when no order is valid.
  const auto converted = [&](double sigma) -> ConvertedBound {
    ConvertedBound best{kInf, 0.0};
    for (int a = kAlphaGridMin; a <= kAlphaGridMax; ++a) {
      const double alpha = static_cast<double>(a);
      const std::optional<double> step =
          subsampled_gaussian_rdp(rate, sens, sigma, alpha);
      if (!step.has_value()) continue;
      const double eps = rdp_to_dp(alpha, T * step.value(), budget.delta);
      if (eps < best.epsilon) best = ConvertedBound{eps, alpha};
    }
    return best;
  };
  const auto feasible = [&](double sigma) {
    return converted(sigma).epsilon <= budget.epsilon;
  };

  // Feasibility is monotone in sigma: costs shrink and the validity window
  // widens. Grow an upper bracket, then bisect.
  const double ceiling = kGcSearchCeilingMultiple * sens;
  double lo = 0.0;  // sigma <= 4 * sens is never valid, so lo is infeasible
  double hi = 8.0 * sens;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (hi > ceiling) {
      throw CalibrationError(
          "calibrate_dpsgd_gc: no noise scale up to 1e6 * C meets (eps, delta)"
          " = (" + std::to_string(budget.epsilon) + ", " +
          std::to_string(budget.delta) + ")");
    }
  }
  while ((hi - lo) > kGcSearchRelTol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  CalibrationResult out;
  out.sigma1 = hi;
  out.g_tilde = 0.0;  // not part of this calibration
  const ConvertedBound best = converted(hi);
  out.alpha_star = best.alpha;
  out.epsilon_check = best.epsilon;
  out.threshold_cap_ok =
      inputs.clip.c2 <= inputs.sum_threshold / static_cast<double>(inputs.batch);
  return out;
}

double calibrate_automatic(std::size_t horizon, std::size_t dataset_size,
                           const PrivacyBudget& budget, double threshold) {
  if (horizon == 0) {
    throw ConfigError("calibrate_automatic: horizon must be >= 1");
  }
  if (dataset_size == 0) {
    throw ConfigError("calibrate_automatic: dataset_size must be >= 1");
  }
  validate(budget);
  if (!std::isfinite(threshold) || threshold <= 0.0) {
    throw ConfigError("calibrate_automatic: threshold must be positive");
  }
  // Same closed form as calibrate_dicesgd with c1 = c2 = C and unknown
  // g_prime: g_tilde = 3 C^2, and 32 * 3 = 96.
  const double T = static_cast<double>(horizon);
  const double n = static_cast<double>(dataset_size);
  const double g_tilde = 3.0 * threshold * threshold;
  return std::sqrt(32.0 * T * g_tilde * std::log(1.0 / budget.delta) /
                   (n * n * budget.epsilon * budget.epsilon));
}

}  // namespace dice
