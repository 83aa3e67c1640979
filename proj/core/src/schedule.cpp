// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ldedit/error.hpp"

namespace ldedit {

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
  LDEDIT_REQUIRE(steps >= 1, "linear schedule: steps must be >= 1");
  LDEDIT_REQUIRE(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0,
                 "linear schedule: need 0 < beta_start <= beta_end < 1");
  std::vector<double> betas(static_cast<std::size_t>(steps));
  if (steps == 1) {
    betas[0] = beta_start;
  } else {
    const double span = beta_end - beta_start;
    for (int i = 0; i < steps; ++i)
      betas[static_cast<std::size_t>(i)] = beta_start + span * static_cast<double>(i) / (steps - 1);
    betas.back() = beta_end;
  }
  return NoiseSchedule(std::move(betas));
}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
  LDEDIT_REQUIRE(!betas.empty(), "schedule: no betas");
  for (double b : betas) LDEDIT_REQUIRE(b > 0.0 && b < 1.0, "schedule: beta outside (0, 1)");
  return NoiseSchedule(std::move(betas));
}

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  alpha_bars_.resize(betas_.size() + 1);
  alpha_bars_[0] = 1.0;
  for (std::size_t t = 1; t <= betas_.size(); ++t) alpha_bars_[t] = alpha_bars_[t - 1] * (1.0 - betas_[t - 1]);
}

double NoiseSchedule::beta(int t) const {
  LDEDIT_REQUIRE(t >= 1 && t <= steps(), "beta: timestep " + std::to_string(t) + " outside [1, T]");
  return betas_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar(int t) const {
  LDEDIT_REQUIRE(t >= 0 && t <= steps(), "alpha_bar: timestep " + std::to_string(t) + " outside [0, T]");
  return alpha_bars_[static_cast<std::size_t>(t)];
}

StepSequence::StepSequence(std::vector<int> taus) : taus_(std::move(taus)) {
  LDEDIT_REQUIRE(!taus_.empty(), "step sequence: empty");
  LDEDIT_REQUIRE(taus_.front() >= 1, "step sequence: first timestep must be >= 1");
  for (std::size_t i = 1; i < taus_.size(); ++i)
    LDEDIT_REQUIRE(taus_[i] > taus_[i - 1], "step sequence: timesteps must be strictly increasing");
}

StepSequence make_subsequence(const NoiseSchedule& schedule, int n, int t_stop, Spacing spacing) {
  LDEDIT_REQUIRE(spacing == Spacing::kUniform, "make_subsequence: unsupported spacing");
  LDEDIT_REQUIRE(n >= 1, "make_subsequence: n must be >= 1");
  LDEDIT_REQUIRE(t_stop <= schedule.steps(), "make_subsequence: t_stop " + std::to_string(t_stop) +
                                                 " exceeds T = " + std::to_string(schedule.steps()));
  LDEDIT_REQUIRE(n <= t_stop, "make_subsequence: n = " + std::to_string(n) + " exceeds t_stop = " +
                                  std::to_string(t_stop));
  std::vector<int> taus(static_cast<std::size_t>(n));
  const long long num = t_stop;
  const long long den = n;
  for (long long i = 0; i < den; ++i) taus[static_cast<std::size_t>(i)] =
      static_cast<int>(((i + 1) * num * 2 + den) / (2 * den));
  taus.back() = t_stop;
  for (std::size_t i = taus.size() - 1; i-- > 0;)
    if (taus[i] >= taus[i + 1]) taus[i] = taus[i + 1] - 1;
  return StepSequence(std::move(taus));
}

double sigma_from_eta(double alpha_bar_prev, double alpha_bar_cur, double eta) {
  LDEDIT_REQUIRE(eta >= 0.0, "sigma_from_eta: eta must be >= 0");
  LDEDIT_REQUIRE(alpha_bar_cur < 1.0 && alpha_bar_prev > 0.0, "sigma_from_eta: degenerate alpha_bar pair");
  if (eta == 0.0) return 0.0;
  const double ratio = std::max(0.0, 1.0 - alpha_bar_cur / alpha_bar_prev);
  return eta * std::sqrt((1.0 - alpha_bar_prev) / (1.0 - alpha_bar_cur)) * std::sqrt(ratio);
}

double sigma_from_eta(const NoiseSchedule& schedule, const StepSequence& tau, std::size_t i, double eta) {
  LDEDIT_REQUIRE(i >= 1 && i < tau.size(), "sigma_from_eta: index " + std::to_string(i) +
                                               " has no predecessor in the step sequence");
  return sigma_from_eta(schedule.alpha_bar(tau[i - 1]), schedule.alpha_bar(tau[i]), eta);
}

double ddpm_sigma(const NoiseSchedule& schedule, int t, DdpmVariance variance) {
  const double beta = schedule.beta(t);
  if (variance == DdpmVariance::kBeta) return std::sqrt(beta);
  return std::sqrt(beta * (1.0 - schedule.alpha_bar(t - 1)) / (1.0 - schedule.alpha_bar(t)));
}

}  // namespace ldedit
