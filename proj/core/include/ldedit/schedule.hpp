// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ldedit {

/// Variance schedule beta_1..beta_T with cumulative signal coefficients
/// alpha_bar_t = prod_{s<=t} (1 - beta_s), alpha_bar_0 = 1. Immutable.
class NoiseSchedule {
 public:
  static constexpr int kDefaultSteps = 1000;
  static constexpr double kDefaultBetaStart = 1e-4;
  static constexpr double kDefaultBetaEnd = 0.02;

  /// Betas interpolated linearly from beta_start to beta_end, both inclusive.
  static NoiseSchedule linear(int steps = kDefaultSteps, double beta_start = kDefaultBetaStart,
                              double beta_end = kDefaultBetaEnd);
  /// Arbitrary betas; each must lie in (0, 1).
  static NoiseSchedule from_betas(std::vector<double> betas);

  int steps() const noexcept { return static_cast<int>(betas_.size()); }

  /// beta_t for t in [1, T].
  double beta(int t) const;
  /// alpha_bar_t for t in [0, T].
  double alpha_bar(int t) const;

  std::span<const double> betas() const noexcept { return betas_; }
  /// alpha_bar_0..alpha_bar_T (T + 1 entries).
  std::span<const double> alpha_bars() const noexcept { return alpha_bars_; }

 private:
  explicit NoiseSchedule(std::vector<double> betas);

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

/// Strictly increasing timesteps 1 <= taus[0] < ... < taus[n-1] = t_stop.
class StepSequence {
 public:
  explicit StepSequence(std::vector<int> taus);

  std::size_t size() const noexcept { return taus_.size(); }
  int operator[](std::size_t i) const noexcept { return taus_[i]; }
  int t_stop() const noexcept { return taus_.back(); }
  const std::vector<int>& taus() const noexcept { return taus_; }

  friend bool operator==(const StepSequence&, const StepSequence&) = default;

 private:
  std::vector<int> taus_;
};

enum class Spacing { kUniform };

/// n timesteps uniformly spaced over (0, t_stop]: tau_i = round((i + 1) * t_stop / n),
/// ties rounded up. Any duplicate produced by rounding is repaired by shifting
/// the earlier entry down by one, walking from the end.
StepSequence make_subsequence(const NoiseSchedule& schedule, int n, int t_stop,
                              Spacing spacing = Spacing::kUniform);

/// sigma_{tau_i}(eta) = eta * sqrt((1 - a_prev) / (1 - a_cur)) * sqrt(1 - a_cur / a_prev),
/// with a_prev = alpha_bar(tau_{i-1}), a_cur = alpha_bar(tau_i). Requires 1 <= i < n.
double sigma_from_eta(const NoiseSchedule& schedule, const StepSequence& tau, std::size_t i, double eta);

/// Same formula on an explicit (alpha_bar_prev, alpha_bar_cur) pair.
double sigma_from_eta(double alpha_bar_prev, double alpha_bar_cur, double eta);

/// Choice of sigma_t for the single-step ancestral (DDPM) update.
enum class DdpmVariance {
  kPosterior,  ///< sigma_t^2 = beta_t (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t)
  kBeta,       ///< sigma_t^2 = beta_t
};

double ddpm_sigma(const NoiseSchedule& schedule, int t, DdpmVariance variance = DdpmVariance::kPosterior);

}  // namespace ldedit
