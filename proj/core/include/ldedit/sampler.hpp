// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ldedit/denoiser.hpp"
#include "ldedit/rng.hpp"
#include "ldedit/schedule.hpp"
#include "ldedit/tensor.hpp"

namespace ldedit {

// Single-step update rules. All are pure; shapes of every tensor argument
// must agree.

/// z_t = sqrt(alpha_bar_t) z0 + sqrt(1 - alpha_bar_t) noise.
Tensor diffuse_marginal(const Tensor& z0, int t, const NoiseSchedule& schedule, const Tensor& noise);

/// Ancestral step t -> t-1:
/// (z_t - beta_t / sqrt(1 - alpha_bar_t) eps) / sqrt(1 - beta_t) + sigma_t xi.
/// xi may be omitted when sigma_t == 0.
Tensor ddpm_reverse_step(const Tensor& z_t, int t, const NoiseSchedule& schedule, const Tensor& eps_hat,
                         double sigma_t, const Tensor* xi = nullptr);

/// Generalized (eta-family) step from t_from down to t_to:
///   sqrt(a_to) x0_hat + sqrt(1 - a_to - sigma^2) eps + sigma xi,
///   x0_hat = (z - sqrt(1 - a_from) eps) / sqrt(a_from).
/// The noise enters as sigma * xi (not sigma^2 * xi). xi may be omitted when sigma == 0.
Tensor generalized_step(const Tensor& z_from, int t_from, int t_to, const NoiseSchedule& schedule,
                        const Tensor& eps_hat, double sigma, const Tensor* xi = nullptr);

/// Deterministic forward step t -> t_next (t < t_next).
Tensor ddim_forward_step(const Tensor& z_t, int t, int t_next, const NoiseSchedule& schedule, const Tensor& eps_hat);

/// Deterministic reverse step t -> t_prev (t_prev < t). Shares its
/// arithmetic with generalized_step at sigma = 0, so the two agree bitwise.
Tensor ddim_reverse_step(const Tensor& z_t, int t, int t_prev, const NoiseSchedule& schedule, const Tensor& eps_hat);

/// Predicted clean sample (z - sqrt(1 - a_t) eps) / sqrt(a_t).
Tensor predict_x0(const Tensor& z_t, int t, const NoiseSchedule& schedule, const Tensor& eps_hat);

enum class Direction { kForward, kReverse };

struct TrajectoryEntry {
  int timestep = 0;
  Tensor state;
};

/// States visited by a runner, strictly monotone in timestep along `direction`.
class Trajectory {
 public:
  explicit Trajectory(Direction direction = Direction::kForward) : direction_(direction) {}

  void append(int timestep, Tensor state);

  Direction direction() const noexcept { return direction_; }
  const std::vector<TrajectoryEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  Direction direction_;
  std::vector<TrajectoryEntry> entries_;
};

struct DiffusionRun {
  Tensor state;
  Trajectory trajectory;
};

struct InversionOptions {
  /// Record every intermediate state (including z0) in the trajectory.
  bool record = true;
  /// Optional stochastic forward process: adds sigma * xi per step with sigma
  /// from the eta formula on (alpha_bar_from, alpha_bar_to), keeping the
  /// marginal variance. Requires `rng` when > 0. Default off.
  double forward_eta = 0.0;
  NoiseStream* rng = nullptr;
};

/// Deterministic inversion 0 -> tau_1 -> ... -> t_stop. The noise prediction
/// for a step a -> b is evaluated at (z_a, a, cond).
DiffusionRun run_inversion(const Tensor& z0, const StepSequence& tau, const NoiseSchedule& schedule,
                           const DenoiserModel& denoiser, ConditionId cond, const InversionOptions& options = {});

/// Stepwise reverse process t_stop -> ... -> tau_1 -> 0. Interior steps use
/// sigma_from_eta; the last step to t = 0 uses sigma = 0. With eta == 0 the
/// random stream is never touched.
class ReverseProcess {
 public:
  ReverseProcess(const NoiseSchedule& schedule, const StepSequence& tau, const DenoiserModel& denoiser,
                 ConditionId cond, double eta, NoiseStream* rng);

  bool done() const noexcept { return position_ == 0; }
  /// Timestep of the state the next call to advance() expects.
  int current_timestep() const;
  /// Timestep advance() will produce.
  int next_timestep() const;
  /// One reverse step from current_timestep() to next_timestep().
  Tensor advance(const Tensor& z);

 private:
  const NoiseSchedule& schedule_;
  StepSequence tau_;
  const DenoiserModel& denoiser_;
  ConditionId cond_;
  double eta_;
  NoiseStream* rng_;
  std::size_t position_;  // index into tau of the current state, plus one
};

DiffusionRun run_generation(const Tensor& z_start, const StepSequence& tau, const NoiseSchedule& schedule,
                            const DenoiserModel& denoiser, ConditionId cond, double eta, NoiseStream& rng,
                            bool record = true);

}  // namespace ldedit
