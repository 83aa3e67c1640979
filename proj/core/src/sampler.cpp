// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/sampler.hpp"

#include <cmath>
#include <string>

#include "ldedit/error.hpp"

namespace ldedit {

namespace {

constexpr double kVarianceSlack = 1e-12;

// sqrt(a_to) * (z - sqrt(1 - a_from) eps) / sqrt(a_from) + sqrt(1 - a_to - sigma^2) eps + sigma xi
Tensor transfer(const Tensor& z, double a_from, double a_to, const Tensor& eps, double sigma, const Tensor* xi) {
  require_same_shape(z, eps, "diffusion step (eps_hat)");
  if (sigma < 0.0) throw InvalidArgument("diffusion step: sigma must be >= 0");
  if (sigma > 0.0) {
    if (xi == nullptr) throw InvalidArgument("diffusion step: sigma > 0 requires a noise tensor");
    require_same_shape(z, *xi, "diffusion step (xi)");
  }
  double residual = 1.0 - a_to - sigma * sigma;
  if (residual < -kVarianceSlack)
    throw InvalidArgument("diffusion step: sigma^2 exceeds 1 - alpha_bar_to (variance decomposition violated)");
  residual = std::max(residual, 0.0);

  const double sqrt_from = std::sqrt(a_from);
  const double noise_from = std::sqrt(1.0 - a_from);
  const double sqrt_to = std::sqrt(a_to);
  const double dir = std::sqrt(residual);

  Tensor out(z.shape());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x0 = (z[i] - noise_from * eps[i]) / sqrt_from;
    out[i] = sqrt_to * x0 + dir * eps[i];
  }
  if (sigma > 0.0)
    for (std::size_t i = 0; i < z.size(); ++i) out[i] += sigma * (*xi)[i];
  return out;
}

}  // namespace

Tensor diffuse_marginal(const Tensor& z0, int t, const NoiseSchedule& schedule, const Tensor& noise) {
  require_same_shape(z0, noise, "diffuse_marginal");
  const double a = schedule.alpha_bar(t);
  const double signal = std::sqrt(a);
  const double spread = std::sqrt(1.0 - a);
  Tensor out(z0.shape());
  for (std::size_t i = 0; i < z0.size(); ++i) out[i] = signal * z0[i] + spread * noise[i];
  return out;
}

Tensor ddpm_reverse_step(const Tensor& z_t, int t, const NoiseSchedule& schedule, const Tensor& eps_hat,
                         double sigma_t, const Tensor* xi) {
  LDEDIT_REQUIRE(t >= 1, "ddpm_reverse_step: t must be >= 1");
  require_same_shape(z_t, eps_hat, "ddpm_reverse_step (eps_hat)");
  if (sigma_t > 0.0) {
    if (xi == nullptr) throw InvalidArgument("ddpm_reverse_step: sigma_t > 0 requires a noise tensor");
    require_same_shape(z_t, *xi, "ddpm_reverse_step (xi)");
  }
  const double beta = schedule.beta(t);
  const double scale = 1.0 / std::sqrt(1.0 - beta);
  const double eps_coef = beta / std::sqrt(1.0 - schedule.alpha_bar(t));
  Tensor out(z_t.shape());
  for (std::size_t i = 0; i < z_t.size(); ++i) out[i] = scale * (z_t[i] - eps_coef * eps_hat[i]);
  if (sigma_t > 0.0)
    for (std::size_t i = 0; i < z_t.size(); ++i) out[i] += sigma_t * (*xi)[i];
  return out;
}

Tensor generalized_step(const Tensor& z_from, int t_from, int t_to, const NoiseSchedule& schedule,
                        const Tensor& eps_hat, double sigma, const Tensor* xi) {
  LDEDIT_REQUIRE(t_to >= 0 && t_to < t_from && t_from <= schedule.steps(),
                 "generalized_step: need 0 <= t_to < t_from <= T");
  return transfer(z_from, schedule.alpha_bar(t_from), schedule.alpha_bar(t_to), eps_hat, sigma, xi);
}

Tensor ddim_forward_step(const Tensor& z_t, int t, int t_next, const NoiseSchedule& schedule, const Tensor& eps_hat) {
  LDEDIT_REQUIRE(t >= 0 && t < t_next && t_next <= schedule.steps(), "ddim_forward_step: need 0 <= t < t_next <= T");
  return transfer(z_t, schedule.alpha_bar(t), schedule.alpha_bar(t_next), eps_hat, 0.0, nullptr);
}

Tensor ddim_reverse_step(const Tensor& z_t, int t, int t_prev, const NoiseSchedule& schedule, const Tensor& eps_hat) {
  LDEDIT_REQUIRE(t_prev >= 0 && t_prev < t && t <= schedule.steps(), "ddim_reverse_step: need 0 <= t_prev < t <= T");
  return transfer(z_t, schedule.alpha_bar(t), schedule.alpha_bar(t_prev), eps_hat, 0.0, nullptr);
}

Tensor predict_x0(const Tensor& z_t, int t, const NoiseSchedule& schedule, const Tensor& eps_hat) {
  require_same_shape(z_t, eps_hat, "predict_x0");
  const double a = schedule.alpha_bar(t);
  const double sqrt_a = std::sqrt(a);
  const double noise = std::sqrt(1.0 - a);
  Tensor out(z_t.shape());
  for (std::size_t i = 0; i < z_t.size(); ++i) out[i] = (z_t[i] - noise * eps_hat[i]) / sqrt_a;
  return out;
}

void Trajectory::append(int timestep, Tensor state) {
  if (!entries_.empty()) {
    const int last = entries_.back().timestep;
    const bool ok = direction_ == Direction::kForward ? timestep > last : timestep < last;
    LDEDIT_REQUIRE(ok, "trajectory: timestep " + std::to_string(timestep) + " breaks monotone order after " +
                           std::to_string(last));
    require_same_shape(entries_.back().state, state, "trajectory");
  }
  entries_.push_back({timestep, std::move(state)});
}

DiffusionRun run_inversion(const Tensor& z0, const StepSequence& tau, const NoiseSchedule& schedule,
                           const DenoiserModel& denoiser, ConditionId cond, const InversionOptions& options) {
  LDEDIT_REQUIRE(tau.t_stop() <= schedule.steps(), "run_inversion: t_stop exceeds T");
  LDEDIT_REQUIRE(options.forward_eta >= 0.0, "run_inversion: forward_eta must be >= 0");
  const bool stochastic = options.forward_eta > 0.0;
  LDEDIT_REQUIRE(!stochastic || options.rng != nullptr, "run_inversion: stochastic forward process needs a stream");

  DiffusionRun run{z0, Trajectory(Direction::kForward)};
  if (options.record) run.trajectory.append(0, z0);
  int t = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const int next = tau[i];
    const Tensor eps = denoiser.predict_eps(run.state, t, cond);
    if (!stochastic) {
      run.state = ddim_forward_step(run.state, t, next, schedule, eps);
    } else {
      const double a_from = schedule.alpha_bar(t);
      const double a_to = schedule.alpha_bar(next);
      const double sigma = t == 0 ? 0.0 : sigma_from_eta(a_from, a_to, options.forward_eta);
      if (sigma > 0.0) {
        const Tensor xi = gaussian_draw(*options.rng, run.state.shape());
        run.state = transfer(run.state, a_from, a_to, eps, sigma, &xi);
      } else {
        run.state = ddim_forward_step(run.state, t, next, schedule, eps);
      }
    }
    if (!run.state.all_finite()) throw RuntimeError("run_inversion: non-finite state at t = " + std::to_string(next));
    t = next;
    if (options.record) run.trajectory.append(t, run.state);
  }
  return run;
}

ReverseProcess::ReverseProcess(const NoiseSchedule& schedule, const StepSequence& tau, const DenoiserModel& denoiser,
                               ConditionId cond, double eta, NoiseStream* rng)
    : schedule_(schedule), tau_(tau), denoiser_(denoiser), cond_(cond), eta_(eta), rng_(rng), position_(tau.size()) {
  LDEDIT_REQUIRE(eta >= 0.0, "reverse process: eta must be >= 0");
  LDEDIT_REQUIRE(eta == 0.0 || rng != nullptr, "reverse process: eta > 0 needs a noise stream");
  LDEDIT_REQUIRE(tau.t_stop() <= schedule.steps(), "reverse process: t_stop exceeds T");
}

int ReverseProcess::current_timestep() const {
  LDEDIT_REQUIRE(!done(), "reverse process: already at t = 0");
  return tau_[position_ - 1];
}

int ReverseProcess::next_timestep() const {
  LDEDIT_REQUIRE(!done(), "reverse process: already at t = 0");
  return position_ >= 2 ? tau_[position_ - 2] : 0;
}

Tensor ReverseProcess::advance(const Tensor& z) {
  const int t = current_timestep();
  const int t_prev = next_timestep();
  const Tensor eps = denoiser_.predict_eps(z, t, cond_);
  // Final step to t = 0 is always noise-free.
  const double sigma = (position_ >= 2 && eta_ > 0.0) ? sigma_from_eta(schedule_, tau_, position_ - 1, eta_) : 0.0;
  Tensor out;
  if (sigma > 0.0) {
    const Tensor xi = gaussian_draw(*rng_, z.shape());
    out = generalized_step(z, t, t_prev, schedule_, eps, sigma, &xi);
  } else {
    out = generalized_step(z, t, t_prev, schedule_, eps, 0.0);
  }
  if (!out.all_finite()) throw RuntimeError("reverse process: non-finite state at t = " + std::to_string(t_prev));
  --position_;
  return out;
}

DiffusionRun run_generation(const Tensor& z_start, const StepSequence& tau, const NoiseSchedule& schedule,
                            const DenoiserModel& denoiser, ConditionId cond, double eta, NoiseStream& rng,
                            bool record) {
  ReverseProcess process(schedule, tau, denoiser, cond, eta, &rng);
  DiffusionRun run{z_start, Trajectory(Direction::kReverse)};
  if (record) run.trajectory.append(tau.t_stop(), z_start);
  while (!process.done()) {
    const int t_prev = process.next_timestep();
    run.state = process.advance(run.state);
    if (record) run.trajectory.append(t_prev, run.state);
  }
  return run;
}

}  // namespace ldedit
