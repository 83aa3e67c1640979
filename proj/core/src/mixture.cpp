// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/mixture.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ldedit/error.hpp"

namespace ldedit {

namespace {

constexpr double kWeightTolerance = 1e-12;

void check_weights(const std::vector<double>& w, std::size_t k, const std::string& what) {
  LDEDIT_REQUIRE(w.size() == k, what + ": expected " + std::to_string(k) + " weights");
  double total = 0.0;
  for (double x : w) {
    LDEDIT_REQUIRE(std::isfinite(x) && x >= 0.0, what + ": weights must be finite and non-negative");
    total += x;
  }
  LDEDIT_REQUIRE(std::abs(total - 1.0) <= kWeightTolerance, what + ": weights must sum to 1");
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<MixtureComponent> components) : components_(std::move(components)) {
  LDEDIT_REQUIRE(!components_.empty(), "mixture: no components");
  dim_ = components_.front().mean.size();
  LDEDIT_REQUIRE(dim_ > 0, "mixture: zero dimension");
  std::vector<double> w;
  for (const auto& c : components_) {
    LDEDIT_REQUIRE(c.mean.size() == dim_ && c.variance.size() == dim_, "mixture: inconsistent component dimension");
    for (double m : c.mean) LDEDIT_REQUIRE(std::isfinite(m), "mixture: non-finite mean");
    for (double v : c.variance) LDEDIT_REQUIRE(std::isfinite(v) && v > 0.0, "mixture: variances must be > 0");
    w.push_back(c.weight);
  }
  check_weights(w, components_.size(), "mixture");
}

ConditionedMixtureFamily::ConditionedMixtureFamily(GaussianMixture base,
                                                   std::map<int, std::vector<double>> weights_by_condition)
    : base_(std::move(base)), weights_(std::move(weights_by_condition)) {
  for (const auto& [id, w] : weights_) check_weights(w, base_.size(), "condition " + std::to_string(id));
}

const std::vector<double>& ConditionedMixtureFamily::weights(ConditionId cond) const {
  auto it = weights_.find(cond.value);
  if (it == weights_.end())
    throw InvalidArgument("mixture family: unknown condition " + std::to_string(cond.value));
  return it->second;
}

std::vector<ConditionId> ConditionedMixtureFamily::conditions() const {
  std::vector<ConditionId> out;
  for (const auto& [id, w] : weights_) out.push_back(ConditionId{id});
  return out;
}

MixturePosterior mixture_posterior(const ConditionedMixtureFamily& family, ConditionId cond, const Tensor& z_t,
                                   double alpha_bar_t) {
  LDEDIT_REQUIRE(alpha_bar_t > 0.0 && alpha_bar_t < 1.0, "analytic_eps: alpha_bar must lie strictly inside (0, 1)");
  const GaussianMixture& mix = family.base();
  const std::size_t dim = mix.dim();
  LDEDIT_REQUIRE(z_t.size() == dim, "analytic_eps: state has " + std::to_string(z_t.size()) +
                                        " entries, mixture dimension is " + std::to_string(dim));
  const std::vector<double>& w = family.weights(cond);
  const double a = alpha_bar_t;
  const double sqrt_a = std::sqrt(a);
  const std::size_t k_count = mix.size();

  // Marginal of component k at level a: N(sqrt(a) m_k, a S_k + (1 - a) I).
  std::vector<double> log_r(k_count, -std::numeric_limits<double>::infinity());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < k_count; ++k) {
    if (w[k] <= 0.0) continue;
    const MixtureComponent& c = mix.component(k);
    double acc = std::log(w[k]);
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = a * c.variance[d] + (1.0 - a);
      const double diff = z_t[d] - sqrt_a * c.mean[d];
      acc -= 0.5 * (diff * diff / v + std::log(2.0 * std::numbers::pi * v));
    }
    log_r[k] = acc;
    max_log = std::max(max_log, acc);
  }
  MixturePosterior post;
  post.responsibilities.assign(k_count, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (w[k] <= 0.0) continue;
    post.responsibilities[k] = std::exp(log_r[k] - max_log);
    total += post.responsibilities[k];
  }
  for (double& r : post.responsibilities) r /= total;

  // x0_hat = sum_k r_k (m_k + sqrt(a) S_k (a S_k + (1-a))^-1 (z - sqrt(a) m_k)).
  // Substituting into (z - sqrt(a) x0_hat) / sqrt(1 - a) gives
  // eps_hat = sqrt(1 - a) sum_k r_k (z - sqrt(a) m_k) / (a S_k + 1 - a), which
  // avoids the cancellation in z - sqrt(a) x0_hat as a -> 1.
  post.x0_hat = Tensor(z_t.shape());
  post.eps_hat = Tensor(z_t.shape());
  const double sqrt_1ma = std::sqrt(1.0 - a);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double r = post.responsibilities[k];
    if (r == 0.0) continue;
    const MixtureComponent& c = mix.component(k);
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = a * c.variance[d] + (1.0 - a);
      const double diff = z_t[d] - sqrt_a * c.mean[d];
      post.x0_hat[d] += r * (c.mean[d] + sqrt_a * c.variance[d] / v * diff);
      post.eps_hat[d] += r * sqrt_1ma * diff / v;
    }
  }
  return post;
}

Tensor analytic_eps(const ConditionedMixtureFamily& family, ConditionId cond, const Tensor& z_t, double alpha_bar_t) {
  return mixture_posterior(family, cond, z_t, alpha_bar_t).eps_hat;
}

AnalyticDenoiser::AnalyticDenoiser(ConditionedMixtureFamily family, NoiseSchedule schedule)
    : family_(std::move(family)), schedule_(std::move(schedule)) {}

Tensor AnalyticDenoiser::predict_eps(const Tensor& z, int t, ConditionId cond) const {
  LDEDIT_REQUIRE(z.size() == family_.base().dim(), "analytic denoiser: dimension mismatch");
  // Validate the condition even on the t = 0 shortcut.
  (void)family_.weights(cond);
  if (t == 0) return Tensor(z.shape(), 0.0);
  return analytic_eps(family_, cond, z, schedule_.alpha_bar(t));
}

std::size_t nearest_component(const GaussianMixture& mixture, const Tensor& x) {
  LDEDIT_REQUIRE(x.size() == mixture.dim(), "nearest_component: dimension mismatch");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mixture.size(); ++k) {
    double d2 = 0.0;
    const auto& m = mixture.component(k).mean;
    for (std::size_t i = 0; i < m.size(); ++i) d2 += (x[i] - m[i]) * (x[i] - m[i]);
    if (d2 < best_d) {
      best_d = d2;
      best = k;
    }
  }
  return best;
}

}  // namespace ldedit
