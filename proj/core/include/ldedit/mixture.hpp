// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <vector>

#include "ldedit/denoiser.hpp"
#include "ldedit/schedule.hpp"
#include "ldedit/tensor.hpp"

namespace ldedit {

struct MixtureComponent {
  double weight = 0.0;
  std::vector<double> mean;
  std::vector<double> variance;  ///< diagonal covariance, every entry > 0
};

/// Diagonal-covariance Gaussian mixture. Weights sum to 1 within 1e-12.
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<MixtureComponent> components);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return components_.size(); }
  const MixtureComponent& component(std::size_t k) const { return components_.at(k); }
  const std::vector<MixtureComponent>& components() const noexcept { return components_; }

 private:
  std::vector<MixtureComponent> components_;
  std::size_t dim_ = 0;
};

/// Conditioning by reweighting the components of a shared base mixture.
class ConditionedMixtureFamily {
 public:
  ConditionedMixtureFamily(GaussianMixture base, std::map<int, std::vector<double>> weights_by_condition);

  const GaussianMixture& base() const noexcept { return base_; }
  bool contains(ConditionId cond) const { return weights_.count(cond.value) != 0; }
  /// Component weights selected by `cond`; throws InvalidArgument if unknown.
  const std::vector<double>& weights(ConditionId cond) const;
  std::vector<ConditionId> conditions() const;

 private:
  GaussianMixture base_;
  std::map<int, std::vector<double>> weights_;
};

/// Posterior quantities of the noised mixture at one point.
struct MixturePosterior {
  std::vector<double> responsibilities;  ///< r_k, summing to 1
  Tensor x0_hat;                         ///< E[x0 | z_t]
  Tensor eps_hat;                        ///< (z_t - sqrt(a) x0_hat) / sqrt(1 - a)
};

/// Exact posterior of the condition-weighted mixture observed through
/// z_t = sqrt(a) x0 + sqrt(1 - a) eps. Responsibilities are computed in the
/// log domain. Requires 0 < a < 1 and z_t.size() == dim.
MixturePosterior mixture_posterior(const ConditionedMixtureFamily& family, ConditionId cond, const Tensor& z_t,
                                   double alpha_bar_t);

/// Bayes-optimal noise prediction; the eps_hat field of mixture_posterior.
Tensor analytic_eps(const ConditionedMixtureFamily& family, ConditionId cond, const Tensor& z_t, double alpha_bar_t);

/// DenoiserModel backed by analytic_eps. At t = 0 (alpha_bar = 1) it returns
/// the a -> 1 limit of the exact prediction, which is zero for every mixture
/// with positive variances.
class AnalyticDenoiser final : public DenoiserModel {
 public:
  AnalyticDenoiser(ConditionedMixtureFamily family, NoiseSchedule schedule);

  Tensor predict_eps(const Tensor& z, int t, ConditionId cond) const override;

  const ConditionedMixtureFamily& family() const noexcept { return family_; }

 private:
  ConditionedMixtureFamily family_;
  NoiseSchedule schedule_;
};

/// Index of the component whose mean is closest (Euclidean) to x.
std::size_t nearest_component(const GaussianMixture& mixture, const Tensor& x);

}  // namespace ldedit
