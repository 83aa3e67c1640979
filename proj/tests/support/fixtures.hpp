// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "ldedit/denoiser.hpp"
#include "ldedit/mixture.hpp"
#include "ldedit/rng.hpp"
#include "ldedit/schedule.hpp"
#include "ldedit/tensor.hpp"

namespace ldedit::testing {

// Two well-separated 2-D components. Condition 0 mixes them evenly, 1 and 2
// select one each, 3 is lopsided.
inline ConditionedMixtureFamily two_blob_family() {
  GaussianMixture base({{0.5, {-3.0, -1.5}, {0.05, 0.05}}, {0.5, {3.0, 1.5}, {0.05, 0.05}}});
  return ConditionedMixtureFamily(base, {{0, {0.5, 0.5}}, {1, {1.0, 0.0}}, {2, {0.0, 1.0}}, {3, {0.3, 0.7}}});
}

inline constexpr ConditionId kBoth{0};
inline constexpr ConditionId kBlobA{1};
inline constexpr ConditionId kBlobB{2};
inline constexpr ConditionId kLopsided{3};

inline ConditionedMixtureFamily standard_normal_family() {
  return ConditionedMixtureFamily(GaussianMixture({{1.0, {0.0}, {1.0}}}), {{0, {1.0}}});
}

// Returns the same tensor for every input; inversion followed by regeneration
// is then exact, which isolates the plumbing from the model.
class ConstantDenoiser final : public DenoiserModel {
 public:
  explicit ConstantDenoiser(Tensor eps) : eps_(std::move(eps)) {}
  Tensor predict_eps(const Tensor& z, int, ConditionId) const override { return eps_.reshaped(z.shape()); }

 private:
  Tensor eps_;
};

inline Tensor random_tensor(NoiseStream& rng, const Shape& shape, double scale = 1.0) {
  Tensor t(shape);
  for (double& v : t.values()) v = scale * rng.gaussian();
  return t;
}

inline double relative_l2(const Tensor& a, const Tensor& reference) {
  return std::sqrt(squared_distance(a, reference) / squared_norm(reference));
}

}  // namespace ldedit::testing
