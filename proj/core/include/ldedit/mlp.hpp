// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ldedit/denoiser.hpp"
#include "ldedit/schedule.hpp"
#include "ldedit/tensor.hpp"

namespace ldedit {

/// Sinusoidal embedding of a timestep: dim/2 interleaved (sin(t w_j), cos(t w_j))
/// pairs with w_j geometric from 1 down to 1/10000. dim must be even; 0 <= t <= T.
std::vector<double> time_embedding(int t, std::size_t dim, int steps);

struct MlpShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims{512, 512};
  std::size_t time_embed_dim = 64;
  std::size_t cond_embed_dim = 32;
  int condition_count = 1;  ///< embedding table rows, ids 0..condition_count-1
  int steps = NoiseSchedule::kDefaultSteps;
  /// Adds a learned per-dimension gain times z_t to the output (starts at 0).
  bool input_skip = true;

  friend bool operator==(const MlpShape&, const MlpShape&) = default;
};

struct TrainingBatch;
struct MlpGradient;

struct DenseLayer {
  Eigen::MatrixXd weight;  ///< out x in
  Eigen::VectorXd bias;
};

/// Conditional noise predictor: concat(z, time_embedding(t), embed[cond]) ->
/// hidden layers with x * sigmoid(x) -> linear output reshaped like z, plus
/// skip .* z when the shape enables the input skip.
class MlpDenoiser final : public DenoiserModel {
 public:
  MlpDenoiser() = default;
  /// Scaled-uniform (Glorot) initialization from a seeded stream; the output
  /// layer starts at zero when `zero_output` is set.
  static MlpDenoiser initialize(const MlpShape& shape, std::uint64_t seed, bool zero_output = true);

  Tensor predict_eps(const Tensor& z, int t, ConditionId cond) const override;

  /// Batched forward pass; columns of `z` are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& z, std::span<const int> t, std::span<const int> cond) const;

  const MlpShape& shape() const noexcept { return shape_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  /// cond_embed_dim x condition_count.
  const Eigen::MatrixXd& condition_table() const noexcept { return cond_table_; }
  Eigen::MatrixXd& condition_table() noexcept { return cond_table_; }
  /// Per-dimension skip gains; empty when the input skip is disabled.
  const Eigen::VectorXd& skip() const noexcept { return skip_; }
  Eigen::VectorXd& skip() noexcept { return skip_; }

  std::size_t parameter_count() const;
  /// Parameters in a fixed order: condition table, per layer weight and
  /// bias, then the skip gains.
  std::vector<double> flatten() const;
  void assign(std::span<const double> params);
  bool all_finite() const;

  /// Builds an empty model of `shape` for deserialization.
  static MlpDenoiser zeros(const MlpShape& shape);

 private:
  void check_inputs(std::span<const int> t, std::span<const int> cond, Eigen::Index batch) const;
  Eigen::MatrixXd assemble_input(const Eigen::MatrixXd& z, std::span<const int> t, std::span<const int> cond) const;

  friend double training_loss(const MlpDenoiser&, const TrainingBatch&, MlpGradient*);

  MlpShape shape_;
  Eigen::MatrixXd cond_table_;
  std::vector<DenseLayer> layers_;
  Eigen::VectorXd skip_;
};

/// One fixed mini-batch of the noise-prediction objective: z_t is formed
/// from (z0, t, noise) and the model is asked to recover `noise`.
struct TrainingBatch {
  Eigen::MatrixXd z0;     ///< input_dim x B
  Eigen::MatrixXd noise;  ///< input_dim x B
  std::vector<int> t;
  std::vector<int> cond;
  const NoiseSchedule* schedule = nullptr;
};

struct MlpGradient {
  Eigen::MatrixXd cond_table;
  std::vector<DenseLayer> layers;
  Eigen::VectorXd skip;

  std::vector<double> flatten() const;
};

/// Mean over batch and dimensions of (eps_theta(z_t, t, y) - noise)^2. When
/// `grad` is non-null it receives the exact gradient by reverse-mode
/// differentiation of the forward pass.
double training_loss(const MlpDenoiser& model, const TrainingBatch& batch, MlpGradient* grad);

struct TrainConfig {
  int epochs = 150;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

struct LatentExample {
  Tensor latent;
  ConditionId cond;
};

struct TrainingReport {
  std::vector<double> epoch_losses;
};

using EpochCallback = std::function<void(int epoch, double loss)>;

/// Adam on the simplified noise-prediction loss with t ~ Uniform{1..T}.
/// Throws RuntimeError on a non-finite loss.
MlpDenoiser train_denoiser(const std::vector<LatentExample>& data, const NoiseSchedule& schedule,
                           const TrainConfig& config, MlpDenoiser model, TrainingReport* report = nullptr,
                           const EpochCallback& on_epoch = {});

}  // namespace ldedit
