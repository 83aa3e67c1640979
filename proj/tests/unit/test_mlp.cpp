// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/mlp.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ldedit/error.hpp"
#include "ldedit/mixture.hpp"
#include "ldedit/sampler.hpp"

namespace ldedit {
namespace {

MlpShape small_shape(std::size_t d = 3, int conds = 3) {
  MlpShape s;
  s.input_dim = d;
  s.hidden_dims = {16, 12};
  s.time_embed_dim = 8;
  s.cond_embed_dim = 4;
  s.condition_count = conds;
  return s;
}

TEST(TimeEmbedding, ZeroTimestep) {
  const auto e = time_embedding(0, 64, 1000);
  ASSERT_EQ(e.size(), 64u);
  for (std::size_t j = 0; j < 32; ++j) {
    EXPECT_EQ(e[2 * j], 0.0);
    EXPECT_EQ(e[2 * j + 1], 1.0);
  }
}

TEST(TimeEmbedding, FrequenciesSpanOneToTenThousandth) {
  const auto e = time_embedding(1, 64, 1000);
  EXPECT_NEAR(e[0], std::sin(1.0), 1e-15);
  EXPECT_NEAR(e[62], std::sin(1e-4), 1e-15);
  EXPECT_EQ(e, time_embedding(1, 64, 1000));
  for (int t = 0; t < 1000; t += 37) {
    const auto a = time_embedding(t, 64, 1000);
    const auto b = time_embedding(t + 1, 64, 1000);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
    EXPECT_GT(diff, 0.0);
  }
  EXPECT_THROW(time_embedding(0, 7, 1000), InvalidArgument);
  EXPECT_THROW(time_embedding(1001, 8, 1000), InvalidArgument);
}

TEST(Mlp, ZeroOutputLayerPredictsZero) {
  const MlpDenoiser m = MlpDenoiser::initialize(small_shape(), 1, true);
  NoiseStream rng(1, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor z = testing::random_tensor(rng, {3}, 5.0);
    EXPECT_EQ(m.predict_eps(z, static_cast<int>(rng.uniform_int(0, 1000)), ConditionId{trial % 3}), Tensor(Shape{3}));
  }
}

TEST(Mlp, PureAndShapePreserving) {
  const MlpDenoiser m = MlpDenoiser::initialize(small_shape(6), 2, false);
  const Tensor z({1, 2, 3}, std::vector<double>{0.1, -0.2, 0.3, 0.4, -0.5, 0.6});
  const Tensor a = m.predict_eps(z, 250, ConditionId{1});
  EXPECT_EQ(a.shape(), z.shape());
  EXPECT_EQ(a, m.predict_eps(z, 250, ConditionId{1}));
  EXPECT_NE(a, m.predict_eps(z, 250, ConditionId{2}));
  EXPECT_THROW(m.predict_eps(z, 250, ConditionId{3}), InvalidArgument);
  EXPECT_THROW(m.predict_eps(Tensor(Shape{5}), 250, ConditionId{1}), InvalidArgument);
}

TEST(Mlp, FlattenAssignRoundTrip) {
  MlpDenoiser m = MlpDenoiser::initialize(small_shape(), 3, false);
  std::vector<double> p = m.flatten();
  ASSERT_EQ(p.size(), m.parameter_count());
  // cond table 4x3, layers (15->16, 16->12, 12->3), skip 3
  EXPECT_EQ(p.size(), 12u + (15 * 16 + 16) + (16 * 12 + 12) + (12 * 3 + 3) + 3);
  for (double& v : p) v += 0.5;
  m.assign(p);
  EXPECT_EQ(m.flatten(), p);
  p.pop_back();
  EXPECT_THROW(m.assign(p), InvalidArgument);
}

TEST(Mlp, SkipDisabledHasNoGains) {
  MlpShape s = small_shape();
  s.input_skip = false;
  const MlpDenoiser m = MlpDenoiser::initialize(s, 3, false);
  EXPECT_EQ(m.skip().size(), 0);
  EXPECT_EQ(m.parameter_count(), MlpDenoiser::initialize(small_shape(), 3, false).parameter_count() - 3);
}

TrainingBatch probe_batch(const NoiseSchedule& schedule) {
  NoiseStream rng(99, 0);
  TrainingBatch b;
  b.schedule = &schedule;
  b.z0 = Eigen::MatrixXd(3, 5);
  b.noise = Eigen::MatrixXd(3, 5);
  for (Eigen::Index i = 0; i < b.z0.size(); ++i) {
    b.z0.data()[i] = rng.gaussian();
    b.noise.data()[i] = rng.gaussian();
  }
  b.t = {1, 120, 480, 777, 1000};
  b.cond = {0, 2, 1, 2, 0};
  return b;
}

TEST(MlpGradient, MatchesCentralDifferences) {
  const NoiseSchedule schedule = NoiseSchedule::linear();
  MlpDenoiser m = MlpDenoiser::initialize(small_shape(), 5, false);
  // Non-zero skip gains so their gradient path is exercised too.
  for (Eigen::Index i = 0; i < m.skip().size(); ++i) m.skip()[i] = 0.3 * static_cast<double>(i + 1);
  const TrainingBatch batch = probe_batch(schedule);
  MlpGradient grad;
  training_loss(m, batch, &grad);
  const std::vector<double> g = grad.flatten();
  std::vector<double> p = m.flatten();
  ASSERT_EQ(g.size(), p.size());
  NoiseStream pick(7, 0);
  std::vector<std::size_t> probes{0, p.size() - 1, p.size() - 4};
  while (probes.size() < 10) probes.push_back(static_cast<std::size_t>(pick.uniform_int(0, p.size() - 1)));
  for (std::size_t idx : probes) {
    const double h = 1e-5;
    const double orig = p[idx];
    p[idx] = orig + h;
    m.assign(p);
    const double up = training_loss(m, batch, nullptr);
    p[idx] = orig - h;
    m.assign(p);
    const double down = training_loss(m, batch, nullptr);
    p[idx] = orig;
    m.assign(p);
    const double fd = (up - down) / (2.0 * h);
    EXPECT_LE(std::abs(fd - g[idx]), 1e-4 * std::max(std::abs(fd), 1e-3)) << "parameter " << idx;
  }
}

std::vector<LatentExample> mixture_latents(const ConditionedMixtureFamily& fam, std::size_t n, std::uint64_t seed) {
  NoiseStream rng(seed, 0);
  std::vector<LatentExample> out;
  const auto conds = fam.conditions();
  for (std::size_t i = 0; i < n; ++i) {
    const ConditionId c = conds[i % conds.size()];
    const auto& w = fam.weights(c);
    const std::size_t k = rng.uniform() < w[0] ? 0 : 1;
    const auto& comp = fam.base().component(k);
    Tensor z(Shape{fam.base().dim()});
    for (std::size_t d = 0; d < z.size(); ++d) z[d] = comp.mean[d] + std::sqrt(comp.variance[d]) * rng.gaussian();
    out.push_back({z, c});
  }
  return out;
}

TEST(Training, ZeroLearningRateLeavesParametersUnchanged) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const auto data = mixture_latents(testing::two_blob_family(), 64, 1);
  const MlpDenoiser init = MlpDenoiser::initialize(small_shape(2, 4), 3, false);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.learning_rate = 0.0;
  TrainingReport report;
  const MlpDenoiser out = train_denoiser(data, s, cfg, init, &report);
  EXPECT_EQ(out.flatten(), init.flatten());
  ASSERT_EQ(report.epoch_losses.size(), 1u);
  cfg.epochs = 0;
  EXPECT_EQ(train_denoiser(data, s, cfg, init).flatten(), init.flatten());
}

TEST(Training, SeededRunsAreIdenticalAndLossDrops) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const auto data = mixture_latents(testing::two_blob_family(), 256, 2);
  const MlpDenoiser init = MlpDenoiser::initialize(small_shape(2, 4), 3, true);
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.batch_size = 32;
  cfg.seed = 5;
  TrainingReport ra, rb;
  int callbacks = 0;
  const MlpDenoiser a = train_denoiser(data, s, cfg, init, &ra, [&](int, double) { ++callbacks; });
  const MlpDenoiser b = train_denoiser(data, s, cfg, init, &rb);
  EXPECT_EQ(a.flatten(), b.flatten());
  EXPECT_EQ(ra.epoch_losses, rb.epoch_losses);
  EXPECT_EQ(callbacks, 15);
  EXPECT_LT(ra.epoch_losses.back(), ra.epoch_losses.front());
  cfg.seed = 6;
  EXPECT_NE(train_denoiser(data, s, cfg, init).flatten(), a.flatten());
}

TEST(Training, RejectsBadInput) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const MlpDenoiser init = MlpDenoiser::initialize(small_shape(2, 4), 3, true);
  EXPECT_THROW(train_denoiser({}, s, TrainConfig{}, init), InvalidArgument);
  EXPECT_THROW(train_denoiser({{Tensor(Shape{3}), ConditionId{0}}}, s, TrainConfig{}, init), InvalidArgument);
  EXPECT_THROW(train_denoiser({{Tensor(Shape{2}), ConditionId{4}}}, s, TrainConfig{}, init), InvalidArgument);
  TrainConfig bad;
  bad.batch_size = 0;
  EXPECT_THROW(train_denoiser({{Tensor(Shape{2}), ConditionId{0}}}, s, bad, init), InvalidArgument);
}

TEST(Training, DivergenceIsReported) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const auto data = mixture_latents(testing::two_blob_family(), 64, 3);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.learning_rate = 1e300;
  EXPECT_THROW(train_denoiser(data, s, cfg, MlpDenoiser::initialize(small_shape(2, 4), 1, false)), RuntimeError);
}

double mae_vs_analytic(const MlpDenoiser& m, const AnalyticDenoiser& oracle, ConditionId cond) {
  double total = 0.0;
  int n = 0;
  for (int t = 100; t <= 900; t += 100)
    for (double z = -2.0; z <= 2.0001; z += 0.25) {
      const Tensor x = Tensor::vector({z});
      total += std::abs(m.predict_eps(x, t, cond)[0] - oracle.predict_eps(x, t, cond)[0]);
      ++n;
    }
  return total / n;
}

TEST(Training, ApproachesAnalyticOnStandardNormal) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const auto fam = testing::standard_normal_family();
  AnalyticDenoiser oracle(fam, s);
  NoiseStream rng(8, 0);
  std::vector<LatentExample> data;
  for (int i = 0; i < 2048; ++i) data.push_back({Tensor::vector({rng.gaussian()}), ConditionId{0}});
  MlpShape shape = small_shape(1, 1);
  shape.hidden_dims = {32, 32};
  MlpDenoiser m = MlpDenoiser::initialize(shape, 1, true);
  TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.learning_rate = 2e-3;
  std::vector<double> maes{mae_vs_analytic(m, oracle, ConditionId{0})};
  for (int round = 0; round < 3; ++round) {
    cfg.epochs = 40;
    cfg.seed = static_cast<std::uint64_t>(round);
    m = train_denoiser(data, s, cfg, m);
    maes.push_back(mae_vs_analytic(m, oracle, ConditionId{0}));
  }
  EXPECT_LT(maes.back(), 0.05);
  EXPECT_LT(maes.back(), maes.front());
}

}  // namespace
}  // namespace ldedit
