// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "ldedit/editor.hpp"
#include "ldedit/mixture.hpp"
#include "ldedit/mlp.hpp"
#include "ldedit/rng.hpp"
#include "ldedit/sampler.hpp"
#include "ldedit/schedule.hpp"

namespace ldedit {
namespace {

Tensor noise(NoiseStream& rng, const Shape& shape) {
  Tensor t(shape);
  for (double& v : t.values()) v = rng.gaussian();
  return t;
}

// Latent of a 32x32 image at f=4, c=8.
const Shape kLatent{8, 8, 8};

ConditionedMixtureFamily blobs() {
  GaussianMixture base({{0.5, {-3.0, -1.5}, {0.05, 0.05}}, {0.5, {3.0, 1.5}, {0.05, 0.05}}});
  return ConditionedMixtureFamily(base, {{0, {0.5, 0.5}}, {1, {1.0, 0.0}}, {2, {0.0, 1.0}}});
}

void BM_GeneralizedStep(benchmark::State& state) {
  const NoiseSchedule s = NoiseSchedule::linear();
  NoiseStream rng(1, 0);
  const Tensor z = noise(rng, kLatent);
  const Tensor eps = noise(rng, kLatent);
  const Tensor xi = noise(rng, kLatent);
  for (auto _ : state) benchmark::DoNotOptimize(generalized_step(z, 500, 480, s, eps, 0.1, &xi));
}
BENCHMARK(BM_GeneralizedStep);

void BM_AnalyticEps(benchmark::State& state) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const auto fam = blobs();
  const Tensor z = Tensor::vector({0.4, -0.2});
  for (auto _ : state) benchmark::DoNotOptimize(analytic_eps(fam, ConditionId{0}, z, s.alpha_bar(400)));
}
BENCHMARK(BM_AnalyticEps);

MlpShape latent_shape() {
  MlpShape shape;
  shape.input_dim = 512;
  shape.condition_count = 7;
  return shape;
}

void BM_MlpForward(benchmark::State& state) {
  const MlpDenoiser model = MlpDenoiser::initialize(latent_shape(), 3, false);
  const auto batch = static_cast<Eigen::Index>(state.range(0));
  NoiseStream rng(2, 0);
  Eigen::MatrixXd z(512, batch);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.gaussian();
  const std::vector<int> t(static_cast<std::size_t>(batch), 300);
  const std::vector<int> cond(static_cast<std::size_t>(batch), 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(z, t, cond));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(64);

void BM_MlpLossAndGradient(benchmark::State& state) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const MlpDenoiser model = MlpDenoiser::initialize(latent_shape(), 3, false);
  NoiseStream rng(4, 0);
  TrainingBatch batch;
  batch.z0.resize(512, 64);
  batch.noise.resize(512, 64);
  for (Eigen::Index i = 0; i < batch.z0.size(); ++i) {
    batch.z0.data()[i] = rng.gaussian();
    batch.noise.data()[i] = rng.gaussian();
  }
  for (int b = 0; b < 64; ++b) {
    batch.t.push_back(1 + 15 * b);
    batch.cond.push_back(b % 7);
  }
  batch.schedule = &s;
  MlpGradient grad;
  for (auto _ : state) benchmark::DoNotOptimize(training_loss(model, batch, &grad));
}
BENCHMARK(BM_MlpLossAndGradient);

void BM_AnalyticEdit(benchmark::State& state) {
  const NoiseSchedule s = NoiseSchedule::linear();
  AnalyticDenoiser den(blobs(), s);
  EditRequest req;
  req.source = Tensor::vector({-3.0, -1.5});
  req.cond_src = ConditionId{1};
  req.cond_tar = ConditionId{2};
  req.config.eta = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(ldedit(req, nullptr, den, s));
}
BENCHMARK(BM_AnalyticEdit);

}  // namespace
}  // namespace ldedit

BENCHMARK_MAIN();
