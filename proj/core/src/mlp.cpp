// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ldedit/error.hpp"
#include "ldedit/rng.hpp"

namespace ldedit {

namespace {

using Eigen::ArrayXXd;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

ArrayXXd sigmoid(const ArrayXXd& x) { return 1.0 / (1.0 + (-x).exp()); }

std::size_t input_width(const MlpShape& s) { return s.input_dim + s.time_embed_dim + s.cond_embed_dim; }

void check_shape(const MlpShape& s) {
  LDEDIT_REQUIRE(s.input_dim > 0, "mlp: input_dim must be positive");
  LDEDIT_REQUIRE(s.time_embed_dim % 2 == 0 && s.time_embed_dim > 0, "mlp: time_embed_dim must be even and positive");
  LDEDIT_REQUIRE(s.cond_embed_dim > 0, "mlp: cond_embed_dim must be positive");
  LDEDIT_REQUIRE(s.condition_count >= 1, "mlp: condition_count must be >= 1");
  LDEDIT_REQUIRE(s.steps >= 1, "mlp: steps must be >= 1");
  for (std::size_t h : s.hidden_dims) LDEDIT_REQUIRE(h > 0, "mlp: hidden widths must be positive");
}

std::vector<std::size_t> layer_widths(const MlpShape& s) {
  std::vector<std::size_t> w{input_width(s)};
  w.insert(w.end(), s.hidden_dims.begin(), s.hidden_dims.end());
  w.push_back(s.input_dim);
  return w;
}

template <class M>
std::size_t copy_out(const M& m, double* dst) {
  std::copy(m.data(), m.data() + m.size(), dst);
  return static_cast<std::size_t>(m.size());
}

template <class M>
std::size_t copy_in(M& m, const double* src) {
  std::copy(src, src + m.size(), m.data());
  return static_cast<std::size_t>(m.size());
}

// Activations kept for the backward pass.
struct ForwardCache {
  std::vector<MatrixXd> pre;   // pre-activation of every hidden layer
  std::vector<MatrixXd> post;  // input, then each hidden activation
  MatrixXd output;
};

ForwardCache run_layers(const std::vector<DenseLayer>& layers, MatrixXd input) {
  ForwardCache c;
  c.post.push_back(std::move(input));
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    MatrixXd h = layers[l].weight * c.post.back();
    h.colwise() += layers[l].bias;
    const ArrayXXd x = h.array();
    c.post.push_back((x * sigmoid(x)).matrix());
    c.pre.push_back(std::move(h));
  }
  c.output = layers.back().weight * c.post.back();
  c.output.colwise() += layers.back().bias;
  return c;
}

}  // namespace

std::vector<double> time_embedding(int t, std::size_t dim, int steps) {
  LDEDIT_REQUIRE(dim > 0 && dim % 2 == 0, "time_embedding: dim must be even and positive");
  LDEDIT_REQUIRE(t >= 0 && t <= steps, "time_embedding: timestep " + std::to_string(t) + " outside [0, T]");
  const std::size_t k = dim / 2;
  std::vector<double> out(dim);
  for (std::size_t j = 0; j < k; ++j) {
    const double omega = k == 1 ? 1.0 : std::pow(10000.0, -static_cast<double>(j) / static_cast<double>(k - 1));
    out[2 * j] = std::sin(t * omega);
    out[2 * j + 1] = std::cos(t * omega);
  }
  return out;
}

MlpDenoiser MlpDenoiser::zeros(const MlpShape& shape) {
  check_shape(shape);
  MlpDenoiser m;
  m.shape_ = shape;
  m.cond_table_ = MatrixXd::Zero(static_cast<Index>(shape.cond_embed_dim), shape.condition_count);
  const auto widths = layer_widths(shape);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto in = static_cast<Index>(widths[l]);
    const auto out = static_cast<Index>(widths[l + 1]);
    m.layers_.push_back({MatrixXd::Zero(out, in), VectorXd::Zero(out)});
  }
  if (shape.input_skip) m.skip_ = VectorXd::Zero(static_cast<Index>(shape.input_dim));
  return m;
}

MlpDenoiser MlpDenoiser::initialize(const MlpShape& shape, std::uint64_t seed, bool zero_output) {
  MlpDenoiser m = zeros(shape);
  NoiseStream rng(seed, 0);
  for (Index i = 0; i < m.cond_table_.size(); ++i) m.cond_table_.data()[i] = rng.gaussian();
  for (std::size_t l = 0; l < m.layers_.size(); ++l) {
    DenseLayer& layer = m.layers_[l];
    if (zero_output && l + 1 == m.layers_.size()) break;
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    for (Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = limit * (2.0 * rng.uniform() - 1.0);
  }
  return m;
}

void MlpDenoiser::check_inputs(std::span<const int> t, std::span<const int> cond, Index batch) const {
  LDEDIT_REQUIRE(!layers_.empty(), "mlp: model has no layers");
  LDEDIT_REQUIRE(static_cast<Index>(t.size()) == batch && static_cast<Index>(cond.size()) == batch,
                 "mlp: timestep/condition count does not match batch size");
  for (int c : cond)
    LDEDIT_REQUIRE(c >= 0 && c < shape_.condition_count, "mlp: unknown condition id " + std::to_string(c));
}

MatrixXd MlpDenoiser::assemble_input(const MatrixXd& z, std::span<const int> t, std::span<const int> cond) const {
  LDEDIT_REQUIRE(static_cast<std::size_t>(z.rows()) == shape_.input_dim,
                 "mlp: input has " + std::to_string(z.rows()) + " rows, expected " + std::to_string(shape_.input_dim));
  check_inputs(t, cond, z.cols());
  const auto d = static_cast<Index>(shape_.input_dim);
  const auto te = static_cast<Index>(shape_.time_embed_dim);
  const auto ce = static_cast<Index>(shape_.cond_embed_dim);
  MatrixXd x(d + te + ce, z.cols());
  x.topRows(d) = z;
  for (Index j = 0; j < z.cols(); ++j) {
    const auto emb = time_embedding(t[j], shape_.time_embed_dim, shape_.steps);
    for (Index i = 0; i < te; ++i) x(d + i, j) = emb[i];
    x.block(d + te, j, ce, 1) = cond_table_.col(cond[j]);
  }
  return x;
}

MatrixXd MlpDenoiser::forward(const MatrixXd& z, std::span<const int> t, std::span<const int> cond) const {
  MatrixXd out = run_layers(layers_, assemble_input(z, t, cond)).output;
  if (skip_.size() > 0) out += skip_.asDiagonal() * z;
  return out;
}

Tensor MlpDenoiser::predict_eps(const Tensor& z, int t, ConditionId cond) const {
  LDEDIT_REQUIRE(z.size() == shape_.input_dim, "mlp: state has " + std::to_string(z.size()) +
                                                   " entries, model expects " + std::to_string(shape_.input_dim));
  const MatrixXd col = Eigen::Map<const MatrixXd>(z.data(), static_cast<Index>(z.size()), 1);
  const int ts[1] = {t};
  const int cs[1] = {cond.value};
  const MatrixXd out = forward(col, ts, cs);
  return Tensor(z.shape(), std::vector<double>(out.data(), out.data() + out.size()));
}

std::size_t MlpDenoiser::parameter_count() const {
  std::size_t n = static_cast<std::size_t>(cond_table_.size());
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n + static_cast<std::size_t>(skip_.size());
}

std::vector<double> MlpDenoiser::flatten() const {
  std::vector<double> out(parameter_count());
  double* p = out.data();
  p += copy_out(cond_table_, p);
  for (const auto& l : layers_) {
    p += copy_out(l.weight, p);
    p += copy_out(l.bias, p);
  }
  copy_out(skip_, p);
  return out;
}

void MlpDenoiser::assign(std::span<const double> params) {
  LDEDIT_REQUIRE(params.size() == parameter_count(), "mlp: parameter vector has " + std::to_string(params.size()) +
                                                         " entries, expected " + std::to_string(parameter_count()));
  const double* p = params.data();
  p += copy_in(cond_table_, p);
  for (auto& l : layers_) {
    p += copy_in(l.weight, p);
    p += copy_in(l.bias, p);
  }
  copy_in(skip_, p);
}

bool MlpDenoiser::all_finite() const {
  if (!cond_table_.allFinite() || !skip_.allFinite()) return false;
  for (const auto& l : layers_)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

std::vector<double> MlpGradient::flatten() const {
  std::size_t n = static_cast<std::size_t>(cond_table.size());
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  std::vector<double> out(n + static_cast<std::size_t>(skip.size()));
  double* p = out.data();
  p += copy_out(cond_table, p);
  for (const auto& l : layers) {
    p += copy_out(l.weight, p);
    p += copy_out(l.bias, p);
  }
  copy_out(skip, p);
  return out;
}

double training_loss(const MlpDenoiser& model, const TrainingBatch& batch, MlpGradient* grad) {
  LDEDIT_REQUIRE(batch.schedule != nullptr, "training_loss: batch has no schedule");
  LDEDIT_REQUIRE(batch.z0.rows() == batch.noise.rows() && batch.z0.cols() == batch.noise.cols(),
                 "training_loss: z0 and noise shapes differ");
  LDEDIT_REQUIRE(batch.z0.cols() > 0, "training_loss: empty batch");
  const Index bsz = batch.z0.cols();
  MatrixXd zt(batch.z0.rows(), bsz);
  for (Index j = 0; j < bsz; ++j) {
    const double a = batch.schedule->alpha_bar(batch.t.at(j));
    zt.col(j) = std::sqrt(a) * batch.z0.col(j) + std::sqrt(1.0 - a) * batch.noise.col(j);
  }
  const ForwardCache cache = run_layers(model.layers_, model.assemble_input(zt, batch.t, batch.cond));
  MatrixXd diff = cache.output - batch.noise;
  if (model.skip_.size() > 0) diff += model.skip_.asDiagonal() * zt;
  const double scale = 1.0 / static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() * scale;
  if (grad == nullptr) return loss;

  const auto& layers = model.layers_;
  grad->layers.resize(layers.size());
  MatrixXd delta = (2.0 * scale) * diff;
  if (model.skip_.size() > 0) {
    grad->skip = delta.cwiseProduct(zt).rowwise().sum();
  } else {
    grad->skip.resize(0);
  }
  for (std::size_t l = layers.size(); l-- > 0;) {
    grad->layers[l].weight.noalias() = delta * cache.post[l].transpose();
    grad->layers[l].bias = delta.rowwise().sum();
    MatrixXd back = layers[l].weight.transpose() * delta;
    if (l > 0) {
      // d/dx x*s(x) = s(x) * (1 + x * (1 - s(x)))
      const ArrayXXd x = cache.pre[l - 1].array();
      const ArrayXXd s = sigmoid(x);
      delta = (back.array() * s * (1.0 + x * (1.0 - s))).matrix();
    } else {
      delta = std::move(back);
    }
  }
  const auto offset = static_cast<Index>(model.shape_.input_dim + model.shape_.time_embed_dim);
  const auto ce = static_cast<Index>(model.shape_.cond_embed_dim);
  grad->cond_table = MatrixXd::Zero(model.cond_table_.rows(), model.cond_table_.cols());
  for (Index j = 0; j < bsz; ++j) grad->cond_table.col(batch.cond[j]) += delta.block(offset, j, ce, 1);
  return loss;
}

namespace {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

void adam_update(std::vector<double>& params, const std::vector<double>& grads, AdamState& st,
                 const TrainConfig& cfg) {
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    st.m[i] = cfg.adam_beta1 * st.m[i] + (1.0 - cfg.adam_beta1) * grads[i];
    st.v[i] = cfg.adam_beta2 * st.v[i] + (1.0 - cfg.adam_beta2) * grads[i] * grads[i];
    params[i] -= cfg.learning_rate * (st.m[i] / c1) / (std::sqrt(st.v[i] / c2) + cfg.adam_eps);
  }
}

}  // namespace

MlpDenoiser train_denoiser(const std::vector<LatentExample>& data, const NoiseSchedule& schedule,
                           const TrainConfig& config, MlpDenoiser model, TrainingReport* report,
                           const EpochCallback& on_epoch) {
  LDEDIT_REQUIRE(!data.empty(), "train_denoiser: empty dataset");
  LDEDIT_REQUIRE(config.epochs >= 0, "train_denoiser: epochs must be >= 0");
  LDEDIT_REQUIRE(config.batch_size >= 1 && config.batch_size <= data.size(),
                 "train_denoiser: batch_size must lie in [1, dataset size]");
  LDEDIT_REQUIRE(config.learning_rate >= 0.0 && std::isfinite(config.learning_rate),
                 "train_denoiser: learning_rate must be finite and >= 0");
  LDEDIT_REQUIRE(config.adam_beta1 >= 0.0 && config.adam_beta1 < 1.0 && config.adam_beta2 >= 0.0 &&
                     config.adam_beta2 < 1.0 && config.adam_eps > 0.0,
                 "train_denoiser: invalid Adam constants");
  LDEDIT_REQUIRE(model.shape().steps == schedule.steps(), "train_denoiser: model and schedule disagree on T");
  const std::size_t dim = model.shape().input_dim;
  for (const auto& ex : data) {
    LDEDIT_REQUIRE(ex.latent.size() == dim, "train_denoiser: latent size does not match model input_dim");
    LDEDIT_REQUIRE(ex.cond.value >= 0 && ex.cond.value < model.shape().condition_count,
                   "train_denoiser: condition id outside the embedding table");
  }

  NoiseStream rng(config.seed, 1);
  std::vector<double> params = model.flatten();
  AdamState adam{std::vector<double>(params.size(), 0.0), std::vector<double>(params.size(), 0.0), 0};
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto d = static_cast<Index>(dim);
  MlpGradient grad;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      TrainingBatch batch{MatrixXd(d, static_cast<Index>(count)), MatrixXd(d, static_cast<Index>(count)), {}, {},
                          &schedule};
      for (std::size_t j = 0; j < count; ++j) {
        const LatentExample& ex = data[order[start + j]];
        const auto col = static_cast<Index>(j);
        batch.z0.col(col) = Eigen::Map<const VectorXd>(ex.latent.data(), d);
        batch.t.push_back(static_cast<int>(rng.uniform_int(1, schedule.steps())));
        batch.cond.push_back(ex.cond.value);
        for (Index r = 0; r < d; ++r) batch.noise(r, col) = rng.gaussian();
      }
      const double loss = training_loss(model, batch, &grad);
      if (!std::isfinite(loss))
        throw RuntimeError("train_denoiser: non-finite loss in epoch " + std::to_string(epoch) + " at sample " +
                           std::to_string(start));
      weighted += loss * static_cast<double>(count);
      adam_update(params, grad.flatten(), adam, config);
      model.assign(params);
      if (!model.all_finite())
        throw RuntimeError("train_denoiser: non-finite parameters after step " + std::to_string(adam.step));
    }
    const double epoch_loss = weighted / static_cast<double>(order.size());
    if (report != nullptr) report->epoch_losses.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  return model;
}

}  // namespace ldedit
