// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/autoencoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ldedit/error.hpp"

namespace ldedit {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_divisible(const Image& x, std::size_t f, const char* what) {
  LDEDIT_REQUIRE(f >= 1, std::string(what) + ": patch factor must be >= 1");
  LDEDIT_REQUIRE(x.height() % f == 0 && x.width() % f == 0,
                 std::string(what) + ": image " + std::to_string(x.height()) + "x" + std::to_string(x.width()) +
                     " is not divisible by f = " + std::to_string(f));
}

void gather_patch(const Image& x, std::size_t f, std::size_t py, std::size_t px, double* out) {
  std::size_t k = 0;
  for (std::size_t dy = 0; dy < f; ++dy)
    for (std::size_t dx = 0; dx < f; ++dx)
      for (std::size_t ch = 0; ch < x.channels(); ++ch) out[k++] = x.at(py * f + dy, px * f + dx, ch);
}

void scatter_patch(Image& x, std::size_t f, std::size_t py, std::size_t px, const double* in) {
  std::size_t k = 0;
  for (std::size_t dy = 0; dy < f; ++dy)
    for (std::size_t dx = 0; dx < f; ++dx)
      for (std::size_t ch = 0; ch < x.channels(); ++ch) x.at(py * f + dy, px * f + dx, ch) = in[k++];
}

constexpr double kOrthoTolerance = 1e-8;

}  // namespace

void PatchAutoencoder::validate() const {
  const auto p = static_cast<Index>(patch_dim());
  LDEDIT_REQUIRE(f >= 1 && c >= 1 && (channels == 1 || channels == 3), "autoencoder: invalid f, c or channels");
  LDEDIT_REQUIRE(c <= patch_dim(), "autoencoder: c exceeds f*f*C");
  LDEDIT_REQUIRE(basis.rows() == static_cast<Index>(c) && basis.cols() == p, "autoencoder: basis shape mismatch");
  LDEDIT_REQUIRE(mean.size() == p, "autoencoder: mean shape mismatch");
  LDEDIT_REQUIRE(latent_scale.size() == static_cast<Index>(c), "autoencoder: latent scale shape mismatch");
  LDEDIT_REQUIRE(basis.allFinite() && mean.allFinite() && latent_scale.allFinite(), "autoencoder: non-finite values");
  LDEDIT_REQUIRE((latent_scale.array() > 0.0).all(), "autoencoder: latent scale must be positive");
  const MatrixXd gram = basis * basis.transpose() - MatrixXd::Identity(basis.rows(), basis.rows());
  LDEDIT_REQUIRE(gram.cwiseAbs().maxCoeff() < kOrthoTolerance, "autoencoder: basis rows are not orthonormal");
}

std::uint64_t corpus_fingerprint(const std::vector<Image>& corpus) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(corpus.size());
  for (const auto& im : corpus) {
    mix(im.height());
    mix(im.width());
    mix(im.channels());
    for (double v : im.tensor().values()) mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

PatchAutoencoder fit_autoencoder(const std::vector<Image>& corpus, std::size_t f, std::size_t c,
                                 const AutoencoderOptions& options) {
  LDEDIT_REQUIRE(!corpus.empty(), "fit_autoencoder: empty corpus");
  LDEDIT_REQUIRE(c >= 1, "fit_autoencoder: c must be >= 1");
  const std::size_t channels = corpus.front().channels();
  for (const auto& im : corpus) {
    check_divisible(im, f, "fit_autoencoder");
    LDEDIT_REQUIRE(im.channels() == channels, "fit_autoencoder: mixed channel counts");
  }
  const std::size_t pdim = f * f * channels;
  LDEDIT_REQUIRE(c <= pdim, "fit_autoencoder: c = " + std::to_string(c) + " exceeds f*f*C = " + std::to_string(pdim));

  const auto p = static_cast<Index>(pdim);
  VectorXd sum = VectorXd::Zero(p);
  MatrixXd outer = MatrixXd::Zero(p, p);
  VectorXd patch(p);
  std::size_t count = 0;
  for (const auto& im : corpus)
    for (std::size_t py = 0; py < im.height() / f; ++py)
      for (std::size_t px = 0; px < im.width() / f; ++px) {
        gather_patch(im, f, py, px, patch.data());
        sum += patch;
        ++count;
      }
  const VectorXd mean = sum / static_cast<double>(count);
  for (const auto& im : corpus)
    for (std::size_t py = 0; py < im.height() / f; ++py)
      for (std::size_t px = 0; px < im.width() / f; ++px) {
        gather_patch(im, f, py, px, patch.data());
        patch -= mean;
        outer.selfadjointView<Eigen::Lower>().rankUpdate(patch);
      }
  MatrixXd cov = outer.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(count);

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw RuntimeError("fit_autoencoder: eigendecomposition failed");
  // Eigenvalues come out ascending; take the last c columns in reverse.
  PatchAutoencoder ae;
  ae.f = f;
  ae.c = c;
  ae.channels = channels;
  ae.mean = mean;
  ae.basis.resize(static_cast<Index>(c), p);
  ae.latent_scale = VectorXd::Ones(static_cast<Index>(c));
  for (std::size_t k = 0; k < c; ++k) {
    const Index col = p - 1 - static_cast<Index>(k);
    VectorXd v = solver.eigenvectors().col(col);
    Index arg = 0;
    for (Index i = 1; i < p; ++i)
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0.0) v = -v;
    ae.basis.row(static_cast<Index>(k)) = v.transpose();
    if (options.standardize) {
      const double var = std::max(solver.eigenvalues()[col], 0.0);
      ae.latent_scale[static_cast<Index>(k)] = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
    }
  }
  ae.trained_on = corpus_fingerprint(corpus);
  return ae;
}

Tensor encode(const PatchAutoencoder& ae, const Image& x) {
  check_divisible(x, ae.f, "encode");
  LDEDIT_REQUIRE(x.channels() == ae.channels, "encode: channel count mismatch");
  const std::size_t gh = x.height() / ae.f;
  const std::size_t gw = x.width() / ae.f;
  Tensor z(ae.latent_shape(x.height(), x.width()));
  VectorXd patch(static_cast<Index>(ae.patch_dim()));
  for (std::size_t py = 0; py < gh; ++py)
    for (std::size_t px = 0; px < gw; ++px) {
      gather_patch(x, ae.f, py, px, patch.data());
      const VectorXd coef = (ae.basis * (patch - ae.mean)).cwiseProduct(ae.latent_scale);
      std::copy(coef.data(), coef.data() + coef.size(), z.data() + (py * gw + px) * ae.c);
    }
  return z;
}

Image decode_unclamped(const PatchAutoencoder& ae, const Tensor& z) {
  LDEDIT_REQUIRE(z.shape().size() == 3 && z.shape()[2] == ae.c && z.shape()[0] > 0 && z.shape()[1] > 0,
                 "decode: latent shape " + shape_to_string(z.shape()) + " does not match the autoencoder");
  const std::size_t gh = z.shape()[0];
  const std::size_t gw = z.shape()[1];
  Image x(gh * ae.f, gw * ae.f, ae.channels);
  const auto c = static_cast<Index>(ae.c);
  for (std::size_t py = 0; py < gh; ++py)
    for (std::size_t px = 0; px < gw; ++px) {
      const Eigen::Map<const VectorXd> coef(z.data() + (py * gw + px) * ae.c, c);
      const VectorXd patch = ae.mean + ae.basis.transpose() * coef.cwiseQuotient(ae.latent_scale);
      scatter_patch(x, ae.f, py, px, patch.data());
    }
  return x;
}

Image decode(const PatchAutoencoder& ae, const Tensor& z) {
  Image x = decode_unclamped(ae, z);
  x.clamp();
  return x;
}

double reconstruction_error(const PatchAutoencoder& ae, const Image& x) {
  return mean_squared_error(x.tensor(), decode(ae, encode(ae, x)).tensor());
}

Mask downsample_mask(const Mask& pixel_mask, std::size_t f) {
  LDEDIT_REQUIRE(f >= 1, "downsample_mask: f must be >= 1");
  LDEDIT_REQUIRE(pixel_mask.height % f == 0 && pixel_mask.width % f == 0,
                 "downsample_mask: mask dimensions not divisible by f");
  Mask out(pixel_mask.height / f, pixel_mask.width / f);
  for (std::size_t y = 0; y < out.height; ++y)
    for (std::size_t x = 0; x < out.width; ++x) {
      std::size_t n = 0;
      for (std::size_t dy = 0; dy < f; ++dy)
        for (std::size_t dx = 0; dx < f; ++dx) n += pixel_mask.at(y * f + dy, x * f + dx) ? 1 : 0;
      out.set(y, x, 2 * n >= f * f);
    }
  return out;
}

}  // namespace ldedit
