// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "ldedit/image.hpp"
#include "ldedit/tensor.hpp"

namespace ldedit {

/// Shared-basis linear autoencoder over non-overlapping f x f patches. A
/// patch is flattened as (dy, dx, channel) row-major; the latent of a
/// H x W x C image is a tensor of shape {H/f, W/f, c}.
struct PatchAutoencoder {
  std::size_t f = 4;
  std::size_t c = 8;
  std::size_t channels = 1;
  Eigen::MatrixXd basis;        ///< c x (f*f*channels), orthonormal rows
  Eigen::VectorXd mean;         ///< f*f*channels
  Eigen::VectorXd latent_scale; ///< c, multiplies the projection coefficients
  std::uint64_t trained_on = 0; ///< fingerprint of the fitting corpus

  std::size_t patch_dim() const noexcept { return f * f * channels; }
  Shape latent_shape(std::size_t height, std::size_t width) const { return {height / f, width / f, c}; }
  /// Checks dimensions, orthonormality (1e-8) and finiteness.
  void validate() const;
};

struct AutoencoderOptions {
  /// Scale each latent channel to unit variance over the corpus. Off by
  /// default: the raw coefficients keep the low-order channels dominant.
  bool standardize = false;
};

/// Top-c principal directions of all corpus patches. Each basis row is
/// signed so that its largest-magnitude entry (first on ties) is positive.
PatchAutoencoder fit_autoencoder(const std::vector<Image>& corpus, std::size_t f, std::size_t c,
                                 const AutoencoderOptions& options = {});

Tensor encode(const PatchAutoencoder& ae, const Image& x);
/// mean + basis^T (z / scale) per cell, clamped to [0, 1].
Image decode(const PatchAutoencoder& ae, const Tensor& z);
/// Same as decode without the final clamp.
Image decode_unclamped(const PatchAutoencoder& ae, const Tensor& z);
double reconstruction_error(const PatchAutoencoder& ae, const Image& x);

/// Majority rule: a cell is masked iff at least half of its f x f pixels are.
Mask downsample_mask(const Mask& pixel_mask, std::size_t f);

/// FNV-1a over the shapes and pixel bit patterns of the corpus.
std::uint64_t corpus_fingerprint(const std::vector<Image>& corpus);

}  // namespace ldedit
