// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ldedit/tensor.hpp"

namespace ldedit {

/// H x W x C pixels in [0, 1], row-major with channels innermost.
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, std::size_t channels = 1, double fill = 0.0);
  /// Wraps a tensor of shape {H, W, C}.
  explicit Image(Tensor pixels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  double& at(std::size_t y, std::size_t x, std::size_t c = 0) noexcept {
    return pixels_[(y * width_ + x) * channels_ + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c = 0) const noexcept {
    return pixels_[(y * width_ + x) * channels_ + c];
  }

  const Tensor& tensor() const noexcept { return pixels_; }
  Tensor& tensor() noexcept { return pixels_; }

  void clamp();
  bool same_dims(const Image& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  Tensor pixels_;
};

/// Binary H x W grid; nonzero means masked.
struct Mask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> cells;

  Mask() = default;
  Mask(std::size_t h, std::size_t w, bool value = false) : height(h), width(w), cells(h * w, value ? 1 : 0) {}

  bool at(std::size_t y, std::size_t x) const noexcept { return cells[y * width + x] != 0; }
  void set(std::size_t y, std::size_t x, bool v) noexcept { cells[y * width + x] = v ? 1 : 0; }
  std::size_t count() const noexcept;

  friend bool operator==(const Mask&, const Mask&) = default;
};

/// Mask from a single-channel image: nonzero pixels are masked.
Mask mask_from_image(const Image& image);

/// Binary PGM ("P5") for one channel, PPM ("P6") for three; maxval 255 with
/// round-to-nearest quantization.
std::vector<std::uint8_t> encode_pnm(const Image& image);
Image decode_pnm(const std::vector<std::uint8_t>& bytes);

void write_pgm(const Image& image, const std::filesystem::path& path);
Image read_pgm(const std::filesystem::path& path);

/// Row-major grid of equally sized images separated by 2-pixel lines of
/// value 1.0. Unused trailing cells are filled with 1.0 as well.
Image montage(const std::vector<Image>& images, std::size_t cols);

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace ldedit
