// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "ldedit/error.hpp"

namespace ldedit {

Image::Image(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels), pixels_(Shape{height, width, channels}, fill) {
  LDEDIT_REQUIRE(height > 0 && width > 0, "image: dimensions must be positive");
  LDEDIT_REQUIRE(channels == 1 || channels == 3, "image: only 1 or 3 channels are supported");
}

Image::Image(Tensor pixels) {
  LDEDIT_REQUIRE(pixels.shape().size() == 3, "image: tensor must have shape {H, W, C}");
  height_ = pixels.shape()[0];
  width_ = pixels.shape()[1];
  channels_ = pixels.shape()[2];
  LDEDIT_REQUIRE(height_ > 0 && width_ > 0, "image: dimensions must be positive");
  LDEDIT_REQUIRE(channels_ == 1 || channels_ == 3, "image: only 1 or 3 channels are supported");
  pixels_ = std::move(pixels);
}

void Image::clamp() {
  for (double& v : pixels_.values()) v = std::clamp(v, 0.0, 1.0);
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; }));
}

Mask mask_from_image(const Image& image) {
  LDEDIT_REQUIRE(image.channels() == 1, "mask: expected a single-channel image");
  Mask m(image.height(), image.width());
  for (std::size_t i = 0; i < image.size(); ++i) m.cells[i] = image.tensor()[i] != 0.0 ? 1 : 0;
  return m;
}

std::vector<std::uint8_t> encode_pnm(const Image& image) {
  LDEDIT_REQUIRE(image.size() > 0, "pnm: empty image");
  const std::string header = std::string(image.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + image.size());
  for (double v : image.tensor().values()) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0)));
  }
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  std::size_t number() {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (++digits > 9) throw FormatError("pnm: header number too large");
    }
    if (digits == 0) throw FormatError("pnm: malformed header");
    return value;
  }

  std::size_t payload_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw FormatError("pnm: malformed header");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

Image decode_pnm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw FormatError("pnm: bad magic (expected P5 or P6)");
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader r(bytes);
  const std::size_t width = r.number();
  const std::size_t height = r.number();
  const std::size_t maxval = r.number();
  if (width == 0 || height == 0) throw FormatError("pnm: zero image dimension");
  if (maxval == 0 || maxval > 255) throw FormatError("pnm: only 8-bit maxval is supported");
  const std::size_t start = r.payload_start();
  const std::size_t count = width * height * channels;
  if (bytes.size() - start < count) throw FormatError("pnm: truncated payload");
  if (bytes.size() - start > count) throw FormatError("pnm: trailing bytes after payload");
  Image img(height, width, channels);
  for (std::size_t i = 0; i < count; ++i) {
    if (bytes[start + i] > maxval) throw FormatError("pnm: sample exceeds maxval");
    img.tensor()[i] = static_cast<double>(bytes[start + i]) / static_cast<double>(maxval);
  }
  return img;
}

void write_pgm(const Image& image, const std::filesystem::path& path) { write_file_atomic(path, encode_pnm(image)); }

Image read_pgm(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

Image montage(const std::vector<Image>& images, std::size_t cols) {
  LDEDIT_REQUIRE(!images.empty(), "montage: empty image list");
  LDEDIT_REQUIRE(cols >= 1, "montage: cols must be >= 1");
  const Image& first = images.front();
  for (const auto& im : images) LDEDIT_REQUIRE(im.same_dims(first), "montage: images differ in size");
  constexpr std::size_t kSep = 2;
  const std::size_t c = std::min(cols, images.size());
  const std::size_t rows = (images.size() + c - 1) / c;
  const std::size_t h = first.height();
  const std::size_t w = first.width();
  Image out(rows * h + (rows - 1) * kSep, c * w + (c - 1) * kSep, first.channels(), 1.0);
  for (std::size_t k = 0; k < images.size(); ++k) {
    const std::size_t oy = (k / c) * (h + kSep);
    const std::size_t ox = (k % c) * (w + kSep);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        for (std::size_t ch = 0; ch < first.channels(); ++ch) out.at(oy + y, ox + x, ch) = images[k].at(y, x, ch);
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw RuntimeError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw RuntimeError("cannot rename onto '" + path.string() + "'");
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open '" + path.string() + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace ldedit
