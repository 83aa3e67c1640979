// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ldedit/error.hpp"

namespace ldedit {

double intensity_value(Intensity level) { return level == Intensity::kLow ? 0.4 : 0.9; }

const char* shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kDisc:
      return "disc";
    case ShapeKind::kSquare:
      return "square";
    case ShapeKind::kCross:
      return "cross";
  }
  return "?";
}

ShapeKind parse_shape(const std::string& name) {
  for (ShapeKind k : {ShapeKind::kDisc, ShapeKind::kSquare, ShapeKind::kCross})
    if (name == shape_name(k)) return k;
  throw InvalidArgument("unknown shape '" + name + "' (expected disc, square or cross)");
}

ConditionId shape_condition(ShapeKind shape, Intensity intensity) {
  return ConditionId{1 + 2 * static_cast<int>(shape) + static_cast<int>(intensity)};
}

ShapeKind condition_shape(ConditionId cond) {
  LDEDIT_REQUIRE(cond.value >= 1 && cond.value <= 6, "not a shapes condition: " + std::to_string(cond.value));
  return static_cast<ShapeKind>((cond.value - 1) / 2);
}

Intensity condition_intensity(ConditionId cond) {
  LDEDIT_REQUIRE(cond.value >= 1 && cond.value <= 6, "not a shapes condition: " + std::to_string(cond.value));
  return static_cast<Intensity>((cond.value - 1) % 2);
}

ConditionVocabulary shapes_vocabulary() {
  ConditionVocabulary v;
  for (ShapeKind k : {ShapeKind::kDisc, ShapeKind::kSquare, ShapeKind::kCross})
    for (Intensity i : {Intensity::kLow, Intensity::kHigh})
      v.add(shape_condition(k, i), std::string(shape_name(k)) + (i == Intensity::kLow ? "-low" : "-high"));
  return v;
}

Mask render_footprint(ShapeKind shape, int cx, int cy, int radius, std::size_t size) {
  LDEDIT_REQUIRE(radius >= 1, "render_footprint: radius must be >= 1");
  Mask m(size, size);
  const int arm = std::max(1, radius / 3);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      const int dx = std::abs(static_cast<int>(x) - cx);
      const int dy = std::abs(static_cast<int>(y) - cy);
      bool in = false;
      switch (shape) {
        case ShapeKind::kDisc:
          in = dx * dx + dy * dy <= radius * radius;
          break;
        case ShapeKind::kSquare:
          in = dx <= radius && dy <= radius;
          break;
        case ShapeKind::kCross:
          in = (dx <= radius && dy <= arm) || (dx <= arm && dy <= radius);
          break;
      }
      m.set(y, x, in);
    }
  return m;
}

Image render_shape(const ShapeSpec& spec) {
  const Mask m = render_footprint(spec.shape, spec.cx, spec.cy, spec.radius);
  Image img(kCanvasSize, kCanvasSize, 1, kBackground);
  const double level = intensity_value(spec.intensity);
  for (std::size_t i = 0; i < m.cells.size(); ++i)
    if (m.cells[i]) img.tensor()[i] = level;
  return img;
}

LabeledImage generate_shape(std::uint64_t seed, std::uint64_t index) {
  NoiseStream rng(seed, index);
  ShapeSpec spec;
  spec.shape = static_cast<ShapeKind>(rng.uniform_int(0, 2));
  spec.intensity = static_cast<Intensity>(rng.uniform_int(0, 1));
  spec.cx = static_cast<int>(rng.uniform_int(kCenterMin, kCenterMax));
  spec.cy = static_cast<int>(rng.uniform_int(kCenterMin, kCenterMax));
  spec.radius = static_cast<int>(rng.uniform_int(kRadiusMin, kRadiusMax));
  Image img = render_shape(spec);
  for (double& v : img.tensor().values()) v += kPixelNoise * (2.0 * rng.uniform() - 1.0);
  img.clamp();
  return {std::move(img), shape_condition(spec.shape, spec.intensity), spec};
}

std::vector<LabeledImage> generate_shapes(std::size_t n, std::uint64_t seed) {
  LDEDIT_REQUIRE(n >= 1, "generate_shapes: n must be >= 1");
  std::vector<LabeledImage> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_shape(seed, i));
  return out;
}

std::vector<Tensor> sample_mixture(const ConditionedMixtureFamily& family, ConditionId cond, std::size_t n,
                                   NoiseStream& rng) {
  const std::vector<double>& w = family.weights(cond);
  const GaussianMixture& mix = family.base();
  std::vector<Tensor> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double u = rng.uniform();
    // Falls back to the last positive-weight component if rounding leaves
    // u above the running total.
    std::size_t k = w.size();
    std::size_t last = 0;
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] <= 0.0) continue;
      last = j;
      acc += w[j];
      if (k == w.size() && u < acc) k = j;
    }
    if (k == w.size()) k = last;
    const MixtureComponent& c = mix.component(k);
    Tensor x(Shape{mix.dim()});
    for (std::size_t d = 0; d < mix.dim(); ++d) x[d] = c.mean[d] + std::sqrt(c.variance[d]) * rng.gaussian();
    out.push_back(std::move(x));
  }
  return out;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "# filename cond cx cy radius\n";
  for (const auto& e : entries) {
    LDEDIT_REQUIRE(!e.filename.empty() && e.filename.find_first_of(" \t\n") == std::string::npos,
                   "manifest: filenames must be non-empty and free of whitespace");
    os << e.filename << ' ' << e.cond << ' ' << e.cx << ' ' << e.cy << ' ' << e.radius << '\n';
  }
  const std::string s = os.str();
  write_file_atomic(path, std::vector<std::uint8_t>(s.begin(), s.end()));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open manifest '" + path.string() + "'");
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ManifestEntry e;
    std::string extra;
    if (!(ls >> e.filename >> e.cond >> e.cx >> e.cy >> e.radius) || (ls >> extra))
      throw FormatError("manifest " + path.string() + ":" + std::to_string(lineno) + ": malformed row");
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace ldedit
