// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ldedit/denoiser.hpp"
#include "ldedit/image.hpp"
#include "ldedit/mixture.hpp"
#include "ldedit/rng.hpp"

namespace ldedit {

enum class ShapeKind { kDisc = 0, kSquare = 1, kCross = 2 };
enum class Intensity { kLow = 0, kHigh = 1 };

inline constexpr std::size_t kCanvasSize = 32;
inline constexpr double kBackground = 0.05;
inline constexpr double kPixelNoise = 0.02;
inline constexpr int kCenterMin = 10;
inline constexpr int kCenterMax = 22;
inline constexpr int kRadiusMin = 5;
inline constexpr int kRadiusMax = 8;

double intensity_value(Intensity level);
const char* shape_name(ShapeKind kind);
/// Parses "disc", "square" or "cross".
ShapeKind parse_shape(const std::string& name);

struct ShapeSpec {
  ShapeKind shape = ShapeKind::kDisc;
  Intensity intensity = Intensity::kLow;
  int cx = 16;
  int cy = 16;
  int radius = 6;

  friend bool operator==(const ShapeSpec&, const ShapeSpec&) = default;
};

/// Condition ids 1..6: 1 + 2 * shape + intensity.
ConditionId shape_condition(ShapeKind shape, Intensity intensity);
ShapeKind condition_shape(ConditionId cond);
Intensity condition_intensity(ConditionId cond);
/// Vocabulary with labels such as "disc-low" and "square-high".
ConditionVocabulary shapes_vocabulary();

/// Hard-edged footprint on a size x size canvas. Discs cover
/// (x-cx)^2 + (y-cy)^2 <= r^2, squares max(|dx|, |dy|) <= r, and crosses the
/// union of two bars of half-width max(1, r / 3) and half-length r.
Mask render_footprint(ShapeKind shape, int cx, int cy, int radius, std::size_t size = kCanvasSize);

/// Noise-free rendering: background 0.05, footprint at the intensity level.
Image render_shape(const ShapeSpec& spec);

struct LabeledImage {
  Image image;
  ConditionId cond;
  ShapeSpec spec;
};

/// Image i draws its spec and its uniform pixel noise from stream (seed, i).
LabeledImage generate_shape(std::uint64_t seed, std::uint64_t index);
std::vector<LabeledImage> generate_shapes(std::size_t n, std::uint64_t seed);

/// Ancestral sampling from the condition-weighted mixture.
std::vector<Tensor> sample_mixture(const ConditionedMixtureFamily& family, ConditionId cond, std::size_t n,
                                   NoiseStream& rng);

/// One line per image: "filename cond cx cy radius".
struct ManifestEntry {
  std::string filename;
  int cond = 0;
  int cx = 0;
  int cy = 0;
  int radius = 0;
};

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace ldedit
