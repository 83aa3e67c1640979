// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "ldedit/tensor.hpp"

namespace ldedit {

/// Reproducible random stream keyed by (seed, stream_id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of seed and stream_id; both algorithms are fixed by the C++
/// standard, so draws are identical on every conforming platform. Gaussian
/// values use the Box-Muller transform, emitting the cosine branch first and
/// caching the sine branch for the next call.
///
/// Batch execution gives edit job i the stream (seed, i), which keeps batch
/// and sequential runs bit-identical.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform on [0, 1) with 53 bits of precision.
  double uniform();
  /// Uniform integer on [lo, hi], rejection-sampled (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal.
  double gaussian();

  /// Number of uniform/gaussian values handed out so far.
  std::uint64_t draw_count() const noexcept { return draws_; }

 private:
  std::uint64_t next_u64();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Tensor of i.i.d. standard normal entries; every dimension must be positive.
Tensor gaussian_draw(NoiseStream& rng, const Shape& shape);

}  // namespace ldedit
