// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/rng.hpp"

#include <cmath>
#include <numbers>

#include "ldedit/error.hpp"

namespace ldedit {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

std::uint64_t NoiseStream::next_u64() { return engine_(); }

double NoiseStream::uniform() {
  ++draws_;
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t NoiseStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  LDEDIT_REQUIRE(lo <= hi, "uniform_int: empty range");
  ++draws_;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double NoiseStream::gaussian() {
  ++draws_;
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Tensor gaussian_draw(NoiseStream& rng, const Shape& shape) {
  LDEDIT_REQUIRE(!shape.empty(), "gaussian_draw: empty shape");
  for (std::size_t d : shape) LDEDIT_REQUIRE(d > 0, "gaussian_draw: zero dimension in " + shape_to_string(shape));
  Tensor out(shape);
  for (double& v : out.values()) v = rng.gaussian();
  return out;
}

}  // namespace ldedit
