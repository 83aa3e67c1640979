// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ldedit/error.hpp"

namespace ldedit {
namespace {

TEST(NoiseStream, SameKeySameDraws) {
  NoiseStream a(42, 7);
  NoiseStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.gaussian(), b.gaussian());
    ASSERT_EQ(a.uniform(), b.uniform());
  }
  EXPECT_EQ(gaussian_draw(a, {3, 4}), gaussian_draw(b, {3, 4}));
  EXPECT_EQ(a.draw_count(), 2012u);
}

TEST(NoiseStream, KeysAreNotInterchangeable) {
  NoiseStream a(1, 2);
  NoiseStream b(2, 1);
  NoiseStream c(1, 2ULL << 32);
  const double x = a.uniform();
  EXPECT_NE(x, b.uniform());
  EXPECT_NE(x, c.uniform());
}

TEST(NoiseStream, UniformRanges) {
  NoiseStream rng(5, 0);
  int hits[3] = {};
  for (int i = 0; i < 30000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = rng.uniform_int(-1, 1);
    ASSERT_GE(k, -1);
    ASSERT_LE(k, 1);
    ++hits[k + 1];
  }
  for (int h : hits) EXPECT_NEAR(h / 30000.0, 1.0 / 3.0, 0.015);
  EXPECT_EQ(rng.uniform_int(4, 4), 4);
  EXPECT_THROW(rng.uniform_int(2, 1), InvalidArgument);
}

TEST(NoiseStream, GaussianMoments) {
  NoiseStream rng(9, 0);
  const int n = 1000000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.01);
}

TEST(NoiseStream, DistinctStreamsUncorrelated) {
  NoiseStream a(17, 0);
  NoiseStream b(17, 1);
  const int n = 100000;
  double sab = 0.0, sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.gaussian();
    const double y = b.gaussian();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::abs(corr), 0.01);
}

TEST(NoiseStream, GaussianDrawShape) {
  NoiseStream rng(1, 1);
  const Tensor t = gaussian_draw(rng, {2, 3, 4});
  EXPECT_EQ(t.shape(), (Shape{2, 3, 4}));
  EXPECT_EQ(rng.draw_count(), 24u);
  EXPECT_THROW(gaussian_draw(rng, {2, 0}), InvalidArgument);
}

}  // namespace
}  // namespace ldedit
