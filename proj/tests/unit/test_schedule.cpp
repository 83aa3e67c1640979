// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/schedule.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ldedit/error.hpp"
#include "ldedit/rng.hpp"

namespace ldedit {
namespace {

TEST(Schedule, SingleStep) {
  const NoiseSchedule s = NoiseSchedule::linear(1, 0.5, 0.5);
  ASSERT_EQ(s.steps(), 1);
  EXPECT_EQ(s.beta(1), 0.5);
  EXPECT_EQ(s.alpha_bar(0), 1.0);
  EXPECT_EQ(s.alpha_bar(1), 0.5);
}

TEST(Schedule, TwoEqualBetas) {
  EXPECT_NEAR(NoiseSchedule::linear(2, 0.1, 0.1).alpha_bar(2), 0.81, 1e-15);
  EXPECT_NEAR(NoiseSchedule::from_betas({0.1, 0.1}).alpha_bar(2), 0.81, 1e-15);
}

TEST(Schedule, DefaultMatchesLongDoubleProduct) {
  const NoiseSchedule s = NoiseSchedule::linear();
  ASSERT_EQ(s.steps(), 1000);
  long double prod = 1.0L;
  for (int t = 1; t <= 1000; ++t) {
    const long double beta = 1e-4L + (0.02L - 1e-4L) * static_cast<long double>(t - 1) / 999.0L;
    prod *= 1.0L - beta;
    ASSERT_NEAR(s.alpha_bar(t) / static_cast<double>(prod), 1.0, 1e-12) << "t=" << t;
  }
  EXPECT_LT(s.alpha_bar(1000), 1e-4);
  EXPECT_EQ(s.alpha_bar(0), 1.0);
  // Frozen from the oracle above.
  EXPECT_NEAR(s.alpha_bar(600), 0.025879, 5e-7);
  EXPECT_NEAR(s.alpha_bar(300), 0.396420, 5e-7);
}

TEST(Schedule, RejectsBadInput) {
  EXPECT_THROW(NoiseSchedule::linear(0), InvalidArgument);
  EXPECT_THROW(NoiseSchedule::from_betas({}), InvalidArgument);
  EXPECT_THROW(NoiseSchedule::from_betas({0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(NoiseSchedule::from_betas({0.0}), InvalidArgument);
  const NoiseSchedule s = NoiseSchedule::linear(10);
  EXPECT_THROW(s.alpha_bar(11), InvalidArgument);
  EXPECT_THROW(s.alpha_bar(-1), InvalidArgument);
  EXPECT_THROW(s.beta(0), InvalidArgument);
}

TEST(ScheduleProperty, AlphaBarStrictlyDecreasing) {
  NoiseStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int steps = static_cast<int>(rng.uniform_int(1, 2000));
    const double lo = 1e-5 + 0.01 * rng.uniform();
    const double hi = lo + 0.05 * rng.uniform();
    const NoiseSchedule s = NoiseSchedule::linear(steps, lo, hi);
    for (int t = 0; t < steps; ++t) ASSERT_GT(s.alpha_bar(t), s.alpha_bar(t + 1));
  }
}

TEST(Subsequence, Examples) {
  const NoiseSchedule s = NoiseSchedule::linear();
  EXPECT_EQ(make_subsequence(s, 1, 600).taus(), std::vector<int>{600});
  std::vector<int> expected;
  for (int i = 1; i <= 25; ++i) expected.push_back(25 * i);
  EXPECT_EQ(make_subsequence(s, 25, 625).taus(), expected);
  EXPECT_THROW(make_subsequence(s, 700, 600), InvalidArgument);
  EXPECT_THROW(make_subsequence(s, 0, 600), InvalidArgument);
  EXPECT_THROW(make_subsequence(s, 10, 1001), InvalidArgument);
  EXPECT_EQ(make_subsequence(s, 600, 600)[0], 1);
}

TEST(Subsequence, RoundingAndRepair) {
  const NoiseSchedule s = NoiseSchedule::linear();
  // round((i + 1) * 7 / 4) with ties up: 1.75, 3.5, 5.25, 7 -> 2, 4, 5, 7.
  EXPECT_EQ(make_subsequence(s, 4, 7).taus(), (std::vector<int>{2, 4, 5, 7}));
  EXPECT_EQ(make_subsequence(s, 50, 600)[0], 12);
}

TEST(SubsequenceProperty, EndpointsUniqueIncreasing) {
  const NoiseSchedule s = NoiseSchedule::linear();
  for (int t_stop : {1, 2, 7, 99, 300, 600, 999, 1000})
    for (int n = 1; n <= t_stop; n += std::max(1, t_stop / 37)) {
      const StepSequence tau = make_subsequence(s, n, t_stop);
      ASSERT_EQ(tau.size(), static_cast<std::size_t>(n));
      ASSERT_EQ(tau.t_stop(), t_stop);
      ASSERT_GE(tau[0], 1);
      for (std::size_t i = 1; i < tau.size(); ++i) ASSERT_LT(tau[i - 1], tau[i]);
    }
}

TEST(Sigma, Examples) {
  EXPECT_EQ(sigma_from_eta(0.8, 0.5, 0.0), 0.0);
  EXPECT_NEAR(sigma_from_eta(0.8, 0.5, 1.0), std::sqrt(0.15), 1e-12);
  EXPECT_NEAR(sigma_from_eta(0.8, 0.5, 1.0), 0.387298, 1e-6);
  EXPECT_NEAR(sigma_from_eta(0.8, 0.5, 0.5), 0.193649, 1e-6);
  const NoiseSchedule s = NoiseSchedule::linear();
  const StepSequence tau = make_subsequence(s, 50, 600);
  for (std::size_t i = 1; i < tau.size(); ++i) EXPECT_EQ(sigma_from_eta(s, tau, i, 0.0), 0.0);
  EXPECT_THROW(sigma_from_eta(s, tau, 0, 1.0), InvalidArgument);
  EXPECT_THROW(sigma_from_eta(s, tau, 50, 1.0), InvalidArgument);
}

TEST(SigmaProperty, BoundedByPreviousNoiseLevel) {
  const NoiseSchedule s = NoiseSchedule::linear();
  NoiseStream rng(3, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int t_stop = static_cast<int>(rng.uniform_int(2, 1000));
    const int n = static_cast<int>(rng.uniform_int(2, std::min(t_stop, 200)));
    const StepSequence tau = make_subsequence(s, n, t_stop);
    const double eta = rng.uniform();
    for (std::size_t i = 1; i < tau.size(); ++i) {
      const double sigma = sigma_from_eta(s, tau, i, eta);
      ASSERT_GE(sigma, 0.0);
      ASSERT_LE(sigma * sigma, 1.0 - s.alpha_bar(tau[i - 1]) + 1e-15);
    }
  }
}

TEST(DdpmSigma, PosteriorAndBetaVariants) {
  const NoiseSchedule s = NoiseSchedule::linear();
  for (int t : {1, 2, 10, 500, 1000}) {
    const double post = s.beta(t) * (1.0 - s.alpha_bar(t - 1)) / (1.0 - s.alpha_bar(t));
    EXPECT_NEAR(ddpm_sigma(s, t), std::sqrt(post), 1e-15);
    EXPECT_NEAR(ddpm_sigma(s, t, DdpmVariance::kBeta), std::sqrt(s.beta(t)), 1e-15);
  }
  EXPECT_EQ(ddpm_sigma(s, 1), 0.0);
}

}  // namespace
}  // namespace ldedit
