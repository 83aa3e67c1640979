// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/eval.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ldedit/error.hpp"
#include "ldedit/mixture.hpp"

namespace ldedit {
namespace {

TEST(Classifier, RecoversCorpusShapes) {
  const auto corpus = generate_shapes(300, 21);
  int exact = 0;
  for (const auto& li : corpus) {
    const Classification c = template_classify(li.image);
    ASSERT_EQ(c.shape, li.spec.shape);
    ASSERT_LE(std::hypot(c.cx - li.spec.cx, c.cy - li.spec.cy), 1.0);
    exact += c.cx == li.spec.cx && c.cy == li.spec.cy && c.radius == li.spec.radius ? 1 : 0;
  }
  EXPECT_GE(exact, 290);
}

TEST(Classifier, NoiselessRenderIsExact) {
  for (ShapeKind k : {ShapeKind::kDisc, ShapeKind::kSquare, ShapeKind::kCross}) {
    const ShapeSpec spec{k, Intensity::kHigh, 13, 19, 7};
    const Classification c = template_classify(render_shape(spec));
    EXPECT_EQ(c.shape, k);
    EXPECT_EQ(c.cx, 13);
    EXPECT_EQ(c.cy, 19);
    EXPECT_EQ(c.radius, 7);
    EXPECT_NEAR(c.score, 1.0, 1e-9);
  }
  EXPECT_THROW(template_classify(Image(16, 16)), InvalidArgument);
}

EditResult image_result(const Image& img) {
  EditResult r;
  r.output = img;
  return r;
}

TEST(ScoreEdits, SuccessNeedsShapeAndPosition) {
  const ShapeSpec src{ShapeKind::kDisc, Intensity::kLow, 16, 16, 6};
  std::vector<EditResult> results{
      image_result(render_shape({ShapeKind::kSquare, Intensity::kLow, 16, 16, 6})),
      image_result(render_shape({ShapeKind::kSquare, Intensity::kLow, 17, 17, 6})),
      image_result(render_shape({ShapeKind::kSquare, Intensity::kLow, 19, 16, 6})),
      image_result(render_shape({ShapeKind::kCross, Intensity::kLow, 16, 16, 6})),
  };
  const EditScore score = score_edits(results, std::vector<ShapeSpec>(4, src), ShapeKind::kSquare);
  EXPECT_DOUBLE_EQ(score.success_rate, 0.5);
  EXPECT_NEAR(score.median_drift, 0.5 * std::sqrt(2.0), 1e-12);
  EXPECT_THROW(score_edits(results, {src}, ShapeKind::kSquare), InvalidArgument);
  EXPECT_THROW(score_edits({EditResult{}}, {src}, ShapeKind::kSquare), InvalidArgument);
}

TEST(Diversity, VarianceAveragedOverDimensions) {
  EXPECT_EQ(diversity({Tensor::vector({1.0, 2.0}), Tensor::vector({1.0, 2.0})}), 0.0);
  // Dimension 0 has variance 1, dimension 1 variance 0.
  EXPECT_DOUBLE_EQ(diversity({Tensor::vector({0.0, 5.0}), Tensor::vector({2.0, 5.0})}), 0.5);
  EXPECT_THROW(diversity({Tensor::vector({1.0})}), InvalidArgument);
  EXPECT_THROW(diversity({Tensor::vector({1.0}), Tensor::vector({1.0, 2.0})}), InvalidArgument);
}

TEST(CycleConsistency, ZeroForExactlyInvertibleDenoiser) {
  const NoiseSchedule s = NoiseSchedule::linear();
  testing::ConstantDenoiser den(Tensor::vector({0.3, 0.1}));
  EXPECT_LT(cycle_consistency(Tensor::vector({1.0, -1.0}), ConditionId{0}, SamplerConfig{}, nullptr, den, s), 1e-20);
}

TEST(CycleConsistency, ShrinksWithMoreSteps) {
  const NoiseSchedule s = NoiseSchedule::linear();
  AnalyticDenoiser den(testing::two_blob_family(), s);
  const Tensor z = Tensor::vector({-2.6, -1.3});
  SamplerConfig coarse;
  coarse.n_for = coarse.n_rev = 10;
  SamplerConfig fine;
  fine.n_for = fine.n_rev = 200;
  const double c = cycle_consistency(z, testing::kBoth, coarse, nullptr, den, s);
  const double f = cycle_consistency(z, testing::kBoth, fine, nullptr, den, s);
  EXPECT_LT(f, c);
  EXPECT_LT(f, 1e-3);
}

TEST(Sweep, EtaControlsDiversity) {
  const NoiseSchedule s = NoiseSchedule::linear();
  const auto fam = testing::two_blob_family();
  AnalyticDenoiser den(fam, s);
  EditRequest base;
  base.source = Tensor::vector({-2.8, -1.3});
  base.cond_src = testing::kBlobA;
  base.cond_tar = testing::kBlobA;
  SweepOptions opt;
  opt.repetitions = 16;
  opt.workers = 2;
  opt.success = [&](const EditRequest&, const EditResult& r) {
    return nearest_component(fam.base(), std::get<Tensor>(r.output)) == 0;
  };
  const SweepReport rep = run_sweep(SweepAxis::kEta, {0.0, 0.5, 1.0}, {base}, nullptr, den, s, opt);
  ASSERT_EQ(rep.points.size(), 3u);
  EXPECT_EQ(rep.points[0].diversity, 0.0);
  EXPECT_GT(rep.points[1].diversity, 0.0);
  EXPECT_GT(rep.points[2].diversity, rep.points[1].diversity);
  EXPECT_EQ(rep.points[0].success_rate, 1.0);
  for (const auto& p : rep.points) {
    EXPECT_EQ(p.failures, 0u);
    EXPECT_TRUE(std::isfinite(p.cycle_error));
    EXPECT_GT(p.displacement, 0.0);
  }
  const std::string table = format_sweep_table(rep);
  EXPECT_EQ(table.rfind("       eta", 0), 0u);
  EXPECT_NE(table.find("# seeds=16 sources=1"), std::string::npos);
  const std::string csv = format_sweep_dsv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "eta,displacement,diversity,cycle_error,success_rate,failures,seeds");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Sweep, FailuresAreCountedNotFatal) {
  const NoiseSchedule s = NoiseSchedule::linear();
  testing::ConstantDenoiser den(Tensor(Shape{1}));
  EditRequest base;
  base.source = Tensor::vector({1.0});
  base.config.n_for = base.config.n_rev = 30;
  SweepOptions opt;
  opt.repetitions = 2;
  const SweepReport rep = run_sweep(SweepAxis::kTStop, {20.0, 100.0}, {base}, nullptr, den, s, opt);
  EXPECT_EQ(rep.points[0].failures, 3u);
  EXPECT_NE(rep.points[0].first_error.find("n_for"), std::string::npos);
  EXPECT_TRUE(std::isnan(rep.points[0].displacement));
  EXPECT_EQ(rep.points[1].failures, 0u);
  EXPECT_TRUE(std::isnan(rep.points[1].success_rate));
  EXPECT_THROW(run_sweep(SweepAxis::kEta, {0.5, 0.1}, {base}, nullptr, den, s, opt), InvalidArgument);
  EXPECT_THROW(run_sweep(SweepAxis::kSteps, {2.5}, {base}, nullptr, den, s, opt), InvalidArgument);
  EXPECT_THROW(run_sweep(SweepAxis::kEta, {}, {base}, nullptr, den, s, opt), InvalidArgument);
}

TEST(SweepAxisNames, RoundTrip) {
  for (SweepAxis a : {SweepAxis::kEta, SweepAxis::kTStop, SweepAxis::kSteps}) EXPECT_EQ(parse_axis(axis_name(a)), a);
  EXPECT_THROW(parse_axis("gamma"), InvalidArgument);
}

}  // namespace
}  // namespace ldedit
