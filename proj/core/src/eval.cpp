// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ldedit/error.hpp"

namespace ldedit {

double cycle_consistency(const EditSource& source, ConditionId cond, const SamplerConfig& config,
                         const PatchAutoencoder* ae, const DenoiserModel& denoiser, const NoiseSchedule& schedule) {
  EditRequest req;
  req.source = source;
  req.cond_src = cond;
  req.cond_tar = cond;
  req.config = config;
  req.record_trajectories = false;
  return ldedit(req, ae, denoiser, schedule).metrics.at("cycle_error");
}

TemplateClassifier::TemplateClassifier() {
  const int size = static_cast<int>(kCanvasSize);
  for (ShapeKind shape : {ShapeKind::kDisc, ShapeKind::kSquare, ShapeKind::kCross})
    for (int r = kRadiusMin; r <= kRadiusMax; ++r)
      for (int cy = r; cy <= size - 1 - r; ++cy)
        for (int cx = r; cx <= size - 1 - r; ++cx) {
          const Mask m = render_footprint(shape, cx, cy, r);
          Template t{shape, cx, cy, r, {}};
          for (std::size_t i = 0; i < m.cells.size(); ++i)
            if (m.cells[i]) t.pixels.push_back(static_cast<std::uint16_t>(i));
          templates_.push_back(std::move(t));
        }
}

Classification TemplateClassifier::classify(const Image& image) const {
  LDEDIT_REQUIRE(image.height() == kCanvasSize && image.width() == kCanvasSize && image.channels() == 1,
                 "template_classify: expected a 32x32 grayscale image");
  const auto& v = image.tensor();
  const double n_total = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v.values()) mean += x;
  mean /= n_total;
  double energy = 0.0;
  for (double x : v.values()) energy += (x - mean) * (x - mean);

  Classification best;
  best.score = -std::numeric_limits<double>::infinity();
  for (const Template& t : templates_) {
    double sum = 0.0;
    for (std::uint16_t p : t.pixels) sum += v[p];
    const double n = static_cast<double>(t.pixels.size());
    const double den = std::sqrt(energy * n * (1.0 - n / n_total));
    const double score = den > 0.0 ? (sum - n * mean) / den : 0.0;
    if (score > best.score) best = {t.shape, t.cx, t.cy, t.radius, score};
  }
  return best;
}

Classification template_classify(const Image& image) {
  static const TemplateClassifier classifier;
  return classifier.classify(image);
}

EditScore score_edits(const std::vector<EditResult>& results, const std::vector<ShapeSpec>& sources,
                      ShapeKind target) {
  LDEDIT_REQUIRE(!results.empty(), "edit_success_rate: empty result list");
  LDEDIT_REQUIRE(results.size() == sources.size(), "edit_success_rate: one source spec per result required");
  std::size_t ok = 0;
  std::vector<double> drifts;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto* img = std::get_if<Image>(&results[i].output);
    LDEDIT_REQUIRE(img != nullptr, "edit_success_rate: results must be images");
    const Classification c = template_classify(*img);
    const double drift = std::hypot(c.cx - sources[i].cx, c.cy - sources[i].cy);
    drifts.push_back(drift);
    if (c.shape == target && drift <= kMaxCenterDrift) ++ok;
  }
  std::sort(drifts.begin(), drifts.end());
  const std::size_t m = drifts.size();
  const double median = m % 2 == 1 ? drifts[m / 2] : 0.5 * (drifts[m / 2 - 1] + drifts[m / 2]);
  return {static_cast<double>(ok) / static_cast<double>(m), median};
}

double edit_success_rate(const std::vector<EditResult>& results, const std::vector<ShapeSpec>& sources,
                         ShapeKind target) {
  return score_edits(results, sources, target).success_rate;
}

double diversity(const std::vector<Tensor>& outputs) {
  LDEDIT_REQUIRE(outputs.size() >= 2, "diversity: need at least 2 samples");
  const Tensor& first = outputs.front();
  for (const auto& o : outputs) require_same_shape(first, o, "diversity");
  // Population variance from pairwise differences: exactly 0 for identical
  // outputs, which a mean-subtracted sum does not guarantee.
  const double n = static_cast<double>(outputs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    for (std::size_t j = i + 1; j < outputs.size(); ++j) total += squared_distance(outputs[i], outputs[j]);
  return total / (n * n) / static_cast<double>(first.size());
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kEta:
      return "eta";
    case SweepAxis::kTStop:
      return "t_stop";
    case SweepAxis::kSteps:
      return "steps";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::kEta, SweepAxis::kTStop, SweepAxis::kSteps})
    if (name == axis_name(a)) return a;
  throw InvalidArgument("unknown sweep axis '" + name + "' (expected eta, t_stop or steps)");
}

namespace {

SamplerConfig at_grid_value(SamplerConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kEta:
      cfg.eta = value;
      break;
    case SweepAxis::kTStop:
      LDEDIT_REQUIRE(value == std::floor(value), "sweep: t_stop grid values must be integers");
      cfg.t_stop = static_cast<int>(value);
      break;
    case SweepAxis::kSteps:
      LDEDIT_REQUIRE(value == std::floor(value), "sweep: steps grid values must be integers");
      cfg.n_for = cfg.n_rev = static_cast<int>(value);
      break;
  }
  return cfg;
}

const Tensor& values_of(const EditSource& s) {
  if (const auto* img = std::get_if<Image>(&s)) return img->tensor();
  return std::get<Tensor>(s);
}

}  // namespace

SweepReport run_sweep(SweepAxis axis, const std::vector<double>& grid, const std::vector<EditRequest>& bases,
                      const PatchAutoencoder* ae, const DenoiserModel& denoiser, const NoiseSchedule& schedule,
                      const SweepOptions& options) {
  LDEDIT_REQUIRE(!grid.empty(), "run_sweep: empty grid");
  LDEDIT_REQUIRE(!bases.empty(), "run_sweep: no base requests");
  LDEDIT_REQUIRE(options.repetitions >= 1, "run_sweep: repetitions must be >= 1");
  for (std::size_t i = 1; i < grid.size(); ++i)
    LDEDIT_REQUIRE(grid[i] > grid[i - 1], "run_sweep: grid must be strictly increasing");

  const std::size_t reps = options.repetitions;
  std::vector<EditRequest> reqs;
  for (double value : grid)
    for (const auto& base : bases)
      for (std::size_t r = 0; r < reps; ++r) {
        EditRequest q = base;
        q.config = at_grid_value(base.config, axis, value);
        q.config.seed = base.config.seed + r;
        q.record_trajectories = false;
        reqs.push_back(std::move(q));
      }
  // Identity edits for the cycle-error column, one per (grid value, base).
  std::vector<EditRequest> cycles;
  for (double value : grid)
    for (const auto& base : bases) {
      EditRequest q = base;
      q.mask.reset();
      q.cond_tar = q.cond_src;
      q.config = at_grid_value(base.config, axis, value);
      q.record_trajectories = false;
      cycles.push_back(std::move(q));
    }
  const std::vector<BatchItem> runs = batch_edit(reqs, ae, denoiser, schedule, options.workers);
  const std::vector<BatchItem> cycle_runs = batch_edit(cycles, ae, denoiser, schedule, options.workers);

  SweepReport report;
  report.axis = axis;
  report.seeds = reps;
  report.sources = bases.size();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepPoint pt;
    pt.value = grid[g];
    double disp = 0.0;
    double div = 0.0;
    double cyc = 0.0;
    std::size_t ok = 0;
    std::size_t completed = 0;
    std::size_t div_groups = 0;
    std::size_t cyc_count = 0;
    for (std::size_t b = 0; b < bases.size(); ++b) {
      std::vector<Tensor> outs;
      for (std::size_t r = 0; r < reps; ++r) {
        const std::size_t idx = (g * bases.size() + b) * reps + r;
        const BatchItem& item = runs[idx];
        if (!item.ok()) {
          if (pt.failures++ == 0) pt.first_error = item.error;
          continue;
        }
        ++completed;
        disp += item.result->metrics.at("displacement");
        outs.push_back(values_of(item.result->output));
        if (options.success && options.success(reqs[idx], *item.result)) ++ok;
      }
      if (outs.size() >= 2) {
        div += diversity(outs);
        ++div_groups;
      }
      const BatchItem& c = cycle_runs[g * bases.size() + b];
      if (c.ok()) {
        cyc += c.result->metrics.at("cycle_error");
        ++cyc_count;
      } else if (pt.failures++ == 0) {
        pt.first_error = c.error;
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    pt.displacement = completed ? disp / static_cast<double>(completed) : nan;
    pt.diversity = div_groups ? div / static_cast<double>(div_groups) : (reps == 1 ? 0.0 : nan);
    pt.cycle_error = cyc_count ? cyc / static_cast<double>(cyc_count) : nan;
    pt.success_rate = options.success && completed ? static_cast<double>(ok) / static_cast<double>(completed) : nan;
    report.points.push_back(std::move(pt));
  }
  return report;
}

std::string format_sweep_table(const SweepReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%10s %14s %14s %14s %10s %8s\n", axis_name(report.axis), "displacement",
                "diversity", "cycle_error", "success", "failed");
  os << line;
  for (const auto& p : report.points) {
    std::snprintf(line, sizeof line, "%10.4g %14.6g %14.6g %14.6g %10.4f %8zu\n", p.value, p.displacement,
                  p.diversity, p.cycle_error, p.success_rate, p.failures);
    os << line;
  }
  os << "# seeds=" << report.seeds << " sources=" << report.sources << '\n';
  return os.str();
}

std::string format_sweep_dsv(const SweepReport& report, char delimiter) {
  std::ostringstream os;
  os.precision(17);
  const char d = delimiter;
  os << axis_name(report.axis) << d << "displacement" << d << "diversity" << d << "cycle_error" << d << "success_rate"
     << d << "failures" << d << "seeds" << '\n';
  for (const auto& p : report.points)
    os << p.value << d << p.displacement << d << p.diversity << d << p.cycle_error << d << p.success_rate << d
       << p.failures << d << report.seeds << '\n';
  return os.str();
}

}  // namespace ldedit
