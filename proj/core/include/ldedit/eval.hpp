// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ldedit/corpus.hpp"
#include "ldedit/editor.hpp"

namespace ldedit {

/// MSE between an identity edit (cond_tar = cond) and the autoencoder
/// reconstruction of the source, or the source itself for flat tensors.
double cycle_consistency(const EditSource& source, ConditionId cond, const SamplerConfig& config,
                         const PatchAutoencoder* ae, const DenoiserModel& denoiser, const NoiseSchedule& schedule);

struct Classification {
  ShapeKind shape = ShapeKind::kDisc;
  int cx = 0;
  int cy = 0;
  int radius = 0;
  double score = 0.0;
};

/// Maximum normalized cross-correlation against binary footprints of every
/// shape, radius in [5, 8] and center keeping the footprint on the canvas.
class TemplateClassifier {
 public:
  TemplateClassifier();
  Classification classify(const Image& image) const;

 private:
  struct Template {
    ShapeKind shape;
    int cx, cy, radius;
    std::vector<std::uint16_t> pixels;
  };
  std::vector<Template> templates_;
};

/// Uses a shared, lazily built classifier.
Classification template_classify(const Image& image);

inline constexpr double kMaxCenterDrift = 2.0;

struct EditScore {
  double success_rate = 0.0;
  double median_drift = 0.0;
};

/// Success: classified as `target` with center within 2 px (Euclidean) of
/// the source spec. `sources[i]` describes the input of `results[i]`.
EditScore score_edits(const std::vector<EditResult>& results, const std::vector<ShapeSpec>& sources,
                      ShapeKind target);
double edit_success_rate(const std::vector<EditResult>& results, const std::vector<ShapeSpec>& sources,
                         ShapeKind target);

/// Mean over dimensions of the across-sample (population) variance.
double diversity(const std::vector<Tensor>& outputs);

enum class SweepAxis { kEta, kTStop, kSteps };
const char* axis_name(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

struct SweepPoint {
  double value = 0.0;
  double displacement = 0.0;  ///< mean ||output - source||
  double diversity = 0.0;     ///< mean over base requests of diversity across seeds
  double cycle_error = 0.0;   ///< mean cycle_consistency at this setting
  double success_rate = 0.0;  ///< NaN without a success predicate
  std::size_t failures = 0;
  std::string first_error;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::kEta;
  std::vector<SweepPoint> points;
  std::size_t seeds = 0;
  std::size_t sources = 0;
};

using SuccessPredicate = std::function<bool(const EditRequest&, const EditResult&)>;

struct SweepOptions {
  std::size_t repetitions = 16;
  std::size_t workers = 1;
  SuccessPredicate success;
};

/// Every base request runs at every grid value with seeds base.seed + r for
/// r < repetitions. Grid must be strictly increasing.
SweepReport run_sweep(SweepAxis axis, const std::vector<double>& grid, const std::vector<EditRequest>& bases,
                      const PatchAutoencoder* ae, const DenoiserModel& denoiser, const NoiseSchedule& schedule,
                      const SweepOptions& options);

std::string format_sweep_table(const SweepReport& report);
std::string format_sweep_dsv(const SweepReport& report, char delimiter = ',');

}  // namespace ldedit
