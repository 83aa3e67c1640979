// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ldedit/autoencoder.hpp"
#include "ldedit/denoiser.hpp"
#include "ldedit/image.hpp"
#include "ldedit/sampler.hpp"
#include "ldedit/schedule.hpp"

namespace ldedit {

struct SamplerConfig {
  double eta = 0.0;
  int t_stop = 600;
  int n_for = 50;
  int n_rev = 50;
  std::uint64_t seed = 0;
  /// Run the inversion under the unconditional id instead of cond_src.
  bool unconditional_inversion = false;
  /// Adds sigma * xi during inversion (sigma from this eta); 0 keeps the
  /// inversion deterministic.
  double forward_eta = 0.0;

  void validate(const NoiseSchedule& schedule) const;
};

/// One region of a masked edit. `mask` is at latent resolution: a grid
/// latent {h, w, c} uses an h x w mask, a flat state {d} a 1 x d mask.
struct MaskRegion {
  Mask mask;
  ConditionId cond;
  double eta = 0.0;
};

struct MaskSpec {
  std::vector<MaskRegion> regions;
};

/// Downsamples pixel masks to latent resolution with the majority rule.
MaskSpec make_mask_spec(const std::vector<std::pair<Mask, std::pair<ConditionId, double>>>& pixel_regions,
                        std::size_t f);

using EditSource = std::variant<Image, Tensor>;

struct EditRequest {
  EditSource source;
  ConditionId cond_src;
  ConditionId cond_tar;
  SamplerConfig config;
  std::optional<MaskSpec> mask;
  /// Selects the noise stream (config.seed, stream_id).
  std::uint64_t stream_id = 0;
  bool record_trajectories = true;
};

struct EditResult {
  EditSource output;
  Tensor z0;
  Tensor z_tstop;
  Trajectory forward_traj{Direction::kForward};
  /// For masked edits, the blended latent after every step.
  Trajectory reverse_traj{Direction::kReverse};
  /// Masked edits only: the pre-blend state of the source path, then one
  /// per region, after every step.
  std::vector<Trajectory> path_trajs;
  std::map<std::string, double> metrics;
};

/// Encodes images with `ae`; flat tensors pass through unchanged (ae may be
/// null for them).
Tensor to_latent(const EditSource& source, const PatchAutoencoder* ae);
EditSource from_latent(const Tensor& z, const EditSource& like, const PatchAutoencoder* ae);

/// Inversion to t_stop under cond_src, regeneration under cond_tar.
EditResult ldedit(const EditRequest& req, const PatchAutoencoder* ae, const DenoiserModel& denoiser,
                  const NoiseSchedule& schedule);

/// Shared inversion, then one reverse path per region plus a cond_src path
/// for unowned cells. After every reverse step the paths are merged cell by
/// cell and every path continues from the merged latent.
EditResult ldedit_masked(const EditRequest& req, const PatchAutoencoder* ae, const DenoiserModel& denoiser,
                         const NoiseSchedule& schedule);

struct BatchItem {
  std::optional<EditResult> result;
  std::string error;
  bool ok() const noexcept { return result.has_value(); }
};

/// Runs requests on `workers` threads. Request i runs with stream_id = i,
/// so results do not depend on the worker count. Failures are reported per
/// index.
std::vector<BatchItem> batch_edit(const std::vector<EditRequest>& reqs, const PatchAutoencoder* ae,
                                  const DenoiserModel& denoiser, const NoiseSchedule& schedule, std::size_t workers);

/// Region streams derive from (seed, stream_id) and the region index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace ldedit
