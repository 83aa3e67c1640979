// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/editor.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <thread>

#include "ldedit/error.hpp"
#include "ldedit/rng.hpp"

namespace ldedit {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Subsequences {
  StepSequence forward;
  StepSequence reverse;
};

Subsequences subsequences(const SamplerConfig& cfg, const NoiseSchedule& schedule) {
  StepSequence fwd = make_subsequence(schedule, cfg.n_for, cfg.t_stop);
  // Equal counts reuse the same discretization in both directions.
  StepSequence rev = cfg.n_rev == cfg.n_for ? fwd : make_subsequence(schedule, cfg.n_rev, cfg.t_stop);
  return {std::move(fwd), std::move(rev)};
}

DiffusionRun invert(const EditRequest& req, const Tensor& z0, const StepSequence& tau, const DenoiserModel& denoiser,
                    const NoiseSchedule& schedule, NoiseStream& rng) {
  InversionOptions opt;
  opt.record = req.record_trajectories;
  opt.forward_eta = req.config.forward_eta;
  opt.rng = &rng;
  const ConditionId cond = req.config.unconditional_inversion ? kUnconditional : req.cond_src;
  return run_inversion(z0, tau, schedule, denoiser, cond, opt);
}

Tensor reference_output(const EditRequest& req, const PatchAutoencoder* ae) {
  if (const auto* img = std::get_if<Image>(&req.source)) return decode(*ae, encode(*ae, *img)).tensor();
  return std::get<Tensor>(req.source);
}

const Tensor& source_values(const EditSource& s) {
  if (const auto* img = std::get_if<Image>(&s)) return img->tensor();
  return std::get<Tensor>(s);
}

void fill_metrics(EditResult& r, const EditRequest& req, const PatchAutoencoder* ae, const NoiseStream& rng,
                  std::uint64_t extra_draws, Clock::time_point start) {
  const Tensor& out = source_values(r.output);
  r.metrics["displacement"] = std::sqrt(squared_distance(out, source_values(req.source)));
  r.metrics["cycle_error"] = mean_squared_error(out, reference_output(req, ae));
  r.metrics["random_draws"] = static_cast<double>(rng.draw_count() + extra_draws);
  r.metrics["wall_time_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Latent cells: {h, w, c} grids have h*w cells of c values; flat states one
// value per cell.
struct CellLayout {
  std::size_t height = 1;
  std::size_t width = 0;
  std::size_t cell_values = 1;
};

CellLayout cell_layout(const Shape& shape) {
  if (shape.size() == 3) return {shape[0], shape[1], shape[2]};
  LDEDIT_REQUIRE(shape.size() == 1, "masked edit: latent must be a {h, w, c} grid or a flat vector");
  return {1, shape[0], 1};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) { return splitmix64(seed ^ splitmix64(salt)); }

void SamplerConfig::validate(const NoiseSchedule& schedule) const {
  LDEDIT_REQUIRE(std::isfinite(eta) && eta >= 0.0, "sampler config: eta must be >= 0");
  LDEDIT_REQUIRE(std::isfinite(forward_eta) && forward_eta >= 0.0, "sampler config: forward_eta must be >= 0");
  LDEDIT_REQUIRE(t_stop >= 1 && t_stop <= schedule.steps(), "sampler config: t_stop must lie in [1, T]");
  LDEDIT_REQUIRE(n_for >= 1 && n_for <= t_stop, "sampler config: n_for must lie in [1, t_stop]");
  LDEDIT_REQUIRE(n_rev >= 1 && n_rev <= t_stop, "sampler config: n_rev must lie in [1, t_stop]");
}

MaskSpec make_mask_spec(const std::vector<std::pair<Mask, std::pair<ConditionId, double>>>& pixel_regions,
                        std::size_t f) {
  MaskSpec spec;
  for (const auto& [mask, ce] : pixel_regions) spec.regions.push_back({downsample_mask(mask, f), ce.first, ce.second});
  return spec;
}

Tensor to_latent(const EditSource& source, const PatchAutoencoder* ae) {
  if (const auto* img = std::get_if<Image>(&source)) {
    LDEDIT_REQUIRE(ae != nullptr, "edit: image sources need an autoencoder");
    return encode(*ae, *img);
  }
  const Tensor& t = std::get<Tensor>(source);
  LDEDIT_REQUIRE(!t.empty() && t.all_finite(), "edit: source tensor must be non-empty and finite");
  return t;
}

EditSource from_latent(const Tensor& z, const EditSource& like, const PatchAutoencoder* ae) {
  if (std::holds_alternative<Image>(like)) {
    LDEDIT_REQUIRE(ae != nullptr, "edit: image sources need an autoencoder");
    return decode(*ae, z);
  }
  return z;
}

EditResult ldedit(const EditRequest& req, const PatchAutoencoder* ae, const DenoiserModel& denoiser,
                  const NoiseSchedule& schedule) {
  LDEDIT_REQUIRE(!req.mask.has_value(), "ldedit: request carries a mask; use ldedit_masked");
  req.config.validate(schedule);
  const auto start = Clock::now();
  const Subsequences seq = subsequences(req.config, schedule);
  NoiseStream rng(req.config.seed, req.stream_id);

  EditResult r;
  r.z0 = to_latent(req.source, ae);
  DiffusionRun inv = invert(req, r.z0, seq.forward, denoiser, schedule, rng);
  r.z_tstop = inv.state;
  DiffusionRun gen =
      run_generation(inv.state, seq.reverse, schedule, denoiser, req.cond_tar, req.config.eta, rng,
                     req.record_trajectories);
  r.forward_traj = std::move(inv.trajectory);
  r.reverse_traj = std::move(gen.trajectory);
  r.output = from_latent(gen.state, req.source, ae);
  fill_metrics(r, req, ae, rng, 0, start);
  return r;
}

EditResult ldedit_masked(const EditRequest& req, const PatchAutoencoder* ae, const DenoiserModel& denoiser,
                         const NoiseSchedule& schedule) {
  LDEDIT_REQUIRE(req.mask.has_value(), "ldedit_masked: request has no mask");
  req.config.validate(schedule);
  const auto start = Clock::now();
  const Subsequences seq = subsequences(req.config, schedule);
  NoiseStream rng(req.config.seed, req.stream_id);

  EditResult r;
  r.z0 = to_latent(req.source, ae);
  const CellLayout layout = cell_layout(r.z0.shape());
  const std::vector<MaskRegion>& regions = req.mask->regions;
  std::vector<int> owner(layout.height * layout.width, -1);
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const Mask& m = regions[k].mask;
    LDEDIT_REQUIRE(m.height == layout.height && m.width == layout.width,
                   "ldedit_masked: region " + std::to_string(k) + " mask is " + std::to_string(m.height) + "x" +
                       std::to_string(m.width) + ", latent grid is " + std::to_string(layout.height) + "x" +
                       std::to_string(layout.width));
    for (std::size_t cell = 0; cell < owner.size(); ++cell) {
      if (!m.cells[cell]) continue;
      LDEDIT_REQUIRE(owner[cell] < 0, "ldedit_masked: region masks overlap");
      owner[cell] = static_cast<int>(k);
    }
  }

  DiffusionRun inv = invert(req, r.z0, seq.forward, denoiser, schedule, rng);
  r.z_tstop = inv.state;
  r.forward_traj = std::move(inv.trajectory);

  // Path 0 follows cond_src and owns unmasked cells; path k + 1 is region k.
  std::vector<std::unique_ptr<NoiseStream>> streams;
  std::vector<ReverseProcess> paths;
  paths.emplace_back(schedule, seq.reverse, denoiser, req.cond_src, req.config.eta, &rng);
  for (std::size_t k = 0; k < regions.size(); ++k) {
    streams.push_back(std::make_unique<NoiseStream>(derive_seed(req.config.seed, k + 1), req.stream_id));
    paths.emplace_back(schedule, seq.reverse, denoiser, regions[k].cond, regions[k].eta, streams.back().get());
  }
  if (req.record_trajectories) {
    r.reverse_traj.append(seq.reverse.t_stop(), r.z_tstop);
    for (std::size_t p = 0; p < paths.size(); ++p) {
      r.path_trajs.emplace_back(Direction::kReverse);
      r.path_trajs.back().append(seq.reverse.t_stop(), r.z_tstop);
    }
  }

  Tensor z = r.z_tstop;
  std::vector<Tensor> outs(paths.size());
  while (!paths.front().done()) {
    const int t_prev = paths.front().next_timestep();
    for (std::size_t p = 0; p < paths.size(); ++p) outs[p] = paths[p].advance(z);
    for (std::size_t cell = 0; cell < owner.size(); ++cell) {
      const Tensor& from = outs[static_cast<std::size_t>(owner[cell] + 1)];
      for (std::size_t j = 0; j < layout.cell_values; ++j) {
        const std::size_t i = cell * layout.cell_values + j;
        z[i] = from[i];
      }
    }
    if (req.record_trajectories) {
      r.reverse_traj.append(t_prev, z);
      for (std::size_t p = 0; p < paths.size(); ++p) r.path_trajs[p].append(t_prev, outs[p]);
    }
  }
  r.output = from_latent(z, req.source, ae);
  std::uint64_t region_draws = 0;
  for (const auto& s : streams) region_draws += s->draw_count();
  fill_metrics(r, req, ae, rng, region_draws, start);
  r.metrics["masked_cells"] =
      static_cast<double>(std::count_if(owner.begin(), owner.end(), [](int o) { return o >= 0; }));
  return r;
}

std::vector<BatchItem> batch_edit(const std::vector<EditRequest>& reqs, const PatchAutoencoder* ae,
                                  const DenoiserModel& denoiser, const NoiseSchedule& schedule, std::size_t workers) {
  LDEDIT_REQUIRE(!reqs.empty(), "batch_edit: empty request list");
  LDEDIT_REQUIRE(workers >= 1, "batch_edit: workers must be >= 1");
  std::vector<BatchItem> items(reqs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < reqs.size(); i = next++) {
      try {
        EditRequest req = reqs[i];
        req.stream_id = i;
        items[i].result = req.mask ? ldedit_masked(req, ae, denoiser, schedule) : ldedit(req, ae, denoiser, schedule);
      } catch (const std::exception& e) {
        items[i].error = e.what();
      }
    }
  };
  const std::size_t n = std::min(workers, reqs.size());
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
  }
  return items;
}

}  // namespace ldedit
