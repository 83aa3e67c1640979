// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

// ldedit: corpus generation, model fitting, editing and sweeps.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ldedit/autoencoder.hpp"
#include "ldedit/checkpoint.hpp"
#include "ldedit/config.hpp"
#include "ldedit/corpus.hpp"
#include "ldedit/editor.hpp"
#include "ldedit/error.hpp"
#include "ldedit/eval.hpp"
#include "ldedit/image.hpp"
#include "ldedit/mlp.hpp"
#include "ldedit/sampler.hpp"
#include "ldedit/schedule.hpp"

namespace fs = std::filesystem;
using namespace ldedit;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// ---------------------------------------------------------------------------
// Schemas. Every key can come from --config FILE or from --<key> (underscores
// become dashes); flags win.

const std::vector<ConfigKey> kSamplerKeys = {
    {"eta", "0", "reverse stochasticity"},
    {"t_stop", "600", "inversion depth"},
    {"n_for", "50", "forward steps"},
    {"n_rev", "50", "reverse steps"},
    {"seed", "0", "sampler seed"},
    {"unconditional_inversion", "false", "invert with the unconditional id"},
    {"forward_eta", "0", "stochastic inversion"},
};

const std::vector<ConfigKey> kModelKeys = {
    {"ae", "", "autoencoder checkpoint"},
    {"model", "", "denoiser checkpoint"},
};

std::vector<ConfigKey> join(std::initializer_list<std::vector<ConfigKey>> parts) {
  std::vector<ConfigKey> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

// Binds a schema to a CLI11 subcommand and resolves it after parsing.
class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help, std::vector<ConfigKey> schema)
      : schema_(std::move(schema)) {
    sub_ = app.add_subcommand(name, help);
    sub_->add_option("--config", config_file_, "key=value configuration file");
    for (const auto& k : schema_) {
      std::string desc = k.help;
      if (!k.default_value.empty()) desc += " (default " + k.default_value + ")";
      sub_->add_option(flag_name(k.name), flags_[k.name], desc);
    }
  }

  CLI::App* app() const noexcept { return sub_; }

  Config resolve() const {
    Config cfg(schema_);
    if (!config_file_.empty()) cfg.merge_file(config_file_);
    for (const auto& k : schema_)
      if (sub_->count(flag_name(k.name)) > 0) cfg.set(k.name, flags_.at(k.name));
    return cfg;
  }

 private:
  CLI::App* sub_ = nullptr;
  std::vector<ConfigKey> schema_;
  std::string config_file_;
  std::map<std::string, std::string> flags_;
};

// ---------------------------------------------------------------------------
// Helpers.

const std::string& require(const Config& cfg, const std::string& key) {
  const std::string& v = cfg.get(key);
  if (v.empty()) throw InvalidArgument("missing required setting '" + key + "'");
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

fs::path prepare_dir(const Config& cfg, const std::string& key) {
  const fs::path dir = require(cfg, key);
  fs::create_directories(dir);
  write_text(dir / "config.txt", cfg.resolved());
  return dir;
}

void log_config(const std::string& command, const Config& cfg) {
  std::cout << "# " << command << '\n';
  std::istringstream in(cfg.resolved());
  for (std::string line; std::getline(in, line);) std::cout << "#   " << line << '\n';
}

ConditionId parse_condition(const std::string& text, const ConditionVocabulary& vocab) {
  int id = 0;
  const char* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, id);
  const ConditionId c = (ec == std::errc() && p == end) ? ConditionId{id} : vocab.find(text);
  LDEDIT_REQUIRE(vocab.contains(c), "unknown condition '" + text + "'");
  return c;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size() || item.empty())
      throw InvalidArgument("malformed grid value '" + item + "'");
    out.push_back(v);
  }
  LDEDIT_REQUIRE(!out.empty(), "empty grid");
  return out;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_grid(text)) {
    LDEDIT_REQUIRE(v >= 1 && v == std::floor(v), "hidden widths must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

SamplerConfig sampler_config(const Config& cfg) {
  SamplerConfig s;
  s.eta = cfg.get_double("eta");
  s.t_stop = static_cast<int>(cfg.get_int("t_stop"));
  s.n_for = static_cast<int>(cfg.get_int("n_for"));
  s.n_rev = static_cast<int>(cfg.get_int("n_rev"));
  s.seed = cfg.get_u64("seed");
  s.unconditional_inversion = cfg.get_bool("unconditional_inversion");
  s.forward_eta = cfg.get_double("forward_eta");
  s.validate(NoiseSchedule::linear());
  return s;
}

struct Models {
  PatchAutoencoder ae;
  MlpDenoiser mlp;
};

Models load_models(const Config& cfg) {
  Models m;
  m.ae = autoencoder_from_records(load_checkpoint(require(cfg, "ae")));
  m.mlp = mlp_from_records(load_checkpoint(require(cfg, "model")));
  return m;
}

std::vector<LabeledImage> load_corpus(const fs::path& dir) {
  std::vector<LabeledImage> out;
  for (const auto& e : read_manifest(dir / "manifest.txt")) {
    LabeledImage li{read_pgm(dir / e.filename), ConditionId{e.cond}, {}};
    li.spec.cx = e.cx;
    li.spec.cy = e.cy;
    li.spec.radius = e.radius;
    if (e.cond >= 1 && e.cond <= 6) {
      li.spec.shape = condition_shape(li.cond);
      li.spec.intensity = condition_intensity(li.cond);
    }
    out.push_back(std::move(li));
  }
  if (out.empty()) throw RuntimeError("corpus '" + dir.string() + "' has no images");
  return out;
}

std::string numbered(const std::string& stem, std::size_t i, const std::string& ext, int width = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%0*zu%s", stem.c_str(), width, i, ext.c_str());
  return buf;
}

// Decoded frames of a trajectory, at most `frames` of them including both
// ends.
std::vector<Image> strip_frames(const Trajectory& traj, const PatchAutoencoder& ae, std::size_t frames) {
  std::vector<Image> out;
  const auto& e = traj.entries();
  if (e.empty()) return out;
  const std::size_t n = std::min(frames, e.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = n == 1 ? 0 : k * (e.size() - 1) / (n - 1);
    out.push_back(decode(ae, e[idx].state));
  }
  return out;
}

std::string metrics_line(const std::string& label, const std::map<std::string, double>& metrics) {
  std::ostringstream os;
  os.precision(10);
  os << "sample=" << label;
  for (const auto& [k, v] : metrics) os << ' ' << k << '=' << v;
  return os.str();
}

// Writes per-sample images, a montage with the source first, trajectory
// strips and metrics.txt.
void write_edit_outputs(const fs::path& dir, const Image& source, const std::vector<EditResult>& results,
                        const PatchAutoencoder& ae) {
  std::vector<Image> tiles{source};
  std::vector<Tensor> outs;
  std::string metrics;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const Image& img = std::get<Image>(results[i].output);
    write_pgm(img, dir / numbered("sample", i, ".pgm"));
    tiles.push_back(img);
    outs.push_back(img.tensor());
    std::vector<Image> strip = strip_frames(results[i].forward_traj, ae, 6);
    std::vector<Image> rev = strip_frames(results[i].reverse_traj, ae, 6);
    if (!strip.empty() && !rev.empty()) rev.erase(rev.begin());  // z_tstop appears in both
    strip.insert(strip.end(), rev.begin(), rev.end());
    if (!strip.empty()) write_pgm(montage(strip, strip.size()), dir / numbered("trajectory", i, ".pgm"));
    metrics += metrics_line(std::to_string(i), results[i].metrics) + '\n';
  }
  write_pgm(montage(tiles, std::min<std::size_t>(tiles.size(), 8)), dir / "montage.pgm");
  if (outs.size() >= 2) {
    std::ostringstream os;
    os.precision(10);
    os << "sample=all diversity=" << diversity(outs) << '\n';
    metrics += os.str();
  }
  write_text(dir / "metrics.txt", metrics);
}

std::vector<EditResult> collect(std::vector<BatchItem> items) {
  std::vector<EditResult> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].ok()) throw RuntimeError("edit " + std::to_string(i) + " failed: " + items[i].error);
    out.push_back(std::move(*items[i].result));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_gen_data(const Config& cfg) {
  const fs::path dir = prepare_dir(cfg, "out");
  const auto n = static_cast<std::size_t>(cfg.get_int("n"));
  LDEDIT_REQUIRE(cfg.get_int("n") >= 1, "n must be >= 1");
  const auto corpus = generate_shapes(n, cfg.get_u64("seed"));
  std::vector<ManifestEntry> rows;
  std::size_t per_cond[7] = {};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& li = corpus[i];
    const std::string name = numbered("img", i, ".pgm", 5);
    write_pgm(li.image, dir / name);
    rows.push_back({name, li.cond.value, li.spec.cx, li.spec.cy, li.spec.radius});
    ++per_cond[li.cond.value];
  }
  write_manifest(rows, dir / "manifest.txt");
  const ConditionVocabulary vocab = shapes_vocabulary();
  std::cout << "wrote " << n << " images to " << dir.string() << '\n';
  for (ConditionId c : vocab.ids())
    if (c != kUnconditional) std::cout << "  " << vocab.label(c) << ": " << per_cond[c.value] << '\n';
  return 0;
}

int cmd_fit_ae(const Config& cfg) {
  const auto corpus = load_corpus(require(cfg, "corpus"));
  const fs::path dir = prepare_dir(cfg, "out");
  std::vector<Image> images;
  for (const auto& li : corpus) images.push_back(li.image);
  AutoencoderOptions opt;
  opt.standardize = cfg.get_bool("standardize");
  const PatchAutoencoder ae = fit_autoencoder(images, static_cast<std::size_t>(cfg.get_int("f")),
                                              static_cast<std::size_t>(cfg.get_int("c")), opt);
  save_checkpoint(autoencoder_records(ae), dir / "ae.ckpt");
  autoencoder_from_records(load_checkpoint(dir / "ae.ckpt"));  // reload runs the orthonormality check
  double err = 0.0;
  for (const auto& img : images) err += reconstruction_error(ae, img);
  std::printf("fitted f=%zu c=%zu on %zu images; mean reconstruction MSE %.6g\n", ae.f, ae.c, images.size(),
              err / static_cast<double>(images.size()));
  return 0;
}

int cmd_train(const Config& cfg) {
  const auto corpus = load_corpus(require(cfg, "corpus"));
  const PatchAutoencoder ae = autoencoder_from_records(load_checkpoint(require(cfg, "ae")));
  const fs::path dir = prepare_dir(cfg, "out");
  std::vector<Image> images;
  std::vector<LatentExample> data;
  for (const auto& li : corpus) {
    data.push_back({encode(ae, li.image), li.cond});
    images.push_back(li.image);
  }
  if (ae.trained_on != corpus_fingerprint(images))
    std::cerr << "warning: autoencoder was fitted on a different corpus\n";

  const NoiseSchedule schedule = NoiseSchedule::linear();
  MlpShape shape;
  shape.input_dim = data.front().latent.size();
  shape.hidden_dims = parse_widths(cfg.get("hidden"));
  shape.time_embed_dim = static_cast<std::size_t>(cfg.get_int("time_embed_dim"));
  shape.cond_embed_dim = static_cast<std::size_t>(cfg.get_int("cond_embed_dim"));
  shape.condition_count = shapes_vocabulary().table_size();
  shape.steps = schedule.steps();
  shape.input_skip = cfg.get_bool("input_skip");

  TrainConfig tc;
  tc.epochs = static_cast<int>(cfg.get_int("epochs"));
  tc.batch_size = static_cast<std::size_t>(cfg.get_int("batch_size"));
  tc.learning_rate = cfg.get_double("lr");
  tc.seed = cfg.get_u64("seed");
  const MlpDenoiser init = MlpDenoiser::initialize(shape, tc.seed, true);
  std::printf("training %zu parameters on %zu latents for %d epochs\n", init.parameter_count(), data.size(),
              tc.epochs);
  TrainingReport report;
  const MlpDenoiser model = train_denoiser(data, schedule, tc, init, &report, [](int epoch, double loss) {
    std::printf("epoch %4d  loss %.6f\n", epoch, loss);
    std::fflush(stdout);
  });
  save_checkpoint(mlp_records(model), dir / "model.ckpt");
  std::ostringstream os;
  os.precision(10);
  for (std::size_t e = 0; e < report.epoch_losses.size(); ++e) os << e << ' ' << report.epoch_losses[e] << '\n';
  write_text(dir / "loss.txt", os.str());
  return 0;
}

int cmd_edit(const Config& cfg) {
  const SamplerConfig sc = sampler_config(cfg);
  const Models m = load_models(cfg);
  const ConditionVocabulary vocab = shapes_vocabulary();
  const Image source = read_pgm(require(cfg, "input"));
  EditRequest base;
  base.source = source;
  base.cond_src = parse_condition(require(cfg, "cond_src"), vocab);
  base.cond_tar = parse_condition(require(cfg, "cond_tar"), vocab);
  base.config = sc;
  const auto k = cfg.get_int("samples");
  LDEDIT_REQUIRE(k >= 1, "samples must be >= 1");
  const fs::path dir = prepare_dir(cfg, "out_dir");
  const NoiseSchedule schedule = NoiseSchedule::linear();
  const std::vector<EditRequest> reqs(static_cast<std::size_t>(k), base);
  const auto results =
      collect(batch_edit(reqs, &m.ae, m.mlp, schedule, static_cast<std::size_t>(cfg.get_int("workers"))));
  write_edit_outputs(dir, source, results, m.ae);
  const Classification c = template_classify(std::get<Image>(results.front().output));
  std::printf("%lld edit(s) written to %s; sample 0 reads as %s at (%d, %d)\n", static_cast<long long>(k),
              dir.string().c_str(), shape_name(c.shape), c.cx, c.cy);
  return 0;
}

// "mask.pgm:cond:eta,other.pgm:cond:eta"
std::vector<std::pair<Mask, std::pair<ConditionId, double>>> parse_regions(const std::string& text,
                                                                           const ConditionVocabulary& vocab) {
  std::vector<std::pair<Mask, std::pair<ConditionId, double>>> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto a = item.find(':');
    const auto b = item.rfind(':');
    if (a == std::string::npos || a == b) throw InvalidArgument("malformed region '" + item + "'");
    const ConditionId c = parse_condition(item.substr(a + 1, b - a - 1), vocab);
    const double eta = parse_grid(item.substr(b + 1)).front();
    out.push_back({mask_from_image(read_pgm(item.substr(0, a))), {c, eta}});
  }
  return out;
}

int cmd_edit_masked(const Config& cfg) {
  const SamplerConfig sc = sampler_config(cfg);
  const Models m = load_models(cfg);
  const ConditionVocabulary vocab = shapes_vocabulary();
  const Image source = read_pgm(require(cfg, "input"));
  EditRequest req;
  req.source = source;
  req.cond_src = parse_condition(require(cfg, "cond_src"), vocab);
  req.cond_tar = req.cond_src;
  req.config = sc;
  auto regions = parse_regions(cfg.get("regions"), vocab);
  if (!cfg.get("mask").empty()) {
    const ConditionId tar = parse_condition(require(cfg, "cond_tar"), vocab);
    regions.insert(regions.begin(), {mask_from_image(read_pgm(cfg.get("mask"))), {tar, req.config.eta}});
  }
  LDEDIT_REQUIRE(!regions.empty(), "edit-masked needs --mask or --regions");
  for (const auto& r : regions)
    LDEDIT_REQUIRE(r.first.height == source.height() && r.first.width == source.width(),
                   "mask size does not match the input image");
  req.mask = make_mask_spec(regions, m.ae.f);
  const fs::path dir = prepare_dir(cfg, "out_dir");
  const EditResult r = ldedit_masked(req, &m.ae, m.mlp, NoiseSchedule::linear());
  write_edit_outputs(dir, source, {r}, m.ae);
  std::printf("masked edit over %zu region(s), %g latent cells; written to %s\n", regions.size(),
              r.metrics.at("masked_cells"), dir.string().c_str());
  return 0;
}

int cmd_sweep(const Config& cfg) {
  const SamplerConfig sc = sampler_config(cfg);
  const Models m = load_models(cfg);
  const ConditionVocabulary vocab = shapes_vocabulary();
  const SweepAxis axis = parse_axis(require(cfg, "axis"));
  const std::vector<double> grid = parse_grid(require(cfg, "grid"));
  EditRequest base;
  base.source = read_pgm(require(cfg, "input"));
  base.cond_src = parse_condition(require(cfg, "cond_src"), vocab);
  base.cond_tar = parse_condition(require(cfg, "cond_tar"), vocab);
  base.config = sc;
  SweepOptions opt;
  opt.repetitions = static_cast<std::size_t>(cfg.get_int("samples"));
  opt.workers = static_cast<std::size_t>(cfg.get_int("workers"));
  const Classification src = template_classify(std::get<Image>(base.source));
  const ShapeKind target = condition_shape(base.cond_tar);
  opt.success = [&](const EditRequest&, const EditResult& r) {
    const Classification c = template_classify(std::get<Image>(r.output));
    return c.shape == target && std::hypot(c.cx - src.cx, c.cy - src.cy) <= kMaxCenterDrift;
  };
  const fs::path dir = prepare_dir(cfg, "out_dir");
  const SweepReport report = run_sweep(axis, grid, {base}, &m.ae, m.mlp, NoiseSchedule::linear(), opt);
  const std::string table = format_sweep_table(report);
  write_text(dir / "report.txt", table);
  write_text(dir / "report.csv", format_sweep_dsv(report));
  std::cout << table;
  return 0;
}

int cmd_sample(const Config& cfg) {
  const Models m = load_models(cfg);
  const ConditionId cond = parse_condition(require(cfg, "cond"), shapes_vocabulary());
  const auto n = cfg.get_int("samples");
  LDEDIT_REQUIRE(n >= 1, "samples must be >= 1");
  const NoiseSchedule schedule = NoiseSchedule::linear();
  const StepSequence tau = make_subsequence(schedule, static_cast<int>(cfg.get_int("steps")), schedule.steps());
  const fs::path dir = prepare_dir(cfg, "out_dir");
  const Shape shape = m.ae.latent_shape(kCanvasSize, kCanvasSize);
  std::vector<Image> tiles;
  std::map<std::string, int> counts;
  for (std::int64_t i = 0; i < n; ++i) {
    NoiseStream rng(cfg.get_u64("seed"), static_cast<std::uint64_t>(i));
    Tensor z(shape);
    for (double& v : z.values()) v = rng.gaussian();
    const DiffusionRun run = run_generation(z, tau, schedule, m.mlp, cond, cfg.get_double("eta"), rng, false);
    Image img = decode(m.ae, run.state);
    write_pgm(img, dir / numbered("sample", static_cast<std::size_t>(i), ".pgm"));
    ++counts[shape_name(template_classify(img).shape)];
    tiles.push_back(std::move(img));
  }
  write_pgm(montage(tiles, std::min<std::size_t>(tiles.size(), 8)), dir / "montage.pgm");
  std::printf("%lld sample(s) written to %s;", static_cast<long long>(n), dir.string().c_str());
  for (const auto& [k, v] : counts) std::printf(" %s=%d", k.c_str(), v);
  std::printf("\n");
  return 0;
}

// Aggregates every metrics.txt below the results directory and classifies
// the sample images next to them.
int cmd_eval(const Config& cfg) {
  const fs::path root = require(cfg, "results_dir");
  if (!fs::is_directory(root)) throw RuntimeError("not a directory: " + root.string());
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, int> shapes;
  std::size_t files = 0;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(root)) paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    if (p.filename() == "metrics.txt") {
      ++files;
      const auto bytes = read_file(p);
      std::istringstream in(std::string(bytes.begin(), bytes.end()));
      for (std::string line; std::getline(in, line);) {
        std::istringstream ls(line);
        for (std::string tok; ls >> tok;) {
          const auto eq = tok.find('=');
          if (eq == std::string::npos) throw FormatError(p.string() + ": malformed token '" + tok + "'");
          const std::string key = tok.substr(0, eq);
          if (key == "sample") continue;
          values[key].push_back(std::stod(tok.substr(eq + 1)));
        }
      }
    } else if (p.extension() == ".pgm" && p.filename().string().rfind("sample_", 0) == 0) {
      const Image img = read_pgm(p);
      if (img.height() == kCanvasSize && img.width() == kCanvasSize && img.channels() == 1)
        ++shapes[shape_name(template_classify(img).shape)];
    }
  }
  if (files == 0) throw RuntimeError("no metrics.txt under " + root.string());
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %8s %14s %14s %14s\n", "metric", "count", "mean", "min", "max");
  os << line;
  for (const auto& [k, v] : values) {
    double sum = 0.0;
    for (double x : v) sum += x;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    std::snprintf(line, sizeof line, "%-16s %8zu %14.6g %14.6g %14.6g\n", k.c_str(), v.size(),
                  sum / static_cast<double>(v.size()), *lo, *hi);
    os << line;
  }
  for (const auto& [k, n] : shapes) os << "classified " << k << ": " << n << '\n';
  os << "# metrics files: " << files << '\n';
  write_text(root / "eval.txt", os.str());
  std::cout << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent diffusion editing on a toy shapes domain"};
  app.require_subcommand(1);

  Command gen(app, "gen-data", "generate the shapes corpus",
              {{"n", "6000", "number of images"}, {"seed", "7", "corpus seed"}, {"out", "", "output directory"}});
  Command fit(app, "fit-ae", "fit the patch autoencoder",
              {{"corpus", "", "corpus directory"},
               {"f", "4", "patch size"},
               {"c", "8", "latent channels"},
               {"standardize", "false", "unit-variance latent channels"},
               {"out", "", "output directory"}});
  Command train(app, "train", "train the conditional denoiser",
                {{"corpus", "", "corpus directory"},
                 {"ae", "", "autoencoder checkpoint"},
                 {"epochs", "150", "training epochs"},
                 {"lr", "1e-3", "Adam learning rate"},
                 {"batch_size", "64", "mini-batch size"},
                 {"seed", "0", "initialization and batching seed"},
                 {"hidden", "512,512", "hidden layer widths"},
                 {"time_embed_dim", "64", "time embedding size"},
                 {"cond_embed_dim", "32", "condition embedding size"},
                 {"input_skip", "true", "learned per-dimension skip from z_t"},
                 {"out", "", "output directory"}});
  Command edit(app, "edit", "edit an image towards a target condition",
               join({kModelKeys,
                     {{"input", "", "source PGM"},
                      {"cond_src", "", "source condition (id or label)"},
                      {"cond_tar", "", "target condition (id or label)"},
                      {"samples", "1", "number of edits"},
                      {"workers", "1", "worker threads"},
                      {"out_dir", "", "output directory"}},
                     kSamplerKeys}));
  Command masked(app, "edit-masked", "edit masked regions of an image",
                 join({kModelKeys,
                       {{"input", "", "source PGM"},
                        {"cond_src", "", "condition of the unmasked area"},
                        {"mask", "", "mask PGM for cond_tar (nonzero pixels are edited)"},
                        {"cond_tar", "", "target condition for --mask"},
                        {"regions", "", "extra regions as maskfile:cond:eta,..."},
                        {"out_dir", "", "output directory"}},
                       kSamplerKeys}));
  Command sweep(app, "sweep", "sweep eta, t_stop or the step count",
                join({kModelKeys,
                      {{"axis", "", "eta, t_stop or steps"},
                       {"grid", "", "comma-separated values"},
                       {"input", "", "source PGM"},
                       {"cond_src", "", "source condition"},
                       {"cond_tar", "", "target condition"},
                       {"samples", "16", "seeds per grid value"},
                       {"workers", "1", "worker threads"},
                       {"out_dir", "", "output directory"}},
                      kSamplerKeys}));
  Command sample(app, "sample", "generate images from noise",
                 join({kModelKeys,
                       {{"cond", "", "condition"},
                        {"samples", "16", "number of images"},
                        {"steps", "100", "reverse steps"},
                        {"eta", "0", "reverse stochasticity"},
                        {"seed", "0", "noise seed"},
                        {"out_dir", "", "output directory"}}}));
  Command eval(app, "eval", "summarize metrics under a results directory",
               {{"results_dir", "", "directory to scan"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  const std::vector<std::pair<const Command*, int (*)(const Config&)>> table = {
      {&gen, cmd_gen_data}, {&fit, cmd_fit_ae},     {&train, cmd_train},   {&edit, cmd_edit},
      {&masked, cmd_edit_masked}, {&sweep, cmd_sweep}, {&sample, cmd_sample}, {&eval, cmd_eval}};
  for (const auto& [cmd, run] : table) {
    if (!cmd->app()->parsed()) continue;
    Config cfg({});
    try {
      cfg = cmd->resolve();
      log_config(cmd->app()->get_name(), cfg);
    } catch (const std::exception& e) {
      std::cerr << "ldedit: " << e.what() << '\n';
      return kExitUsage;
    }
    try {
      return run(cfg);
    } catch (const InvalidArgument& e) {
      std::cerr << "ldedit: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "ldedit: " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return kExitUsage;
}
