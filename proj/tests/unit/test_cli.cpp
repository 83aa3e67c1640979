// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the ldedit executable end to end on a small corpus and model.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ldedit/corpus.hpp"
#include "ldedit/image.hpp"

namespace fs = std::filesystem;

namespace ldedit {
namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(LDEDIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "ldedit_cli_test";
    fs::remove_all(root_);
    fs::create_directories(root_);
    ASSERT_EQ(run("gen-data --n 60 --seed 3 --out " + p("corpus")), 0);
    ASSERT_EQ(run("fit-ae --corpus " + p("corpus") + " --out " + p("ae")), 0);
    ASSERT_EQ(run(train_args("model", 2)), 0);
    source_ = (root_ / "corpus" / read_manifest(root_ / "corpus" / "manifest.txt").front().filename).string();
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string p(const std::string& rel) { return (root_ / rel).string(); }
  static std::string train_args(const std::string& out, int epochs) {
    return "train --corpus " + p("corpus") + " --ae " + p("ae/ae.ckpt") + " --hidden 32,32 --batch-size 16 --epochs " +
           std::to_string(epochs) + " --out " + p(out);
  }
  static std::string edit_args(const std::string& out, const std::string& extra) {
    return "edit --ae " + p("ae/ae.ckpt") + " --model " + p("model/model.ckpt") + " --input " + source_ +
           " --cond-src 1 --cond-tar square-low --n-for 10 --n-rev 10 --out-dir " + p(out) + " " + extra;
  }

  static inline fs::path root_;
  static inline std::string source_;
};

TEST_F(Cli, GeneratedCorpusIsDeterministic) {
  ASSERT_EQ(run("gen-data --n 60 --seed 3 --out " + p("corpus2")), 0);
  for (const auto& e : read_manifest(root_ / "corpus" / "manifest.txt"))
    ASSERT_EQ(slurp(root_ / "corpus" / e.filename), slurp(root_ / "corpus2" / e.filename));
  EXPECT_EQ(slurp(root_ / "corpus" / "manifest.txt"), slurp(root_ / "corpus2" / "manifest.txt"));
  EXPECT_EQ(read_manifest(root_ / "corpus" / "manifest.txt").size(), 60u);
}

TEST_F(Cli, TrainingIsReproducible) {
  ASSERT_EQ(run(train_args("model_again", 2)), 0);
  EXPECT_EQ(slurp(root_ / "model" / "model.ckpt"), slurp(root_ / "model_again" / "model.ckpt"));
  ASSERT_EQ(run(train_args("init_a", 0)), 0);
  ASSERT_EQ(run(train_args("init_b", 0)), 0);
  EXPECT_EQ(slurp(root_ / "init_a" / "model.ckpt"), slurp(root_ / "init_b" / "model.ckpt"));
  EXPECT_NE(slurp(root_ / "init_a" / "model.ckpt"), slurp(root_ / "model" / "model.ckpt"));
  EXPECT_TRUE(fs::exists(root_ / "model" / "loss.txt"));
  EXPECT_TRUE(fs::exists(root_ / "model" / "config.txt"));
}

TEST_F(Cli, DeterministicEditsAreIdenticalAcrossSamples) {
  ASSERT_EQ(run(edit_args("edit0", "--samples 3 --eta 0")), 0);
  const std::string first = slurp(root_ / "edit0" / "sample_000.pgm");
  ASSERT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(root_ / "edit0" / "sample_001.pgm"));
  EXPECT_EQ(first, slurp(root_ / "edit0" / "sample_002.pgm"));
  EXPECT_TRUE(fs::exists(root_ / "edit0" / "montage.pgm"));
  EXPECT_TRUE(fs::exists(root_ / "edit0" / "trajectory_000.pgm"));
  const std::string metrics = slurp(root_ / "edit0" / "metrics.txt");
  EXPECT_NE(metrics.find("sample=all diversity=0"), std::string::npos);
  ASSERT_EQ(run(edit_args("edit0b", "--samples 1 --eta 0 --workers 2")), 0);
  EXPECT_EQ(first, slurp(root_ / "edit0b" / "sample_000.pgm"));
}

double diversity_of(const fs::path& metrics) {
  const std::string text = slurp(metrics);
  const auto pos = text.find("sample=all diversity=");
  if (pos == std::string::npos) return -1.0;
  return std::stod(text.substr(pos + 21));
}

TEST_F(Cli, StochasticityRaisesDiversity) {
  ASSERT_EQ(run(edit_args("low", "--samples 4 --eta 0.3 --seed 5")), 0);
  ASSERT_EQ(run(edit_args("high", "--samples 4 --eta 0.6 --seed 5")), 0);
  const double low = diversity_of(root_ / "low" / "metrics.txt");
  const double high = diversity_of(root_ / "high" / "metrics.txt");
  EXPECT_GT(low, 0.0);
  EXPECT_GT(high, low);
  ASSERT_EQ(run(edit_args("high_again", "--samples 4 --eta 0.6 --seed 5 --workers 3")), 0);
  EXPECT_EQ(slurp(root_ / "high" / "sample_003.pgm"), slurp(root_ / "high_again" / "sample_003.pgm"));
}

TEST_F(Cli, ConfigFileIsOverriddenByFlags) {
  const fs::path cfg = root_ / "edit.cfg";
  std::ofstream(cfg) << "eta = 0.9\nseed = 1\n";
  ASSERT_EQ(run(edit_args("cfg", "--config " + cfg.string() + " --eta 0")), 0);
  const std::string resolved = slurp(root_ / "cfg" / "config.txt");
  EXPECT_NE(resolved.find("eta = 0\n"), std::string::npos);
  EXPECT_NE(resolved.find("seed = 1\n"), std::string::npos);
}

TEST_F(Cli, MaskedEditAndSweepAndEval) {
  Image mask(32, 32);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 0; x < 32; ++x) mask.at(y, x) = 1.0;
  write_pgm(mask, root_ / "mask.pgm");
  ASSERT_EQ(run("edit-masked --ae " + p("ae/ae.ckpt") + " --model " + p("model/model.ckpt") + " --input " + source_ +
                " --cond-src 1 --mask " + p("mask.pgm") + " --cond-tar 5 --n-for 10 --n-rev 10 --out-dir " +
                p("masked")),
            0);
  EXPECT_TRUE(fs::exists(root_ / "masked" / "sample_000.pgm"));
  ASSERT_EQ(run("sweep --ae " + p("ae/ae.ckpt") + " --model " + p("model/model.ckpt") + " --input " + source_ +
                " --cond-src 1 --cond-tar 3 --axis eta --grid 0,0.5 --samples 2 --n-for 5 --n-rev 5 --out-dir " +
                p("sweep")),
            0);
  EXPECT_NE(slurp(root_ / "sweep" / "report.csv").find("eta,displacement"), std::string::npos);
  ASSERT_EQ(run("eval --results-dir " + p("masked")), 0);
  EXPECT_TRUE(fs::exists(root_ / "masked" / "eval.txt"));
}

TEST_F(Cli, ErrorsMapToExitCodes) {
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("edit --eta 0.1"), 1);
  EXPECT_EQ(run(edit_args("bad_eta", "--eta -1")), 1);
  EXPECT_EQ(run(edit_args("bad_cond", "--cond-src triangle")), 1);
  EXPECT_EQ(run("fit-ae --corpus " + p("does_not_exist") + " --out " + p("x")), 2);
  EXPECT_EQ(run("edit --ae " + p("corpus/manifest.txt") + " --model " + p("model/model.ckpt") + " --input " + source_ +
                " --cond-src 1 --cond-tar 2 --out-dir " + p("bad_ckpt")),
            2);
}

}  // namespace
}  // namespace ldedit
