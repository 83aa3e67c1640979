// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ldedit/error.hpp"

namespace ldedit {
namespace {

Config make() { return Config({{"eta", "0", "noise"}, {"seed", "7", "rng"}, {"skip", "true", ""}, {"out", "", ""}}); }

TEST(Config, DefaultsAndTypedGetters) {
  const Config c = make();
  EXPECT_EQ(c.get_double("eta"), 0.0);
  EXPECT_EQ(c.get_int("seed"), 7);
  EXPECT_EQ(c.get_u64("seed"), 7u);
  EXPECT_TRUE(c.get_bool("skip"));
  EXPECT_EQ(c.get("out"), "");
  EXPECT_THROW(c.get("missing"), InvalidArgument);
}

TEST(Config, TextMergeWithCommentsAndWhitespace) {
  Config c = make();
  c.merge_text("# header\n  eta = 0.25   # trailing\n\nseed=11\r\nskip = off\n");
  EXPECT_EQ(c.get_double("eta"), 0.25);
  EXPECT_EQ(c.get_int("seed"), 11);
  EXPECT_FALSE(c.get_bool("skip"));
  EXPECT_THROW(c.merge_text("eta 0.1"), InvalidArgument);
  EXPECT_THROW(c.merge_text("gamma = 1"), InvalidArgument);
}

TEST(Config, LaterSourcesWin) {
  const auto path = std::filesystem::temp_directory_path() / "ldedit_cfg_test.txt";
  std::ofstream(path) << "eta = 0.5\nseed = 3\n";
  Config c = make();
  c.merge_file(path);
  c.set("seed", "4");
  EXPECT_EQ(c.get_double("eta"), 0.5);
  EXPECT_EQ(c.get_int("seed"), 4);
  std::filesystem::remove(path);
  EXPECT_THROW(c.merge_file(path), InvalidArgument);
  EXPECT_THROW(c.set("nope", "1"), InvalidArgument);
}

TEST(Config, RejectsMalformedValues) {
  Config c = make();
  c.set("eta", "0.3x");
  EXPECT_THROW(c.get_double("eta"), InvalidArgument);
  c.set("eta", "inf");
  EXPECT_THROW(c.get_double("eta"), InvalidArgument);
  c.set("seed", "-1");
  EXPECT_THROW(c.get_u64("seed"), InvalidArgument);
  c.set("seed", "");
  EXPECT_THROW(c.get_int("seed"), InvalidArgument);
  c.set("skip", "maybe");
  EXPECT_THROW(c.get_bool("skip"), InvalidArgument);
  EXPECT_THROW(Config({{"a", "", ""}, {"a", "", ""}}), InvalidArgument);
}

TEST(Config, ResolvedListsEveryKeyInSchemaOrder) {
  Config c = make();
  c.set("out", "runs/a");
  EXPECT_EQ(c.resolved(), "eta = 0\nseed = 7\nskip = true\nout = runs/a\n");
  Config again = make();
  again.merge_text(c.resolved());
  EXPECT_EQ(again.resolved(), c.resolved());
}

}  // namespace
}  // namespace ldedit
