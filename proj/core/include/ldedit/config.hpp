// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ldedit {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Flat key=value settings over a fixed set of known keys. Text input is
/// line-oriented; '#' starts a comment; later assignments win. Unknown keys
/// and malformed lines raise InvalidArgument.
class Config {
 public:
  explicit Config(std::vector<ConfigKey> schema);

  void merge_text(const std::string& text, const std::string& origin = "<text>");
  void merge_file(const std::filesystem::path& path);
  void set(const std::string& key, std::string value);

  bool known(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Every key with its effective value, one "key = value" line each, in
  /// schema order.
  std::string resolved() const;
  const std::vector<ConfigKey>& schema() const noexcept { return schema_; }

 private:
  std::vector<ConfigKey> schema_;
  std::map<std::string, std::string> values_;
};

}  // namespace ldedit
