// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ldedit/error.hpp"

namespace ldedit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw InvalidArgument("config: '" + key + "' expects a number, got '" + text + "'");
  return value;
}

}  // namespace

Config::Config(std::vector<ConfigKey> schema) : schema_(std::move(schema)) {
  for (const auto& k : schema_) {
    LDEDIT_REQUIRE(values_.emplace(k.name, k.default_value).second, "config: duplicate schema key " + k.name);
  }
}

void Config::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (!known(key)) throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    values_[key] = trim(line.substr(eq + 1));
  }
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path.string());
}

void Config::set(const std::string& key, std::string value) {
  if (!known(key)) throw InvalidArgument("config: unknown key '" + key + "'");
  values_[key] = std::move(value);
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument("config: unknown key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const double v = parse_number<double>(key, get(key));
  if (!std::isfinite(v)) throw InvalidArgument("config: '" + key + "' must be finite");
  return v;
}

std::int64_t Config::get_int(const std::string& key) const { return parse_number<std::int64_t>(key, get(key)); }

std::uint64_t Config::get_u64(const std::string& key) const { return parse_number<std::uint64_t>(key, get(key)); }

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string Config::resolved() const {
  std::ostringstream os;
  for (const auto& k : schema_) os << k.name << " = " << values_.at(k.name) << '\n';
  return os.str();
}

}  // namespace ldedit
