// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ldedit/autoencoder.hpp"
#include "ldedit/mlp.hpp"

namespace ldedit {

/// One named float32 array of the container.
struct TensorRecord {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  friend bool operator==(const TensorRecord&, const TensorRecord&) = default;
};

/// Container layout, all integers little-endian:
///   "LDE1" | u32 count | count x (u32 name_len | name | u32 rank | rank x u32 dim | f32 payload)
std::vector<std::uint8_t> encode_checkpoint(const std::vector<TensorRecord>& records);
/// Validates magic, sizes, unique names and finiteness; throws FormatError.
std::vector<TensorRecord> decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::vector<TensorRecord>& records, const std::filesystem::path& path);
std::vector<TensorRecord> load_checkpoint(const std::filesystem::path& path);

const TensorRecord& find_record(const std::vector<TensorRecord>& records, const std::string& name);

/// Stores doubles as a float32 pair (name, name + ".lo") whose sum recovers
/// the value to about 1e-14 relative.
void append_double_record(std::vector<TensorRecord>& records, const std::string& name,
                          std::vector<std::uint32_t> dims, const double* data, std::size_t count);
std::vector<double> read_double_record(const std::vector<TensorRecord>& records, const std::string& name,
                                       std::size_t expected_count);

std::vector<TensorRecord> autoencoder_records(const PatchAutoencoder& ae);
PatchAutoencoder autoencoder_from_records(const std::vector<TensorRecord>& records);

std::vector<TensorRecord> mlp_records(const MlpDenoiser& model);
MlpDenoiser mlp_from_records(const std::vector<TensorRecord>& records);

}  // namespace ldedit
