// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <set>

#include "ldedit/error.hpp"
#include "ldedit/image.hpp"

namespace ldedit {

namespace {

constexpr char kMagic[4] = {'L', 'D', 'E', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string text(std::size_t n) {
    need(n, "record name");
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("checkpoint: truncated ") + what);
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 4;
};

std::vector<std::uint32_t> to_u32_dims(std::initializer_list<std::size_t> dims) {
  std::vector<std::uint32_t> out;
  for (std::size_t d : dims) out.push_back(static_cast<std::uint32_t>(d));
  return out;
}

TensorRecord small_ints(const std::string& name, const std::vector<std::size_t>& values) {
  TensorRecord r{name, {static_cast<std::uint32_t>(values.size())}, {}};
  for (std::size_t v : values) {
    LDEDIT_REQUIRE(v < (1u << 24), "checkpoint: metadata value too large for float32");
    r.values.push_back(static_cast<float>(v));
  }
  return r;
}

std::vector<std::size_t> read_small_ints(const std::vector<TensorRecord>& records, const std::string& name) {
  const TensorRecord& r = find_record(records, name);
  std::vector<std::size_t> out;
  for (float v : r.values) {
    if (v < 0.0f || v != std::floor(v) || v >= static_cast<float>(1u << 24))
      throw FormatError("checkpoint: record '" + name + "' must hold non-negative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// A 64-bit value as four exact 16-bit chunks.
TensorRecord u64_record(const std::string& name, std::uint64_t v) {
  TensorRecord r{name, {4}, {}};
  for (int i = 0; i < 4; ++i) r.values.push_back(static_cast<float>((v >> (16 * i)) & 0xffff));
  return r;
}

std::uint64_t read_u64(const std::vector<TensorRecord>& records, const std::string& name) {
  const auto parts = read_small_ints(records, name);
  if (parts.size() != 4) throw FormatError("checkpoint: record '" + name + "' must hold 4 values");
  std::uint64_t v = 0;
  for (int i = 0; i < 4; ++i) {
    if (parts[i] > 0xffff) throw FormatError("checkpoint: record '" + name + "' chunk out of range");
    v |= static_cast<std::uint64_t>(parts[i]) << (16 * i);
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const std::vector<TensorRecord>& records) {
  std::set<std::string> names;
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    LDEDIT_REQUIRE(!r.name.empty(), "checkpoint: empty record name");
    LDEDIT_REQUIRE(names.insert(r.name).second, "checkpoint: duplicate record name '" + r.name + "'");
    std::size_t count = 1;
    for (std::uint32_t d : r.dims) count *= d;
    LDEDIT_REQUIRE(count == r.values.size(), "checkpoint: record '" + r.name + "' dims do not match its payload");
    for (float v : r.values) LDEDIT_REQUIRE(std::isfinite(v), "checkpoint: record '" + r.name + "' is not finite");
    put_u32(out, static_cast<std::uint32_t>(r.name.size()));
    out.insert(out.end(), r.name.begin(), r.name.end());
    put_u32(out, static_cast<std::uint32_t>(r.dims.size()));
    for (std::uint32_t d : r.dims) put_u32(out, d);
    for (float v : r.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

std::vector<TensorRecord> decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
  ByteReader in(bytes);
  const std::uint32_t count = in.u32("record count");
  std::vector<TensorRecord> records;
  std::set<std::string> names;
  for (std::uint32_t k = 0; k < count; ++k) {
    TensorRecord r;
    const std::uint32_t name_len = in.u32("name length");
    r.name = in.text(name_len);
    if (r.name.empty()) throw FormatError("checkpoint: empty record name");
    if (!names.insert(r.name).second) throw FormatError("checkpoint: duplicate record name '" + r.name + "'");
    const std::uint32_t rank = in.u32("rank");
    in.need(std::size_t{4} * rank, "dims");
    std::uint64_t elems = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      r.dims.push_back(in.u32("dims"));
      elems *= r.dims.back();
      if (elems > in.remaining()) throw FormatError("checkpoint: record '" + r.name + "' exceeds the file size");
    }
    in.need(4 * elems, "payload");
    r.values.reserve(elems);
    for (std::uint64_t i = 0; i < elems; ++i) {
      const float v = std::bit_cast<float>(in.u32("payload"));
      if (!std::isfinite(v)) throw FormatError("checkpoint: record '" + r.name + "' holds a non-finite value");
      r.values.push_back(v);
    }
    records.push_back(std::move(r));
  }
  if (in.remaining() != 0) throw FormatError("checkpoint: trailing bytes after the last record");
  return records;
}

void save_checkpoint(const std::vector<TensorRecord>& records, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(records));
}

std::vector<TensorRecord> load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

const TensorRecord& find_record(const std::vector<TensorRecord>& records, const std::string& name) {
  for (const auto& r : records)
    if (r.name == name) return r;
  throw FormatError("checkpoint: missing record '" + name + "'");
}

void append_double_record(std::vector<TensorRecord>& records, const std::string& name,
                          std::vector<std::uint32_t> dims, const double* data, std::size_t count) {
  TensorRecord hi{name, dims, std::vector<float>(count)};
  TensorRecord lo{name + ".lo", std::move(dims), std::vector<float>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    LDEDIT_REQUIRE(std::isfinite(data[i]), "checkpoint: record '" + name + "' is not finite");
    hi.values[i] = static_cast<float>(data[i]);
    lo.values[i] = static_cast<float>(data[i] - static_cast<double>(hi.values[i]));
  }
  records.push_back(std::move(hi));
  records.push_back(std::move(lo));
}

std::vector<double> read_double_record(const std::vector<TensorRecord>& records, const std::string& name,
                                       std::size_t expected_count) {
  const TensorRecord& hi = find_record(records, name);
  const TensorRecord& lo = find_record(records, name + ".lo");
  if (hi.values.size() != expected_count || lo.values.size() != expected_count)
    throw FormatError("checkpoint: record '" + name + "' has " + std::to_string(hi.values.size()) +
                      " values, expected " + std::to_string(expected_count));
  std::vector<double> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i)
    out[i] = static_cast<double>(hi.values[i]) + static_cast<double>(lo.values[i]);
  return out;
}

std::vector<TensorRecord> autoencoder_records(const PatchAutoencoder& ae) {
  ae.validate();
  std::vector<TensorRecord> r;
  r.push_back(small_ints("ae.shape", {ae.f, ae.c, ae.channels}));
  // Eigen is column-major; store the basis row-major as the container requires.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> basis = ae.basis;
  append_double_record(r, "ae.basis", to_u32_dims({ae.c, ae.patch_dim()}), basis.data(),
                       static_cast<std::size_t>(basis.size()));
  append_double_record(r, "ae.mean", to_u32_dims({ae.patch_dim()}), ae.mean.data(), ae.patch_dim());
  append_double_record(r, "ae.scale", to_u32_dims({ae.c}), ae.latent_scale.data(), ae.c);
  r.push_back(u64_record("ae.fingerprint", ae.trained_on));
  return r;
}

PatchAutoencoder autoencoder_from_records(const std::vector<TensorRecord>& records) {
  const auto shape = read_small_ints(records, "ae.shape");
  if (shape.size() != 3) throw FormatError("checkpoint: 'ae.shape' must hold f, c, channels");
  PatchAutoencoder ae;
  ae.f = shape[0];
  ae.c = shape[1];
  ae.channels = shape[2];
  if (ae.f == 0 || ae.c == 0 || (ae.channels != 1 && ae.channels != 3) || ae.c > ae.patch_dim())
    throw FormatError("checkpoint: invalid autoencoder shape");
  const auto p = static_cast<Eigen::Index>(ae.patch_dim());
  const auto c = static_cast<Eigen::Index>(ae.c);
  const auto basis = read_double_record(records, "ae.basis", ae.c * ae.patch_dim());
  ae.basis = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(basis.data(), c, p);
  const auto mean = read_double_record(records, "ae.mean", ae.patch_dim());
  ae.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), p);
  const auto scale = read_double_record(records, "ae.scale", ae.c);
  ae.latent_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), c);
  ae.trained_on = read_u64(records, "ae.fingerprint");
  try {
    ae.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return ae;
}

std::vector<TensorRecord> mlp_records(const MlpDenoiser& model) {
  const MlpShape& s = model.shape();
  std::vector<std::size_t> meta{s.input_dim, s.time_embed_dim, s.cond_embed_dim,
                                static_cast<std::size_t>(s.condition_count), static_cast<std::size_t>(s.steps),
                                s.input_skip ? 1u : 0u, s.hidden_dims.size()};
  meta.insert(meta.end(), s.hidden_dims.begin(), s.hidden_dims.end());
  std::vector<TensorRecord> r;
  r.push_back(small_ints("mlp.shape", meta));
  const std::vector<double> params = model.flatten();
  append_double_record(r, "mlp.params", to_u32_dims({params.size()}), params.data(), params.size());
  return r;
}

MlpDenoiser mlp_from_records(const std::vector<TensorRecord>& records) {
  const auto meta = read_small_ints(records, "mlp.shape");
  if (meta.size() < 7 || meta.size() != 7 + meta[6] || meta[5] > 1)
    throw FormatError("checkpoint: malformed 'mlp.shape'");
  MlpShape s;
  s.input_dim = meta[0];
  s.time_embed_dim = meta[1];
  s.cond_embed_dim = meta[2];
  s.condition_count = static_cast<int>(meta[3]);
  s.steps = static_cast<int>(meta[4]);
  s.input_skip = meta[5] == 1;
  s.hidden_dims.assign(meta.begin() + 7, meta.end());
  MlpDenoiser model;
  try {
    model = MlpDenoiser::zeros(s);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  const auto params = read_double_record(records, "mlp.params", model.parameter_count());
  model.assign(params);
  return model;
}

}  // namespace ldedit
