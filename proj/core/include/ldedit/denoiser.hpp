// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "ldedit/tensor.hpp"

namespace ldedit {

/// Discrete stand-in for a text prompt. Id 0 is reserved for "unconditional".
struct ConditionId {
  int value = 0;
  friend auto operator<=>(const ConditionId&, const ConditionId&) = default;
};

inline constexpr ConditionId kUnconditional{0};

/// Id <-> label table. Always contains id 0 ("unconditional").
class ConditionVocabulary {
 public:
  ConditionVocabulary();

  void add(ConditionId id, std::string label);
  bool contains(ConditionId id) const { return labels_.count(id.value) != 0; }
  const std::string& label(ConditionId id) const;
  /// Throws InvalidArgument for unknown labels.
  ConditionId find(const std::string& label) const;
  std::vector<ConditionId> ids() const;
  std::size_t size() const noexcept { return labels_.size(); }
  /// One past the largest id; the size an embedding table must have.
  int table_size() const noexcept { return labels_.rbegin()->first + 1; }

 private:
  std::map<int, std::string> labels_;
};

/// Noise predictor eps_theta(z_t, t, y). Implementations are evaluated
/// read-only and must be safe to call concurrently.
class DenoiserModel {
 public:
  virtual ~DenoiserModel() = default;

  /// Predicted noise with the same shape as z. t is in [0, T].
  virtual Tensor predict_eps(const Tensor& z, int t, ConditionId cond) const = 0;
};

}  // namespace ldedit
