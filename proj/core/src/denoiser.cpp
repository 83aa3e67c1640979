// Copyright (C) 2026 The ldedit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldedit/denoiser.hpp"

#include "ldedit/error.hpp"

namespace ldedit {

ConditionVocabulary::ConditionVocabulary() { labels_.emplace(0, "unconditional"); }

void ConditionVocabulary::add(ConditionId id, std::string label) {
  LDEDIT_REQUIRE(id.value > 0, "condition vocabulary: id 0 is reserved for 'unconditional'");
  LDEDIT_REQUIRE(!contains(id), "condition vocabulary: duplicate id " + std::to_string(id.value));
  for (const auto& [k, l] : labels_) LDEDIT_REQUIRE(l != label, "condition vocabulary: duplicate label " + label);
  labels_.emplace(id.value, std::move(label));
}

const std::string& ConditionVocabulary::label(ConditionId id) const {
  auto it = labels_.find(id.value);
  if (it == labels_.end()) throw InvalidArgument("unknown condition id " + std::to_string(id.value));
  return it->second;
}

ConditionId ConditionVocabulary::find(const std::string& label) const {
  for (const auto& [k, l] : labels_)
    if (l == label) return ConditionId{k};
  throw InvalidArgument("unknown condition label '" + label + "'");
}

std::vector<ConditionId> ConditionVocabulary::ids() const {
  std::vector<ConditionId> out;
  for (const auto& [k, l] : labels_) out.push_back(ConditionId{k});
  return out;
}

}  // namespace ldedit
