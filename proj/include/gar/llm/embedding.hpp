// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace gar::llm {

struct EmbeddingVector {
  std::vector<float> values;
  std::string model_id;

  bool operator==(const EmbeddingVector&) const = default;
};

/// Throws PreconditionViolation unless the vector is non-empty and finite.
void validate(const EmbeddingVector& v);

void to_json(nlohmann::json& j, const EmbeddingVector& v);
void from_json(const nlohmann::json& j, EmbeddingVector& v);

}  // namespace gar::llm
