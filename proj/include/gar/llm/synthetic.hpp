// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "gar/llm/backend.hpp"
#include "gar/llm/gateway.hpp"

namespace gar::llm {

inline constexpr const char* kSyntheticChatModel = "synthetic-v1";
inline constexpr const char* kHashingEmbeddingModel = "hashing-bow-64";

/// Answers every pipeline prompt from its bindings alone with simple lexical
/// heuristics, so offline runs are deterministic and need no fixtures. Quotes
/// returned for mention prompts are always verbatim review sentences.
Responder synthetic_responder();

/// Signed feature hashing of lowercase word tokens into `dim` buckets, L2
/// normalized. A constant bias component keeps every vector non-zero.
Embedder hashing_embedder(std::size_t dim = 64);

/// Scripted backends whose fallbacks are the synthetic responder and the
/// hashing embedder; fixture lines added later take priority.
std::shared_ptr<ScriptedBackend> make_synthetic_chat();
std::shared_ptr<ScriptedEmbedder> make_hashing_embedder();

}  // namespace gar::llm
