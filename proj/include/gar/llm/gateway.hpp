// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>

#include "gar/llm/backend.hpp"
#include "gar/llm/cache.hpp"
#include "gar/llm/embedding.hpp"
#include "gar/llm/prompt.hpp"
#include "gar/llm/rate_limiter.hpp"
#include "gar/llm/schema.hpp"

namespace gar::llm {

struct GatewayConfig {
  int repair_retries = 2;
  double temperature_extraction = 0.0;
  double temperature_prose = 0.7;
  double requests_per_minute = 0.0;  // 0 = unlimited
  int rate_limit_retries = 8;
  double max_retry_after_seconds = 60.0;
  std::string cache_dir;  // empty = in-memory cache only
  std::string system_prompt = "You are a careful assistant supporting scientific peer review.";
};

/// Single access point for chat and embedding backends. Safe for concurrent
/// callers.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> chat, std::shared_ptr<EmbeddingBackend> embedder,
          TemplateRegistry templates = TemplateRegistry::defaults(), GatewayConfig config = {});

  PromptInstance render(const std::string& template_id, const Bindings& bindings) const {
    return templates_.render(template_id, bindings);
  }
  const TemplateRegistry& templates() const { return templates_; }
  const GatewayConfig& config() const { return config_; }

  /// Sends the prompt with the schema's JSON instructions and returns a value
  /// satisfying the schema. Invalid output is retried `repair_retries` times
  /// with a repair message, then SchemaViolation is thrown. Results are
  /// cached by (backend, model, rendered prompt, schema id).
  StructuredValue complete_structured(const PromptInstance& prompt, const OutputSchema& schema);

  /// Deterministic per (text, model). Throws EmptyText for "".
  EmbeddingVector embed(const std::string& text);

  std::string chat_backend_id() const { return chat_->id(); }
  std::string chat_model_id() const { return chat_->model_id(); }
  std::string embedding_model_id() const { return embedder_->model_id(); }

  std::size_t backend_requests() const { return backend_requests_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

  /// Called with every prompt sent through complete_structured, cache hits included.
  void set_prompt_observer(std::function<void(const PromptInstance&)> observer) { observer_ = std::move(observer); }

 private:
  std::string call_backend(ChatRequest& request);

  std::shared_ptr<ChatBackend> chat_;
  std::shared_ptr<EmbeddingBackend> embedder_;
  TemplateRegistry templates_;
  GatewayConfig config_;
  ResponseCache cache_;
  TokenBucket limiter_;
  std::function<void(const PromptInstance&)> observer_;
  std::atomic<std::size_t> backend_requests_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace gar::llm
