// SPDX-License-Identifier: Apache-2.0

#include "gar/llm/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "gar/core/error.hpp"

namespace gar::llm {

Gateway::Gateway(std::shared_ptr<ChatBackend> chat, std::shared_ptr<EmbeddingBackend> embedder,
                 TemplateRegistry templates, GatewayConfig config)
    : chat_(std::move(chat)),
      embedder_(std::move(embedder)),
      templates_(std::move(templates)),
      config_(std::move(config)),
      cache_(config_.cache_dir),
      limiter_(config_.requests_per_minute) {
  if (!chat_ || !embedder_) throw Error(Errc::BackendUnavailable, "gateway requires chat and embedding backends");
}

std::string Gateway::call_backend(ChatRequest& request) {
  for (int tries = 0;; ++tries) {
    limiter_.acquire();
    ++backend_requests_;
    try {
      return chat_->complete(request);
    } catch (const Error& e) {
      if (e.code() != Errc::RateLimited || tries >= config_.rate_limit_retries) throw;
      const double wait = std::min(config_.max_retry_after_seconds, e.details().value("retry_after", 1.0));
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
  }
}

StructuredValue Gateway::complete_structured(const PromptInstance& prompt, const OutputSchema& schema) {
  if (observer_) observer_(prompt);
  const std::string key =
      ResponseCache::key({"chat", chat_->id(), chat_->model_id(), prompt.rendered, schema.schema_id});
  if (auto hit = cache_.get(key)) {
    ++cache_hits_;
    return *hit;
  }

  const PromptTemplate& tmpl = templates_.get(prompt.template_id);
  ChatRequest request;
  request.model = chat_->model_id();
  request.temperature = tmpl.temperature == TemperatureClass::Prose ? config_.temperature_prose
                                                                     : config_.temperature_extraction;
  request.template_id = prompt.template_id;
  request.bindings = &prompt.bindings;
  request.bindings_hash = prompt.bindings_hash();
  request.schema_id = schema.schema_id;
  request.messages.push_back({"system", config_.system_prompt});
  request.messages.push_back({"user", prompt.rendered + "\n\n" + schema.instructions()});

  std::string last_reason;
  for (int attempt = 0; attempt <= config_.repair_retries; ++attempt) {
    request.attempt = attempt;
    const std::string raw = call_backend(request);
    std::string reason;
    auto parsed = parse_json_object(raw, &reason);
    if (parsed) {
      if (auto v = schema.violation(*parsed)) {
        reason = *v;
      } else {
        cache_.put(key, *parsed);
        return *parsed;
      }
    }
    last_reason = reason;
    request.messages.push_back({"assistant", raw});
    request.messages.push_back({"user", "Your previous reply was rejected: " + reason +
                                            ". Reply again with only a JSON object that satisfies every field "
                                            "and bound listed above."});
  }
  throw Error(Errc::SchemaViolation,
              "schema " + schema.schema_id + " violated after " + std::to_string(config_.repair_retries) +
                  " repair retries: " + last_reason,
              {{"schema_id", schema.schema_id},
               {"template_id", prompt.template_id},
               {"reason", last_reason},
               {"attempts", config_.repair_retries + 1}});
}

EmbeddingVector Gateway::embed(const std::string& text) {
  if (text.empty()) throw Error(Errc::EmptyText, "cannot embed empty text");
  const std::string key = ResponseCache::key({"embed", embedder_->id(), embedder_->model_id(), text});
  if (auto hit = cache_.get(key)) {
    ++cache_hits_;
    return hit->get<EmbeddingVector>();
  }
  limiter_.acquire();
  ++backend_requests_;
  EmbeddingVector v{embedder_->embed(text), embedder_->model_id()};
  validate(v);
  cache_.put(key, v);
  return v;
}

}  // namespace gar::llm
