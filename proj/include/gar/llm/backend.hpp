// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gar/llm/prompt.hpp"

namespace gar::llm {

struct ChatMessage {
  std::string role;
  std::string content;
};

/// One chat-completion call. The script fields identify the logical prompt so
/// the scripted backend can answer without parsing message text; remote
/// backends ignore them.
struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;

  std::string template_id;
  const Bindings* bindings = nullptr;
  std::string bindings_hash;
  std::string schema_id;
  int attempt = 0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string model_id() const = 0;
  /// Returns the raw assistant content.
  virtual std::string complete(const ChatRequest& request) = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string model_id() const = 0;
  virtual std::vector<float> embed(const std::string& text) = 0;
};

/// What a scripted responder sees: a pure function of these fields.
struct ScriptCall {
  std::string template_id;
  const Bindings& bindings;
  std::string bindings_hash;
  std::string schema_id;
  int attempt;
};

using Responder = std::function<std::optional<std::string>(const ScriptCall&)>;
using Embedder = std::function<std::optional<std::vector<float>>(const std::string&)>;

/// Deterministic chat backend driven by fixture lines
/// {template_id, bindings_hash, response[, attempt]}. `bindings_hash` may be
/// "*" to match any call of that template; exact hashes take priority. Calls
/// that match nothing and are not handled by the fallback responder throw
/// UnmatchedFixture.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(std::string model_id = "scripted-v1") : model_id_(std::move(model_id)) {}

  void add_response(const std::string& template_id, const std::string& bindings_hash, std::string response,
                    std::optional<int> attempt = std::nullopt);
  void set_fallback(Responder responder) { fallback_ = std::move(responder); }

  std::string id() const override { return "scripted"; }
  std::string model_id() const override { return model_id_; }
  std::string complete(const ChatRequest& request) override;

  std::size_t calls() const { return calls_.load(); }
  std::size_t calls_for(const std::string& template_id) const;

 private:
  struct Canned {
    std::optional<int> attempt;
    std::string response;
  };

  std::string model_id_;
  std::map<std::pair<std::string, std::string>, std::vector<Canned>> responses_;
  Responder fallback_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> per_template_;
};

/// Deterministic embedder driven by fixture lines {embed_text, vector}, with
/// an optional fallback for unlisted texts (otherwise UnmatchedFixture).
class ScriptedEmbedder final : public EmbeddingBackend {
 public:
  explicit ScriptedEmbedder(std::string model_id = "scripted-emb-v1") : model_id_(std::move(model_id)) {}

  void add_embedding(const std::string& text, std::vector<float> vector);
  void set_fallback(Embedder embedder) { fallback_ = std::move(embedder); }

  std::string id() const override { return "scripted"; }
  std::string model_id() const override { return model_id_; }
  std::vector<float> embed(const std::string& text) override;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::string model_id_;
  std::map<std::string, std::vector<float>> embeddings_;
  Embedder fallback_;
  std::atomic<std::size_t> calls_{0};
};

/// Loads a JSONL fixture file; chat lines go to `chat`, embedding lines to `embedder`.
void load_fixture_file(const std::string& path, ScriptedBackend& chat, ScriptedEmbedder& embedder);
void load_fixture_line(const std::string& line, ScriptedBackend& chat, ScriptedEmbedder& embedder);

struct HttpEndpoint {
  std::string url;  // e.g. http://localhost:8080/v1/chat
  std::string model;
  std::string api_key;
  double timeout_seconds = 120.0;
};

/// JSON-over-HTTP chat backend: POST {model, messages, temperature} and read
/// {content} (or an OpenAI-style choices[0].message.content).
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  /// Reads GAR_LLM_URL, GAR_LLM_MODEL, GAR_LLM_KEY.
  static std::shared_ptr<HttpChatBackend> from_env();

  std::string id() const override { return "http:" + endpoint_.url; }
  std::string model_id() const override { return endpoint_.model; }
  std::string complete(const ChatRequest& request) override;

 private:
  HttpEndpoint endpoint_;
};

/// POST {model, input} and read {embedding} (or data[0].embedding).
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  /// Reads GAR_EMB_URL, GAR_EMB_MODEL, GAR_LLM_KEY.
  static std::shared_ptr<HttpEmbeddingBackend> from_env();

  std::string id() const override { return "http:" + endpoint_.url; }
  std::string model_id() const override { return endpoint_.model; }
  std::vector<float> embed(const std::string& text) override;

 private:
  HttpEndpoint endpoint_;
};

/// Posts a JSON body and returns the response body. Maps transport
/// failures to BackendUnavailable and HTTP 429 to RateLimited.
std::string post_json(const HttpEndpoint& endpoint, const std::string& body);

}  // namespace gar::llm
