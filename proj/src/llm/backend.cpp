// SPDX-License-Identifier: Apache-2.0

#include "gar/llm/backend.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "gar/core/error.hpp"
#include "gar/llm/embedding.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gar::llm {

using nlohmann::json;

void validate(const EmbeddingVector& v) {
  if (v.values.empty()) throw Error(Errc::PreconditionViolation, "embedding is empty");
  for (float x : v.values) {
    if (!std::isfinite(x)) throw Error(Errc::PreconditionViolation, "embedding has a non-finite value");
  }
}

void to_json(json& j, const EmbeddingVector& v) { j = json{{"model_id", v.model_id}, {"values", v.values}}; }

void from_json(const json& j, EmbeddingVector& v) {
  j.at("model_id").get_to(v.model_id);
  j.at("values").get_to(v.values);
}

// ---------------------------------------------------------------------------
// Scripted

void ScriptedBackend::add_response(const std::string& template_id, const std::string& bindings_hash,
                                   std::string response, std::optional<int> attempt) {
  std::lock_guard lock(mu_);
  responses_[{template_id, bindings_hash}].push_back({attempt, std::move(response)});
}

std::size_t ScriptedBackend::calls_for(const std::string& template_id) const {
  std::lock_guard lock(mu_);
  const auto it = per_template_.find(template_id);
  return it == per_template_.end() ? 0 : it->second;
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
  ++calls_;
  {
    std::lock_guard lock(mu_);
    ++per_template_[request.template_id];

    // Exact hash first, then wildcard; within a key, an attempt-specific
    // entry beats a generic one.
    for (const std::string& hash : {request.bindings_hash, std::string("*")}) {
      const auto it = responses_.find({request.template_id, hash});
      if (it == responses_.end()) continue;
      const Canned* generic = nullptr;
      for (const auto& c : it->second) {
        if (c.attempt && *c.attempt == request.attempt) return c.response;
        if (!c.attempt && generic == nullptr) generic = &c;
      }
      if (generic != nullptr) return generic->response;
    }
  }
  if (fallback_) {
    static const Bindings kEmpty;
    const ScriptCall call{request.template_id, request.bindings ? *request.bindings : kEmpty, request.bindings_hash,
                          request.schema_id, request.attempt};
    if (auto out = fallback_(call)) return *out;
  }
  throw Error(Errc::UnmatchedFixture, "no scripted response for " + request.template_id,
              {{"template_id", request.template_id}, {"bindings_hash", request.bindings_hash}});
}

void ScriptedEmbedder::add_embedding(const std::string& text, std::vector<float> vector) {
  embeddings_.insert_or_assign(text, std::move(vector));
}

std::vector<float> ScriptedEmbedder::embed(const std::string& text) {
  ++calls_;
  const auto it = embeddings_.find(text);
  if (it != embeddings_.end()) return it->second;
  if (fallback_) {
    if (auto v = fallback_(text)) return *v;
  }
  throw Error(Errc::UnmatchedFixture, "no scripted embedding for text", {{"text", text.substr(0, 80)}});
}

void load_fixture_line(const std::string& line, ScriptedBackend& chat, ScriptedEmbedder& embedder) {
  const json j = json::parse(line);
  if (j.contains("embed_text")) {
    embedder.add_embedding(j.at("embed_text").get<std::string>(), j.at("vector").get<std::vector<float>>());
    return;
  }
  const json& resp = j.at("response");
  std::optional<int> attempt;
  if (j.contains("attempt") && !j["attempt"].is_null()) attempt = j["attempt"].get<int>();
  chat.add_response(j.at("template_id").get<std::string>(), j.at("bindings_hash").get<std::string>(),
                    resp.is_string() ? resp.get<std::string>() : resp.dump(), attempt);
}

void load_fixture_file(const std::string& path, ScriptedBackend& chat, ScriptedEmbedder& embedder) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open fixture " + path, {{"path", path}});
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      load_fixture_line(line, chat, embedder);
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedLine, "fixture line " + std::to_string(n) + ": " + e.what(),
                  {{"path", path}, {"line", n}});
    }
  }
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const std::size_t slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

}  // namespace

std::string post_json(const HttpEndpoint& endpoint, const std::string& body) {
  if (endpoint.url.empty()) throw Error(Errc::BackendUnavailable, "no endpoint URL configured");
  const SplitUrl u = split_url(endpoint.url);
  httplib::Client client(u.origin);
  const auto secs = static_cast<time_t>(endpoint.timeout_seconds);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  auto res = client.Post(u.path, headers, body, "application/json");
  if (!res) {
    throw Error(Errc::BackendUnavailable, "request to " + endpoint.url + " failed: " + httplib::to_string(res.error()),
                {{"url", endpoint.url}});
  }
  if (res->status == 429) {
    double retry_after = 1.0;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw Error(Errc::RateLimited, "rate limited by " + endpoint.url, {{"retry_after", retry_after}});
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(Errc::BackendUnavailable, "HTTP " + std::to_string(res->status) + " from " + endpoint.url,
                {{"url", endpoint.url}, {"status", res->status}});
  }
  return res->body;
}

std::shared_ptr<HttpChatBackend> HttpChatBackend::from_env() {
  return std::make_shared<HttpChatBackend>(
      HttpEndpoint{env_or("GAR_LLM_URL", ""), env_or("GAR_LLM_MODEL", "gpt-4o-mini"), env_or("GAR_LLM_KEY", "")});
}

std::string HttpChatBackend::complete(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  const json body{{"model", endpoint_.model}, {"messages", messages}, {"temperature", request.temperature}};
  const std::string raw = post_json(endpoint_, body.dump());
  const json resp = json::parse(raw, nullptr, false);
  if (resp.is_object()) {
    if (resp.contains("content") && resp["content"].is_string()) return resp["content"].get<std::string>();
    if (resp.contains("choices") && resp["choices"].is_array() && !resp["choices"].empty()) {
      const json& msg = resp["choices"][0].value("message", json::object());
      if (msg.contains("content") && msg["content"].is_string()) return msg["content"].get<std::string>();
    }
  }
  throw Error(Errc::BackendUnavailable, "unrecognized chat response from " + endpoint_.url);
}

std::shared_ptr<HttpEmbeddingBackend> HttpEmbeddingBackend::from_env() {
  return std::make_shared<HttpEmbeddingBackend>(HttpEndpoint{
      env_or("GAR_EMB_URL", ""), env_or("GAR_EMB_MODEL", "mxbai-embed-large"), env_or("GAR_LLM_KEY", "")});
}

std::vector<float> HttpEmbeddingBackend::embed(const std::string& text) {
  const json body{{"model", endpoint_.model}, {"input", text}};
  const json resp = json::parse(post_json(endpoint_, body.dump()), nullptr, false);
  if (resp.is_object()) {
    if (resp.contains("embedding") && resp["embedding"].is_array()) return resp["embedding"].get<std::vector<float>>();
    if (resp.contains("data") && resp["data"].is_array() && !resp["data"].empty() &&
        resp["data"][0].contains("embedding")) {
      return resp["data"][0]["embedding"].get<std::vector<float>>();
    }
  }
  throw Error(Errc::BackendUnavailable, "unrecognized embedding response from " + endpoint_.url);
}

}  // namespace gar::llm
