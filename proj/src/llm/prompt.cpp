// SPDX-License-Identifier: Apache-2.0

#include "gar/llm/prompt.hpp"

#include <algorithm>

#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"
#include "json.hpp"

namespace gar::llm {

namespace {

struct Token {
  bool is_slot;
  std::string value;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string::npos) {
      out.push_back({false, text.substr(pos)});
      break;
    }
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string::npos) {
      out.push_back({false, text.substr(pos)});
      break;
    }
    if (open > pos) out.push_back({false, text.substr(pos, open - pos)});
    out.push_back({true, text.substr(open + 2, close - open - 2)});
    pos = close + 2;
  }
  return out;
}

}  // namespace

std::vector<std::string> PromptTemplate::slots() const {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(text)) {
    if (tok.is_slot && std::find(out.begin(), out.end(), tok.value) == out.end()) out.push_back(tok.value);
  }
  return out;
}

std::string hash_bindings(const Bindings& bindings) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : bindings) j[k] = v;
  return sha256_hex(j.dump());
}

std::string PromptInstance::bindings_hash() const { return hash_bindings(bindings); }

void TemplateRegistry::add(PromptTemplate tmpl) {
  const std::string id = tmpl.id;
  templates_.insert_or_assign(id, std::move(tmpl));
}

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
  const auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(Errc::UnknownTemplate, "unknown template " + id, {{"template_id", id}});
  return it->second;
}

PromptInstance TemplateRegistry::render(const std::string& id, const Bindings& bindings) const {
  const PromptTemplate& t = get(id);
  std::string rendered;
  for (const auto& tok : tokenize(t.text)) {
    if (!tok.is_slot) {
      rendered += tok.value;
      continue;
    }
    const auto it = bindings.find(tok.value);
    if (it == bindings.end()) {
      throw Error(Errc::MissingSlot, "template " + id + " has no binding for slot " + tok.value,
                  {{"template_id", id}, {"slot", tok.value}});
    }
    rendered += it->second;
  }
  return PromptInstance{id, bindings, std::move(rendered)};
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

}  // namespace gar::llm
