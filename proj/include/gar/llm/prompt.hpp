// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

namespace gar::llm {

using Bindings = std::map<std::string, std::string>;

/// Which sampling temperature a template is sent with.
enum class TemperatureClass { Extraction, Prose };

struct PromptTemplate {
  std::string id;
  std::string text;  // `{{slot}}` placeholders
  TemperatureClass temperature = TemperatureClass::Extraction;

  /// Slot names in first-occurrence order.
  std::vector<std::string> slots() const;
};

struct PromptInstance {
  std::string template_id;
  Bindings bindings;
  std::string rendered;

  /// SHA-256 over the canonical (sorted-key) JSON encoding of the bindings.
  std::string bindings_hash() const;
};

std::string hash_bindings(const Bindings& bindings);

class TemplateRegistry {
 public:
  /// Registry preloaded with every prompt the pipeline uses.
  static TemplateRegistry defaults();

  void add(PromptTemplate tmpl);
  bool contains(const std::string& id) const { return templates_.count(id) != 0; }
  const PromptTemplate& get(const std::string& id) const;

  /// Substitutes every slot. Throws UnknownTemplate or MissingSlot(name) for
  /// the first unbound slot in template order. Extra bindings are ignored.
  PromptInstance render(const std::string& id, const Bindings& bindings) const;

  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// Template identifiers.
namespace tmpl {
inline constexpr const char* kAcronyms = "Q_acr";
inline constexpr const char* kExtract = "Q_extract";
inline constexpr const char* kMerge = "Q_merge";
inline constexpr const char* kSummarize = "Q_sum";
inline constexpr const char* kCompare = "Q_comp";
inline constexpr const char* kCompareEvidence = "Q_comp_evidence";
inline constexpr const char* kCompareOpen = "Q_comp_open";
inline constexpr const char* kCompareTone = "Q_comp_tone";
inline constexpr const char* kCompareTechnical = "Q_comp_technical";
inline constexpr const char* kCompareEthic = "Q_comp_ethic";
inline constexpr const char* kFocus = "Q_focus";
inline constexpr const char* kNoveltyKeywords = "Q_novel_kw";
inline constexpr const char* kNovelty = "Q_novel";
inline constexpr const char* kMention = "Q_mention";
inline constexpr const char* kStyle = "Q_style";
inline constexpr const char* kReviewInstructions = "Q_review";
inline constexpr const char* kNoveltyInstructions = "Q_novelty";
inline constexpr const char* kInitialReview = "Q_r0";
inline constexpr const char* kCheck = "Q_check";
inline constexpr const char* kMetaReflect = "Q_meta_reflect";
inline constexpr const char* kMeta = "Q_meta";
}  // namespace tmpl

}  // namespace gar::llm
