// SPDX-License-Identifier: Apache-2.0

// Default prompt texts. Slots are `{{name}}`; the structured-output
// instructions are appended by the gateway from the output schema.

#include "gar/llm/prompt.hpp"

namespace gar::llm {

namespace {

constexpr const char* kAcronymsText = R"(Identify every acronym defined in the following manuscript excerpt together with its definition.
Only report acronyms whose full expansion is written out in the excerpt.

Title: {{title}}

Abstract:
{{abstract}}

Introduction:
{{introduction}})";

constexpr const char* kExtractText = R"(You are building a knowledge graph of a scientific manuscript.
First identify all entities in the text below. Each entity is one of: idea, claim, technical_detail, evidence.
Then identify all relationships between clearly-related entities, giving the source entity, the target entity,
the relationship kind (for example "proves" or "supports") and a one-sentence description of the relationship.
Refer to entities by the exact name you gave them.

Known acronyms:
{{acronyms}}

Section: {{section}}

Text:
{{chunk}})";

constexpr const char* kMergeText = R"(The entities below were extracted from different parts of the same manuscript.
Group entities that represent the same or a very similar concept phrased differently.
Only group entities of the same kind. Leave distinct concepts ungrouped.

Known acronyms:
{{acronyms}}

Entities (id | kind | name):
{{entities}})";

constexpr const char* kSummarizeText = R"(Write a report-like descriptor of the following community of related elements from a manuscript.
Describe what the community is about and how its elements relate to each other.
Cite the original text as much as possible.

Known acronyms:
{{acronyms}}

Elements:
{{entities}}

Relationships:
{{relations}})";

constexpr const char* kCompareHeader = R"(You are comparing peer reviews.
Target review:
{{target}}

Other reviews of the same paper as the target (context only, reflecting the paper's quality):
{{anchor}}

Review of a different paper:
{{other}}

)";

constexpr const char* kFocusText = R"(Extract the primary areas a reviewer focuses on from the reviews below.
Answer with at most {{max_items}} short keywords separated by semicolons (for example "clarity; technical depth; writing quality").

Reviews:
{{reviews}})";

constexpr const char* kNoveltyKeywordsText = R"(Extract at most {{max_keywords}} search keywords describing the research topic of this manuscript's introduction.

Title: {{title}}

Introduction:
{{introduction}})";

constexpr const char* kNoveltyText = R"(Assess the novelty of the manuscript against the prior work listed below.
Analyze the extent of innovation, the clarity of differences from past contributions, and the adequacy of related-work citation.
Give a novelty score from 1 (not novel) to 4 (highly novel) and a concise explanation.
Only cite verifiable information: cite prior work by its bracketed id.

Known acronyms:
{{acronyms}}

Manuscript title: {{title}}

Abstract:
{{abstract}}

Introduction:
{{introduction}}

Prior work:
{{candidates}})";

constexpr const char* kMentionText = R"(Does the human review below mention the concept summarized by the descriptor?
If it does, quote the relevant passage of the review verbatim.
If it does not, answer exactly: {{sentinel}}

Descriptor:
{{descriptor}}

Review:
{{reviews}})";

constexpr const char* kStyleText = R"(Reviewer persona:
- Strictness: {{strictness}}
- Evidence focus: {{evidence_focus}}
- Open-mindedness: {{open_mindedness}}
- Tone: {{tone}}
- Attention to technical details: {{technical_focus}}
- Ethic focus: {{ethic_focus}}
- Expertise level (1-5): {{expertise}}
- Focus areas: {{focus_areas}}
Write the review in a way that is consistent with this persona.)";

constexpr const char* kReviewInstructionsText = R"(You are a reviewer for a major machine learning conference.
Evaluate each community descriptor of the manuscript below, thinking step by step.
Structure the review into significance and novelty, strengths, weaknesses, and suggestions for improvement.
Give numerical scores: soundness (1-4), presentation (1-4), contribution (1-4), overall (1-10), confidence (1-5),
and a preliminary decision (accept or reject) with a rationale.)";

constexpr const char* kNoveltyInstructionsText = R"(A preliminary novelty assessment of the manuscript is provided. Take it into account when judging significance and novelty.)";

constexpr const char* kInitialReviewText = R"({{review_instructions}}

{{novelty_instructions}}

{{style}}

Novelty score (1-4): {{novelty_score}}
Novelty explanation: {{novelty_explanation}}

Known acronyms:
{{acronyms}}

Community descriptors:
{{descriptors}})";

constexpr const char* kCheckText = R"(You are refining your review of a manuscript (round {{round}}).
Check the review against the manuscript elements below and the comments human reviewers made on similar work.
You may add strengths, add weaknesses, or correct mistakes made in earlier rounds. Restate the complete review
and explain the rationale for your changes.

Initial review:
{{initial_review}}

Previous review:
{{previous_review}}

{{prompt_block}})";

constexpr const char* kMetaReflectText = R"(You are the meta-reviewer of a conference submission (reflection turn {{turn}}).
Synthesize an overall assessment: a concise but structured summary highlighting strengths and weaknesses,
with special attention to methodological rigor, experimental validation, and impact.

Meta-reviews of similar papers:
{{exemplars}}

Your summaries from previous turns:
{{previous_summaries}}

Reviews:
{{reviews}})";

constexpr const char* kMetaText = R"(You are the meta-reviewer of a conference submission.
Consolidate the key insights raised by the reviewers into a balanced final assessment, then choose the final
decision from: ACCEPT (ORAL), ACCEPT (POSTER), REJECT.

Meta-reviews of similar papers:
{{exemplars}}

Your reflection summaries:
{{summaries}}

Reviews:
{{reviews}})";

std::string compare_text(const char* question) { return std::string(kCompareHeader) + question; }

}  // namespace

TemplateRegistry TemplateRegistry::defaults() {
  using TC = TemperatureClass;
  TemplateRegistry r;
  r.add({tmpl::kAcronyms, kAcronymsText, TC::Extraction});
  r.add({tmpl::kExtract, kExtractText, TC::Extraction});
  r.add({tmpl::kMerge, kMergeText, TC::Extraction});
  r.add({tmpl::kSummarize, kSummarizeText, TC::Extraction});
  r.add({tmpl::kCompare,
         compare_text("Is the target review stricter (holding the paper to higher standards) than the review of the "
                      "different paper? Answer \"target\" or \"other\"."),
         TC::Extraction});
  r.add({tmpl::kCompareEvidence,
         compare_text("Does the target review place more importance on the evidence supporting the claims than the "
                      "review of the different paper? Answer \"target\" or \"other\"."),
         TC::Extraction});
  r.add({tmpl::kCompareOpen,
         compare_text("Is the target review more open to unconventional or novel ideas than the review of the "
                      "different paper? Answer \"target\" or \"other\"."),
         TC::Extraction});
  r.add({tmpl::kCompareTone,
         compare_text("Is the tone of the target review more constructive than the tone of the review of the "
                      "different paper? Answer \"target\" or \"other\"."),
         TC::Extraction});
  r.add({tmpl::kCompareTechnical,
         compare_text("Is the target review more detail-oriented about technical correctness and methodological rigor "
                      "than the review of the different paper? Answer \"target\" or \"other\"."),
         TC::Extraction});
  r.add({tmpl::kCompareEthic,
         compare_text("Does the target review pay more attention to ethical considerations than the review of the "
                      "different paper? Answer \"target\" or \"other\"."),
         TC::Extraction});
  r.add({tmpl::kFocus, kFocusText, TC::Extraction});
  r.add({tmpl::kNoveltyKeywords, kNoveltyKeywordsText, TC::Extraction});
  r.add({tmpl::kNovelty, kNoveltyText, TC::Extraction});
  r.add({tmpl::kMention, kMentionText, TC::Extraction});
  r.add({tmpl::kStyle, kStyleText, TC::Prose});
  r.add({tmpl::kReviewInstructions, kReviewInstructionsText, TC::Prose});
  r.add({tmpl::kNoveltyInstructions, kNoveltyInstructionsText, TC::Prose});
  r.add({tmpl::kInitialReview, kInitialReviewText, TC::Prose});
  r.add({tmpl::kCheck, kCheckText, TC::Prose});
  r.add({tmpl::kMetaReflect, kMetaReflectText, TC::Prose});
  r.add({tmpl::kMeta, kMetaText, TC::Prose});
  return r;
}

}  // namespace gar::llm
