// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gar/core/error.hpp"
#include "json.hpp"

namespace gar::llm {
class Gateway;
}

namespace gar::ingest {

struct Section {
  std::string heading;
  std::string body;

  bool operator==(const Section&) const = default;
};

struct Chunk {
  std::string chunk_id;
  std::string section_heading;
  std::string text;
  int token_estimate = 0;

  bool operator==(const Chunk&) const = default;
};

struct FigureCaption {
  std::string figure_id;  // "figure-<n>"
  std::string caption;

  bool operator==(const FigureCaption&) const = default;
};

struct Manuscript {
  std::string id;
  std::string title;
  std::string abstract;
  int year = 0;
  std::vector<Section> sections;
  std::vector<Chunk> chunks;
  std::vector<FigureCaption> figure_captions;

  bool operator==(const Manuscript&) const = default;

  /// Body of the section titled "Introduction" (case-insensitive substring),
  /// else the first section's body; empty when there are no sections.
  std::string introduction() const;
};

using AcronymTable = std::map<std::string, std::string>;

struct ChunkingOptions {
  int max_chunk_tokens = 1200;
};

/// Splits markdown on ATX headings ('#'..'######'), normalizes blank-line runs
/// and chunks each section. The first level-1 heading becomes the title and
/// a section headed "Abstract" fills the abstract. Throws EmptyDocument for
/// blank input; a document without headings becomes one untitled section and
/// a warning.
Manuscript parse_manuscript(const std::string& markdown, const std::string& id, int year,
                            const ChunkingOptions& options = {}, Diagnostics* diag = nullptr);

/// One chunk when the section fits, else greedy packing of paragraphs.
/// Paragraphs larger than the limit are split at whitespace.
std::vector<std::string> chunk_section(const std::string& body, int max_chunk_tokens);

/// Collapses runs of blank lines to one, strips trailing spaces and blank
/// leading/trailing lines.
std::string normalize_body(const std::string& body);

/// Inserts each caption on the line right after its figure marker
/// ("Figure N" / "Fig. N" at line start) and re-chunks the owning section.
/// Throws UnknownFigureId before modifying anything.
Manuscript attach_figure_captions(const Manuscript& m, const std::vector<FigureCaption>& captions,
                                  const ChunkingOptions& options = {});

/// Figure ids whose markers appear in the text ("figure-1", ...).
std::vector<std::string> find_figure_markers(const std::string& text);

/// Title + abstract + introduction, the span scanned for acronyms.
std::string acronym_span(const Manuscript& m);

/// Asks the model for acronyms and keeps only entries whose expansion appears
/// verbatim in the scanned span.
AcronymTable extract_acronyms(const Manuscript& m, llm::Gateway& gateway, Diagnostics* diag = nullptr);

std::string render_acronyms(const AcronymTable& table);

void to_json(nlohmann::json& j, const Section& s);
void from_json(const nlohmann::json& j, Section& s);
void to_json(nlohmann::json& j, const Chunk& c);
void from_json(const nlohmann::json& j, Chunk& c);
void to_json(nlohmann::json& j, const FigureCaption& f);
void from_json(const nlohmann::json& j, FigureCaption& f);
void to_json(nlohmann::json& j, const Manuscript& m);
void from_json(const nlohmann::json& j, Manuscript& m);

}  // namespace gar::ingest
