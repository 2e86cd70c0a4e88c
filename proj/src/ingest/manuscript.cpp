// SPDX-License-Identifier: Apache-2.0

#include "gar/ingest/manuscript.hpp"

#include <regex>
#include <set>
#include <sstream>

#include "gar/core/text.hpp"
#include "gar/llm/gateway.hpp"

namespace gar::ingest {

using nlohmann::json;

namespace {

const std::regex& heading_re() {
  static const std::regex re(R"(^(#{1,6})\s+(.*?)\s*#*\s*$)");
  return re;
}

const std::regex& figure_re() {
  static const std::regex re(R"(^\s*(?:\*\*|!\[)?\s*(?:figure|fig\.)\s*(\d+))", std::regex::icase);
  return re;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out = text::split(s, '\n');
  for (auto& l : out) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return out;
}

// Splits one oversized paragraph at whitespace into pieces of at most
// max_bytes; a single longer word is cut by bytes.
std::vector<std::string> split_paragraph(const std::string& para, std::size_t max_bytes) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(para);
  std::string word;
  while (in >> word) {
    while (word.size() > max_bytes) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
      out.push_back(word.substr(0, max_bytes));
      word = word.substr(max_bytes);
    }
    if (cur.empty()) {
      cur = word;
    } else if (cur.size() + 1 + word.size() <= max_bytes) {
      cur += " " + word;
    } else {
      out.push_back(cur);
      cur = word;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void rebuild_chunks(Manuscript& m, const ChunkingOptions& options) {
  m.chunks.clear();
  for (const auto& s : m.sections) {
    for (auto& piece : chunk_section(s.body, options.max_chunk_tokens)) {
      Chunk c;
      c.chunk_id = m.id + "#c" + std::to_string(m.chunks.size());
      c.section_heading = s.heading;
      c.token_estimate = text::estimate_tokens(piece);
      c.text = std::move(piece);
      m.chunks.push_back(std::move(c));
    }
  }
}

}  // namespace

std::string Manuscript::introduction() const {
  for (const auto& s : sections) {
    if (text::icontains(s.heading, "introduction")) return s.body;
  }
  return sections.empty() ? std::string() : sections.front().body;
}

std::string normalize_body(const std::string& body) {
  std::vector<std::string> kept;
  bool last_blank = true;  // drops leading blank lines
  for (auto line : lines_of(body)) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const bool blank = line.empty();
    if (blank && last_blank) continue;
    kept.push_back(std::move(line));
    last_blank = blank;
  }
  while (!kept.empty() && kept.back().empty()) kept.pop_back();
  return text::join(kept, "\n");
}

std::vector<std::string> chunk_section(const std::string& body, int max_chunk_tokens) {
  require(max_chunk_tokens > 0, "max_chunk_tokens > 0");
  std::vector<std::string> out;
  if (text::trim(body).empty()) return out;
  if (text::estimate_tokens(body) <= max_chunk_tokens) {
    out.push_back(body);
    return out;
  }
  const auto max_bytes = static_cast<std::size_t>(max_chunk_tokens) * 4;
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find("\n\n", start);
    if (end == std::string::npos) end = body.size();
    std::string para = body.substr(start, end - start);
    if (!text::trim(para).empty()) {
      if (text::estimate_tokens(para) <= max_chunk_tokens) {
        pieces.push_back(std::move(para));
      } else {
        for (auto& p : split_paragraph(para, max_bytes)) pieces.push_back(std::move(p));
      }
    }
    start = end + 2;
  }
  std::string cur;
  for (auto& piece : pieces) {
    if (cur.empty()) {
      cur = std::move(piece);
      continue;
    }
    std::string candidate = cur + "\n\n" + piece;
    if (text::estimate_tokens(candidate) <= max_chunk_tokens) {
      cur = std::move(candidate);
    } else {
      out.push_back(std::move(cur));
      cur = std::move(piece);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Manuscript parse_manuscript(const std::string& markdown, const std::string& id, int year,
                            const ChunkingOptions& options, Diagnostics* diag) {
  if (text::trim(markdown).empty()) throw Error(Errc::EmptyDocument, "manuscript " + id + " is empty", {{"id", id}});
  require(year > 1900, "year > 1900");

  Manuscript m;
  m.id = id;
  m.year = year;

  std::vector<std::pair<std::string, std::vector<std::string>>> raw;
  bool any_heading = false;
  raw.emplace_back("", std::vector<std::string>{});
  for (const auto& line : lines_of(markdown)) {
    std::smatch match;
    if (std::regex_match(line, match, heading_re())) {
      any_heading = true;
      const std::string heading = match[2].str();
      if (match[1].length() == 1 && m.title.empty()) m.title = heading;
      raw.emplace_back(heading, std::vector<std::string>{});
    } else {
      raw.back().second.push_back(line);
    }
  }
  if (!any_heading) warn(diag, "manuscript " + id + " has no headings; treated as a single section");

  for (std::size_t i = 0; i < raw.size(); ++i) {
    Section s{raw[i].first, normalize_body(text::join(raw[i].second, "\n"))};
    // The implicit preamble is kept only when it has content.
    if (i == 0 && s.body.empty()) continue;
    if (m.abstract.empty() && text::iequals(text::trim(s.heading), "abstract")) m.abstract = s.body;
    m.sections.push_back(std::move(s));
  }
  rebuild_chunks(m, options);
  return m;
}

std::vector<std::string> find_figure_markers(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& line : lines_of(text)) {
    std::smatch match;
    if (std::regex_search(line, match, figure_re())) {
      std::string fid = "figure-" + std::to_string(std::stoi(match[1].str()));
      if (std::find(out.begin(), out.end(), fid) == out.end()) out.push_back(std::move(fid));
    }
  }
  return out;
}

Manuscript attach_figure_captions(const Manuscript& m, const std::vector<FigureCaption>& captions,
                                  const ChunkingOptions& options) {
  if (captions.empty()) return m;
  std::set<std::string> known;
  for (const auto& s : m.sections) {
    for (auto& f : find_figure_markers(s.body)) known.insert(f);
  }
  for (const auto& c : captions) {
    if (!known.count(c.figure_id)) {
      throw Error(Errc::UnknownFigureId, "no figure marker for " + c.figure_id, {{"figure_id", c.figure_id}});
    }
  }

  Manuscript out = m;
  for (const auto& c : captions) {
    for (auto& s : out.sections) {
      auto lines = lines_of(s.body);
      bool inserted = false;
      for (std::size_t i = 0; i < lines.size() && !inserted; ++i) {
        std::smatch match;
        if (std::regex_search(lines[i], match, figure_re()) &&
            "figure-" + std::to_string(std::stoi(match[1].str())) == c.figure_id) {
          lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(i) + 1, text::trim(c.caption));
          inserted = true;
        }
      }
      if (inserted) {
        s.body = text::join(lines, "\n");
        break;
      }
    }
    out.figure_captions.push_back(c);
  }
  rebuild_chunks(out, options);
  return out;
}

std::string acronym_span(const Manuscript& m) {
  return m.title + "\n" + m.abstract + "\n" + m.introduction();
}

AcronymTable extract_acronyms(const Manuscript& m, llm::Gateway& gateway, Diagnostics* diag) {
  require(!m.title.empty() || !m.abstract.empty(), "manuscript has a title or abstract");
  static const llm::OutputSchema schema{
      "acronyms",
      {llm::Field::object_list("acronyms", {llm::Field::string("acronym"), llm::Field::string("expansion")})}};
  const auto prompt = gateway.render(llm::tmpl::kAcronyms,
                                     {{"title", m.title}, {"abstract", m.abstract}, {"introduction", m.introduction()}});
  const auto value = gateway.complete_structured(prompt, schema);

  const std::string span = acronym_span(m);
  AcronymTable table;
  for (const auto& entry : value.at("acronyms")) {
    const std::string acr = text::trim(entry.at("acronym").get<std::string>());
    const std::string exp = text::trim(entry.at("expansion").get<std::string>());
    if (acr.empty() || exp.empty()) continue;
    if (span.find(exp) == std::string::npos) {
      warn(diag, "dropped acronym " + acr + ": expansion not found in the scanned text");
      continue;
    }
    table.emplace(acr, exp);
  }
  return table;
}

std::string render_acronyms(const AcronymTable& table) {
  if (table.empty()) return "(none)";
  std::string out;
  for (const auto& [acr, exp] : table) {
    if (!out.empty()) out += "\n";
    out += acr + ": " + exp;
  }
  return out;
}

void to_json(json& j, const Section& s) { j = json{{"heading", s.heading}, {"body", s.body}}; }
void from_json(const json& j, Section& s) {
  j.at("heading").get_to(s.heading);
  j.at("body").get_to(s.body);
}

void to_json(json& j, const Chunk& c) {
  j = json{{"chunk_id", c.chunk_id},
           {"section_heading", c.section_heading},
           {"text", c.text},
           {"token_estimate", c.token_estimate}};
}
void from_json(const json& j, Chunk& c) {
  j.at("chunk_id").get_to(c.chunk_id);
  j.at("section_heading").get_to(c.section_heading);
  j.at("text").get_to(c.text);
  j.at("token_estimate").get_to(c.token_estimate);
}

void to_json(json& j, const FigureCaption& f) { j = json{{"figure_id", f.figure_id}, {"caption", f.caption}}; }
void from_json(const json& j, FigureCaption& f) {
  j.at("figure_id").get_to(f.figure_id);
  j.at("caption").get_to(f.caption);
}

void to_json(json& j, const Manuscript& m) {
  j = json{{"id", m.id},         {"title", m.title},       {"abstract", m.abstract},
           {"year", m.year},     {"sections", m.sections}, {"chunks", m.chunks},
           {"figure_captions", m.figure_captions}};
}

void from_json(const json& j, Manuscript& m) {
  j.at("id").get_to(m.id);
  j.at("title").get_to(m.title);
  j.at("abstract").get_to(m.abstract);
  j.at("year").get_to(m.year);
  j.at("sections").get_to(m.sections);
  j.at("chunks").get_to(m.chunks);
  if (j.contains("figure_captions")) j.at("figure_captions").get_to(m.figure_captions);
}

}  // namespace gar::ingest
