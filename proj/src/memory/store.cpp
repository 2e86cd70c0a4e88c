// SPDX-License-Identifier: Apache-2.0

// On-disk layout of embeddings.bin (all integers little-endian):
//   magic "GAREMB01" | u32 model_id length | model_id bytes | u64 count
//   count x (u64 byte offset, u32 dimension) | float32 data

#include <cstring>
#include <filesystem>
#include <fstream>

#include "gar/core/hash.hpp"
#include "gar/memory/memory.hpp"

namespace gar::memory {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'G', 'A', 'R', 'E', 'M', 'B', '0', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& data;
  std::size_t pos = 0;
  std::string path;

  [[noreturn]] void corrupt(const std::string& why) const {
    throw Error(Errc::CorruptIndex, path + ": " + why, {{"path", path}, {"offset", pos}});
  }
  void need(std::size_t n) const {
    if (data.size() - pos < n) corrupt("truncated");
  }
  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += static_cast<std::size_t>(bytes);
    return v;
  }
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path, {{"path", path}});
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

json parse_line(const std::string& line, const std::string& path, std::size_t n) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Errc::CorruptIndex, path + ": line " + std::to_string(n) + " is not a JSON object",
                {{"path", path}, {"line", n}});
  }
  return j;
}

}  // namespace

void write_embeddings(const std::string& path, const std::string& model_id,
                      const std::vector<std::vector<float>>& vectors) {
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, static_cast<std::uint32_t>(model_id.size()));
  out += model_id;
  put_u64(out, vectors.size());
  std::uint64_t offset = 0;
  for (const auto& v : vectors) {
    put_u64(out, offset);
    put_u32(out, static_cast<std::uint32_t>(v.size()));
    offset += 4 * v.size();
  }
  for (const auto& v : vectors) {
    for (float f : v) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, &f, 4);
      put_u32(out, bits);
    }
  }
  write_file(path, out);
}

std::pair<std::string, std::vector<std::vector<float>>> read_embeddings(const std::string& path) {
  const std::string data = read_file(path);
  Reader r{data, 0, path};
  r.need(sizeof kMagic);
  if (std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) r.corrupt("bad magic");
  r.pos = sizeof kMagic;
  const auto model_len = static_cast<std::size_t>(r.uint(4));
  r.need(model_len);
  std::string model_id = data.substr(r.pos, model_len);
  r.pos += model_len;
  const std::uint64_t count = r.uint(8);
  if (count > data.size()) r.corrupt("implausible vector count");
  std::vector<std::pair<std::uint64_t, std::uint32_t>> table;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t off = r.uint(8);
    const auto dim = static_cast<std::uint32_t>(r.uint(4));
    table.emplace_back(off, dim);
  }
  const std::size_t base = r.pos;
  std::vector<std::vector<float>> vectors;
  for (const auto& [off, dim] : table) {
    r.pos = base + off;
    if (base + off > data.size()) r.corrupt("offset past end of file");
    std::vector<float> v(dim);
    for (auto& f : v) {
      const auto bits = static_cast<std::uint32_t>(r.uint(4));
      std::memcpy(&f, &bits, 4);
    }
    vectors.push_back(std::move(v));
  }
  return {model_id, vectors};
}

void save_index(const MemoryIndex& index, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string lines;
  std::vector<std::vector<float>> vectors;
  for (std::size_t i = 0; i < index.entries().size(); ++i) {
    const auto& e = index.entries()[i];
    lines += json{{"paper_id", e.paper_id},
                  {"community_id", e.community_id},
                  {"descriptor_text", e.descriptor_text},
                  {"review_snippet", e.review_snippet},
                  {"embedding", i}}
                 .dump() +
             "\n";
    vectors.push_back(e.embedding.values);
  }
  write_file(dir + "/entries.jsonl", lines);
  write_embeddings(dir + "/embeddings.bin", index.model_id(), vectors);
}

MemoryIndex load_index(const std::string& dir) {
  const std::string entries_path = dir + "/entries.jsonl";
  const auto [model_id, vectors] = read_embeddings(dir + "/embeddings.bin");
  std::vector<MemoryEntry> entries;
  std::size_t n = 0;
  for (const auto& line : read_lines(entries_path)) {
    const json j = parse_line(line, entries_path, ++n);
    try {
      MemoryEntry e;
      j.at("paper_id").get_to(e.paper_id);
      j.at("community_id").get_to(e.community_id);
      j.at("descriptor_text").get_to(e.descriptor_text);
      j.at("review_snippet").get_to(e.review_snippet);
      const auto k = j.at("embedding").get<std::size_t>();
      if (k >= vectors.size()) throw Error(Errc::CorruptIndex, "embedding index out of range");
      e.embedding = {vectors[k], model_id};
      entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(Errc::CorruptIndex, entries_path + ": line " + std::to_string(n) + ": " + ex.what(),
                  {{"path", entries_path}, {"line", n}});
    }
  }
  return MemoryIndex(std::move(entries));
}

void save_meta_memory(const MetaMemory& memory, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string lines;
  std::vector<std::vector<float>> vectors;
  std::string model_id;
  for (const auto& e : memory.entries()) {
    json ids = json::array();
    for (const auto& v : e.graph_signature) {
      ids.push_back(vectors.size());
      vectors.push_back(v.values);
      model_id = v.model_id;
    }
    lines += json{{"paper_id", e.paper_id}, {"meta_review_text", e.meta_review_text}, {"graph_signature", ids}}.dump() +
             "\n";
  }
  write_file(dir + "/meta_entries.jsonl", lines);
  write_embeddings(dir + "/meta_embeddings.bin", model_id, vectors);
}

MetaMemory load_meta_memory(const std::string& dir) {
  const std::string entries_path = dir + "/meta_entries.jsonl";
  const auto [model_id, vectors] = read_embeddings(dir + "/meta_embeddings.bin");
  std::vector<MetaMemoryEntry> entries;
  std::size_t n = 0;
  for (const auto& line : read_lines(entries_path)) {
    const json j = parse_line(line, entries_path, ++n);
    try {
      MetaMemoryEntry e;
      j.at("paper_id").get_to(e.paper_id);
      j.at("meta_review_text").get_to(e.meta_review_text);
      for (const auto& k : j.at("graph_signature")) {
        const auto idx = k.get<std::size_t>();
        if (idx >= vectors.size()) throw Error(Errc::CorruptIndex, "embedding index out of range");
        e.graph_signature.push_back({vectors[idx], model_id});
      }
      entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(Errc::CorruptIndex, entries_path + ": line " + std::to_string(n) + ": " + ex.what(),
                  {{"path", entries_path}, {"line", n}});
    }
  }
  return MetaMemory(std::move(entries));
}

}  // namespace gar::memory
