// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gar {

/// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

/// Stable 64-bit FNV-1a; used where a cheap, platform-independent hash is enough.
constexpr std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Derives a child seed from a master seed and a label via SHA-256, so module
/// seeds stay stable when unrelated modules are added.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// Reads a whole file; throws Error(Io) when it cannot be opened.
std::string read_file(const std::string& path);

/// Writes a whole file, creating parent directories.
void write_file(const std::string& path, std::string_view contents);

}  // namespace gar
