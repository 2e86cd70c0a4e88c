// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gar::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);

/// Splits on a single delimiter character; keeps empty pieces.
std::vector<std::string> split(std::string_view s, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Collapses every whitespace run to one space and trims both ends.
std::string squash_whitespace(std::string_view s);

/// Lowercase alphanumeric word tokens.
std::vector<std::string> words(std::string_view s);

/// ceil(bytes / 4); the corpus-wide token estimate.
int estimate_tokens(std::string_view s);

}  // namespace gar::text
