#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tj::text {

// Collapses runs of XML whitespace to one space and trims both ends.
std::string normalize_space(std::string_view s);

// Simple case folding: ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
std::string casefold(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

// Greedy word wrap; words longer than width get a line of their own.
std::vector<std::string> wrap(std::string_view paragraph, std::size_t width);

bool starts_with_ci(std::string_view s, std::string_view prefix);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace tj::text
