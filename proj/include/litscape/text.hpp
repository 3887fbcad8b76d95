#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace litscape::text {

// UTF-8 helpers. Malformed sequences are treated as single bytes.
std::size_t utf8_length(std::string_view s);
// Byte offset of the given code point index; npos when past the end.
std::size_t utf8_byte_offset(std::string_view s, std::size_t code_points);
// Code point index of the given byte offset.
std::size_t utf8_code_points_before(std::string_view s, std::size_t byte_offset);
// Substring addressed by code point offsets [start, end); false when out of range.
bool utf8_substr(std::string_view s, std::size_t start, std::size_t end, std::string& out);

std::string ascii_lower(std::string_view s);
bool is_space(char c);
// ASCII punctuation only; UTF-8 bytes are never punctuation.
bool is_punct(char c);

// Lowercase, collapse whitespace runs to a single space, strip punctuation
// at the edges of every whitespace-separated token. Tokens that become empty vanish.
std::string normalize_term(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Escapes tab, newline, carriage return and backslash for TSV cells.
std::string tsv_escape(std::string_view s);

}  // namespace litscape::text
