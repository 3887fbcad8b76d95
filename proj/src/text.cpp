#include "litscape/text.hpp"

#include <string>

namespace litscape::text {

namespace {

// Length of the UTF-8 sequence starting at byte c; 1 for stray bytes.
std::size_t seq_len(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xE) return 3;
  if ((c >> 3) == 0x1E) return 4;
  return 1;
}

std::size_t advance(std::string_view s, std::size_t i) {
  std::size_t n = seq_len(static_cast<unsigned char>(s[i]));
  if (i + n > s.size()) return i + 1;
  for (std::size_t j = 1; j < n; ++j) {
    if ((static_cast<unsigned char>(s[i + j]) & 0xC0) != 0x80) return i + 1;
  }
  return i + n;
}

}  // namespace

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i = advance(s, i)) ++n;
  return n;
}

std::size_t utf8_byte_offset(std::string_view s, std::size_t code_points) {
  std::size_t i = 0;
  for (std::size_t n = 0; n < code_points; ++n) {
    if (i >= s.size()) return std::string_view::npos;
    i = advance(s, i);
  }
  return i;
}

std::size_t utf8_code_points_before(std::string_view s, std::size_t byte_offset) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < byte_offset && i < s.size(); i = advance(s, i)) ++n;
  return n;
}

bool utf8_substr(std::string_view s, std::size_t start, std::size_t end, std::string& out) {
  if (end < start) return false;
  std::size_t b = utf8_byte_offset(s, start);
  if (b == std::string_view::npos) return false;
  std::size_t e = b;
  for (std::size_t n = start; n < end; ++n) {
    if (e >= s.size()) return false;
    e = advance(s, e);
  }
  out.assign(s.substr(b, e - b));
  return true;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  if (u >= 0x80) return false;
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
         (u >= 123 && u <= 126);
}

std::string normalize_term(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    std::size_t e = i;
    while (b < e && is_punct(s[b])) ++b;
    while (e > b && is_punct(s[e - 1])) --e;
    if (b == e) continue;
    if (!out.empty()) out.push_back(' ');
    out += ascii_lower(s.substr(b, e - b));
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t b = 0;
  for (;;) {
    std::size_t e = s.find(sep, b);
    if (e == std::string_view::npos) {
      parts.push_back(s.substr(b));
      return parts;
    }
    parts.push_back(s.substr(b, e - b));
    b = e + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string tsv_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace litscape::text
