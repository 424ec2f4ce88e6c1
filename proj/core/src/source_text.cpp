// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <cctype>
#include <string>

#include "vdpost/corpus.hpp"

namespace vdpost {

namespace {

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

// R"delim( starts a raw string when the R is a bare prefix (R, LR, uR, UR, u8R).
bool raw_string_prefix(std::string_view code, std::size_t quote) {
  if (quote == 0 || code[quote - 1] != 'R') return false;
  std::size_t start = quote - 1;
  if (start >= 2 && code.substr(start - 2, 2) == "u8") start -= 2;
  else if (start >= 1 && (code[start - 1] == 'L' || code[start - 1] == 'u' || code[start - 1] == 'U')) start -= 1;
  return start == 0 || !is_ident(code[start - 1]);
}

}  // namespace

StrippedSource strip_comments(std::string_view code) {
  StrippedSource out;
  std::string& text = out.text;
  text.reserve(code.size());
  const std::size_t n = code.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = code[i];
    if (c == '/' && i + 1 < n && code[i + 1] == '/') {
      while (i < n && code[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && code[i + 1] == '*') {
      text += ' ';
      i += 2;
      bool closed = false;
      while (i < n) {
        if (code[i] == '*' && i + 1 < n && code[i + 1] == '/') {
          i += 2;
          closed = true;
          break;
        }
        if (code[i] == '\n') text += '\n';
        ++i;
      }
      if (!closed) out.unterminated_comment = true;
      continue;
    }
    if (c == '"' && raw_string_prefix(code, i)) {
      const std::size_t open = code.find('(', i + 1);
      if (open != std::string_view::npos) {
        const std::string terminator = ")" + std::string(code.substr(i + 1, open - i - 1)) + "\"";
        const std::size_t close = code.find(terminator, open + 1);
        const std::size_t end = close == std::string_view::npos ? n : close + terminator.size();
        text.append(code.substr(i, end - i));
        i = end;
        continue;
      }
    }
    if (c == '"' || (c == '\'' && !(i > 0 && is_hex(code[i - 1])))) {
      // Ordinary string or character literal; ends at the matching quote or
      // at an unescaped newline.
      text += c;
      ++i;
      while (i < n) {
        const char d = code[i];
        if (d == '\\' && i + 1 < n) {
          text += d;
          text += code[i + 1];
          i += 2;
          continue;
        }
        text += d;
        ++i;
        if (d == c || d == '\n') break;
      }
      continue;
    }
    text += c;
    ++i;
  }
  return out;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(c);
  }
  return out;
}

}  // namespace vdpost
