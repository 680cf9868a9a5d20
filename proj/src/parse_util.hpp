#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cubefold/error.hpp"

namespace cubefold::detail {

inline bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'))
      return false;
  return true;
}

struct LineTokens {
  int line;
  std::vector<std::string> tokens;
};

// Shared line tokenizer for all file grammars: '#' comments, blank lines
// skipped, ':' ',' and '->' split off as their own tokens.
inline std::vector<LineTokens> tokenize_lines(std::string_view text) {
  std::vector<LineTokens> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    LineTokens lt{line_no, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      char c = line[i];
      if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
      if (c == ':' || c == ',') { lt.tokens.push_back(std::string(1, c)); ++i; continue; }
      if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
        lt.tokens.push_back("->");
        i += 2;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
             line[j] != ':' && line[j] != ',' &&
             !(line[j] == '-' && j + 1 < line.size() && line[j + 1] == '>'))
        ++j;
      lt.tokens.push_back(std::string(line.substr(i, j - i)));
      i = j;
    }
    if (!lt.tokens.empty()) out.push_back(std::move(lt));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

[[noreturn]] inline void parse_error(int line, int col, const std::string& message) {
  fail_validation("ParseError", "line " + std::to_string(line) + ", column " +
                                    std::to_string(col) + ": " + message);
}

inline void require_name(const std::string& tok, int line, int col) {
  if (!valid_name(tok)) parse_error(line, col, "expected NAME, got '" + tok + "'");
}

}  // namespace cubefold::detail
