#include "hoarefix/lexer.hpp"

#include <array>
#include <cctype>

#include "hoarefix/lang.hpp"

namespace hoarefix::lang {

namespace {

constexpr std::array<std::string_view, 13> kMultiCharPunct = {
    "<==>", "==>", "<==", ":=", "==", "!=", "<=", ">=", "&&", "||", "::", "..", "=>",
};

constexpr std::string_view kSingleCharPunct = "(){}[],;:+-*/%<>!.|=&";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '?';
}

}  // namespace

LexResult tokenize(std::string_view src) {
  LexResult out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      const std::size_t end = src.find('\n', i);
      const std::size_t len = (end == std::string_view::npos ? src.size() : end) - i;
      std::string text(src.substr(i, len));
      if (!text.empty() && text.back() == '\r') text.pop_back();
      out.comments.push_back(Comment{line, col, std::move(text)});
      advance(len);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      const int start_line = line;
      const int start_col = col;
      const std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw SyntaxError(start_line, start_col, "end of block comment");
      advance(end + 2 - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.tokens.push_back(Token{TokenKind::Identifier, std::string(src.substr(i, j - i)), line, col});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.tokens.push_back(Token{TokenKind::Integer, std::string(src.substr(i, j - i)), line, col});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (std::string_view p : kMultiCharPunct) {
      if (src.substr(i, p.size()) == p) {
        out.tokens.push_back(Token{TokenKind::Punct, std::string(p), line, col});
        advance(p.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSingleCharPunct.find(c) != std::string_view::npos) {
      out.tokens.push_back(Token{TokenKind::Punct, std::string(1, c), line, col});
      advance(1);
      continue;
    }
    throw SyntaxError(line, col, "a token (found unexpected character)");
  }
  out.tokens.push_back(Token{TokenKind::End, "", line, col});
  return out;
}

}  // namespace hoarefix::lang
