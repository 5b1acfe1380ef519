#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hoarefix::lang {

enum class TokenKind { Identifier, Integer, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 0;
  int column = 0;

  bool is(std::string_view s) const { return kind != TokenKind::End && kind != TokenKind::Integer && text == s; }
};

struct Comment {
  int line = 0;
  int column = 0;
  std::string text;  // including the leading `//`
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by an End token
  std::vector<Comment> comments;
};

/// Throws SyntaxError on characters outside the language.
LexResult tokenize(std::string_view source);

}  // namespace hoarefix::lang
