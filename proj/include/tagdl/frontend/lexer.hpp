#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tagdl/error.hpp"

namespace tagdl {

struct Token {
  enum class Kind { Ident, Int, Float, String, Char, Punct, End };
  Kind kind = Kind::End;
  /// Identifier name, punctuation symbol, or literal source text.
  std::string text;
  /// Decoded contents of string and char literals.
  std::u32string decoded;
  unsigned __int128 int_value = 0;
  double float_value = 0;
  SourceLocation loc;

  bool is(std::string_view punct) const { return kind == Kind::Punct && text == punct; }
  bool is_ident(std::string_view name) const { return kind == Kind::Ident && text == name; }
};

/// Splits source text into tokens, ending with an End token. `//` and
/// `/* */` comments are skipped.
std::vector<Token> tokenize(std::string_view source, const std::string& file);

std::string describe(const Token& t);

}  // namespace tagdl
