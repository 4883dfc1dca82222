#include "tagdl/frontend/lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "tagdl/value.hpp"

namespace tagdl {

namespace {

// Longest symbols first so that prefixes do not win.
constexpr std::array<std::string_view, 32> kPunct = {
    "::", ":=", ":-", "==", "!=", "<=", ">=", "&&", "||", "<:", "(", ")", "{", "}", "[", "]",
    ",",  ";",  ":",  "=",  "<",  ">",  "+",  "-",  "*",  "/",  "%",  "!", ".", "@", "$", "_",
};

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.loc = here();
      if (pos_ >= src_.size()) {
        t.kind = Token::Kind::End;
        out.push_back(std::move(t));
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) ||
                 (c == '_' && pos_ + 1 < src_.size() && is_ident_char(src_[pos_ + 1]))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        t.kind = Token::Kind::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (c == '"') {
        quoted(t, '"');
        t.kind = Token::Kind::String;
      } else if (c == '\'') {
        quoted(t, '\'');
        t.kind = Token::Kind::Char;
        if (t.decoded.size() != 1) throw CompileError(t.loc, "character literal must hold exactly one character");
      } else {
        punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  SourceLocation here() const { return {file_, line_, column_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        const auto start = here();
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw CompileError(start, "unterminated block comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void number(Token& t) {
    const std::size_t start = pos_;
    bool is_float = false;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    };
    digits();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_float = true;
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      auto save_col = column_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        is_float = true;
        digits();
      } else {
        pos_ = save;
        column_ = save_col;
      }
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    if (is_float) {
      t.kind = Token::Kind::Float;
      t.float_value = std::strtod(t.text.c_str(), nullptr);
      return;
    }
    t.kind = Token::Kind::Int;
    unsigned __int128 v = 0;
    for (char d : t.text) {
      v = v * 10 + static_cast<unsigned>(d - '0');
      if (v > static_cast<unsigned __int128>(UINT64_MAX)) throw CompileError(t.loc, "integer literal too large");
    }
    t.int_value = v;
  }

  char32_t escape(const SourceLocation& loc) {
    if (pos_ >= src_.size()) throw CompileError(loc, "unterminated literal");
    const char c = src_[pos_];
    advance();
    switch (c) {
      case 'n': return U'\n';
      case 't': return U'\t';
      case 'r': return U'\r';
      case '0': return U'\0';
      case '\\': return U'\\';
      case '"': return U'"';
      case '\'': return U'\'';
      case 'u': {
        if (pos_ >= src_.size() || src_[pos_] != '{') throw CompileError(loc, "expected `{` after \\u");
        advance();
        std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '}') advance();
        if (pos_ >= src_.size()) throw CompileError(loc, "unterminated unicode escape");
        std::uint32_t cp = 0;
        auto hex = src_.substr(start, pos_ - start);
        auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
        if (ec != std::errc() || p != hex.data() + hex.size() || cp > 0x10FFFF) {
          throw CompileError(loc, "invalid unicode escape");
        }
        advance();
        return cp;
      }
      default: throw CompileError(loc, std::string("unknown escape \\") + c);
    }
  }

  char32_t utf8_char(const SourceLocation& loc) {
    const auto b0 = static_cast<unsigned char>(src_[pos_]);
    std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || pos_ + len > src_.size()) throw CompileError(loc, "invalid UTF-8 in literal");
    char32_t cp = len == 1 ? b0 : b0 & (0x7F >> len);
    for (std::size_t i = 1; i < len; ++i) {
      const auto b = static_cast<unsigned char>(src_[pos_ + i]);
      if ((b & 0xC0) != 0x80) throw CompileError(loc, "invalid UTF-8 in literal");
      cp = cp << 6 | (b & 0x3F);
    }
    for (std::size_t i = 0; i < len; ++i) advance();
    return cp;
  }

  void quoted(Token& t, char quote) {
    const std::size_t start = pos_;
    advance();
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') throw CompileError(t.loc, "unterminated literal");
      const char c = src_[pos_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        t.decoded.push_back(escape(t.loc));
      } else {
        t.decoded.push_back(utf8_char(t.loc));
      }
    }
    t.text = std::string(src_.substr(start, pos_ - start));
  }

  void punct(Token& t) {
    for (auto p : kPunct) {
      if (src_.substr(pos_, p.size()) == p) {
        t.kind = Token::Kind::Punct;
        t.text = std::string(p);
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        return;
      }
    }
    throw CompileError(t.loc, "unexpected character `" + std::string(1, src_[pos_]) + "`");
  }

  std::string_view src_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& file) { return Lexer(source, file).run(); }

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::Ident: return "identifier `" + t.text + "`";
    case Token::Kind::Int:
    case Token::Kind::Float: return "number `" + t.text + "`";
    case Token::Kind::String: return "string " + t.text;
    case Token::Kind::Char: return "character " + t.text;
    case Token::Kind::Punct: return "`" + t.text + "`";
  }
  return t.text;
}

}  // namespace tagdl
