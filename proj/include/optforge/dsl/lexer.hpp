// Copyright 2026 The optforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "optforge/dsl/ast.hpp"

namespace optforge::dsl {

enum class Tok {
  Ident,
  Int,
  Real,
  Colon,
  Equals,
  Arrow,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Bar,
  Star,
  Minus,
  End,
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Real: return "number";
    case Tok::Colon: return "':'";
    case Tok::Equals: return "'='";
    case Tok::Arrow: return "'->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Bar: return "'|'";
    case Tok::Star: return "'*'";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Pos pos;
};

/// Splits circuit text into tokens. `#` starts a comment running to the end
/// of the line; non-ASCII bytes are only accepted inside comments.
inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;  // count code points, not bytes
      }
    }
  };
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, std::string(src.substr(i, len)), {line, col}});
    advance(len);
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                src[j] == '\''))
        ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(uc) || (c == '.' && i + 1 < src.size() &&
                             std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool real = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        real = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          real = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        } else {
          throw DslError(DslError::Kind::Lexical, {line, col},
                         "malformed exponent in number '" + std::string(src.substr(i, k - i)) + "'");
        }
      }
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        throw DslError(DslError::Kind::Lexical, {line, col},
                       "malformed number '" + std::string(src.substr(i, j + 1 - i)) + "'");
      }
      push(real ? Tok::Real : Tok::Int, j - i);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      push(Tok::Arrow, 2);
      continue;
    }
    Tok k;
    switch (c) {
      case ':': k = Tok::Colon; break;
      case '=': k = Tok::Equals; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case '|': k = Tok::Bar; break;
      case '*': k = Tok::Star; break;
      case '-': k = Tok::Minus; break;
      default: {
        std::string shown;
        if (uc < 0x20 || uc >= 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "0x%02X", uc);
          shown = buf;
        } else {
          shown = std::string("'") + c + "'";
        }
        throw DslError(DslError::Kind::Lexical, {line, col}, "unexpected character " + shown);
      }
    }
    push(k, 1);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

}  // namespace optforge::dsl
