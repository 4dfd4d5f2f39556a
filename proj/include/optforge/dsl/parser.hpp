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

#include <charconv>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "optforge/dsl/lexer.hpp"

namespace optforge::dsl {

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {"system", "state", "effect", "channel", "test",
                                              "circuit", "swap",  "id",     "kraus",   "I"};
  return words;
}

inline const std::set<std::string>& builtin_names() {
  static const std::set<std::string> names = {"ket0", "ket1",    "bell",
                                              "maximally_mixed", "discard",
                                              "computational_measurement"};
  return names;
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Circuit file() {
    Circuit c;
    while (peek().kind == Tok::Ident && peek().text != "circuit") {
      c.decls.push_back(decl());
    }
    if (peek().kind != Tok::Ident) fail("expected a declaration or 'circuit'");
    next();
    expect(Tok::Equals, "after 'circuit'");
    c.wiring = expr();
    if (peek().kind != Tok::End) fail("expected ';', '|' or end of input after the wiring expression");
    return c;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    if (t.kind == Tok::End) throw DslError(DslError::Kind::Syntax, t.pos, "unexpected end of input: " + what);
    throw DslError(DslError::Kind::Syntax, t.pos, what + ", found '" + t.text + "'");
  }

  const Token& expect(Tok k, const std::string& context) {
    if (peek().kind != k) fail(std::string("expected ") + tok_name(k) + " " + context);
    return next();
  }

  std::string name(const std::string& context) {
    if (peek().kind != Tok::Ident) fail("expected an identifier " + context);
    if (reserved_words().count(peek().text)) fail("'" + peek().text + "' is reserved; expected an identifier " + context);
    return next().text;
  }

  void declare(const std::string& n, Decl::Kind kind, Pos p) {
    auto [it, fresh] = declared_.emplace(n, std::make_pair(kind, p));
    if (!fresh) {
      throw DslError(DslError::Kind::Duplicate, p,
                     "'" + n + "' is already declared at " + to_string(it->second.second));
    }
  }

  Decl decl() {
    Decl d;
    const Token& kw = next();
    d.pos = kw.pos;
    if (kw.text == "system") {
      d.kind = Decl::Kind::System;
      const Pos np = peek().pos;
      d.name = name("after 'system'");
      expect(Tok::Colon, "after the system name");
      if (peek().kind != Tok::Ident) fail("expected a theory name");
      d.theory = next().text;
      expect(Tok::LParen, "after the theory name");
      const Token& n = expect(Tok::Int, "as the system dimension");
      const auto r = std::from_chars(n.text.data(), n.text.data() + n.text.size(), d.dim);
      if (r.ec != std::errc()) throw DslError(DslError::Kind::Lexical, n.pos, "dimension '" + n.text + "' is out of range");
      expect(Tok::RParen, "after the system dimension");
      declare(d.name, d.kind, np);
      return d;
    }
    if (kw.text == "state" || kw.text == "effect" || kw.text == "channel" || kw.text == "test") {
      d.kind = kw.text == "state"    ? Decl::Kind::State
               : kw.text == "effect" ? Decl::Kind::Effect
               : kw.text == "channel" ? Decl::Kind::Channel
                                      : Decl::Kind::Test;
      const Pos np = peek().pos;
      d.name = name("after '" + kw.text + "'");
      expect(Tok::Colon, "after the name");
      if (d.kind == Decl::Kind::State) {
        d.out = sys();
      } else if (d.kind == Decl::Kind::Effect) {
        d.in = sys();
      } else {
        d.in = sys();
        expect(Tok::Arrow, "between input and output systems");
        d.out = sys();
      }
      expect(Tok::Equals, "before the definition");
      if (d.kind == Decl::Kind::Test && peek().kind == Tok::LBrace) {
        next();
        std::set<std::string> seen;
        do {
          Branch b;
          b.pos = peek().pos;
          if (peek().kind != Tok::Ident && peek().kind != Tok::Int) fail("expected an outcome label");
          b.outcome = next().text;
          if (!seen.insert(b.outcome).second) {
            throw DslError(DslError::Kind::Duplicate, b.pos,
                           "outcome '" + b.outcome + "' appears twice in test '" + d.name + "'");
          }
          expect(Tok::Colon, "after the outcome label");
          b.literal = literal();
          d.branches.push_back(std::move(b));
        } while (peek().kind == Tok::Comma && (next(), true));
        expect(Tok::RBrace, "to close the test");
      } else {
        d.literal = literal();
      }
      declare(d.name, d.kind, np);
      return d;
    }
    throw DslError(DslError::Kind::Syntax, kw.pos,
                   "expected a declaration (system, state, effect, channel, test) or 'circuit', found '" +
                       kw.text + "'");
  }

  SysExpr sys() {
    SysExpr s;
    s.pos = peek().pos;
    if (peek().kind == Tok::Ident && peek().text == "I") {
      next();
      return s;
    }
    for (;;) {
      const Pos p = peek().pos;
      std::string n = name("as a system");
      auto it = declared_.find(n);
      if (it == declared_.end()) {
        throw DslError(DslError::Kind::Unresolved, p, "unknown system '" + n + "'");
      }
      if (it->second.first != Decl::Kind::System) {
        throw DslError(DslError::Kind::Unresolved, p, "'" + n + "' is not a system");
      }
      s.factors.push_back(std::move(n));
      if (peek().kind != Tok::Star) break;
      next();
    }
    return s;
  }

  Number number() {
    Number x;
    if (peek().kind == Tok::LParen) {
      next();
      x.re = real();
      expect(Tok::Comma, "inside a complex pair");
      x.im = real();
      expect(Tok::RParen, "to close a complex pair");
      x.pair = true;
      return x;
    }
    x.re = real();
    return x;
  }

  double real() {
    bool neg = false;
    if (peek().kind == Tok::Minus) {
      next();
      neg = true;
    }
    if (peek().kind != Tok::Int && peek().kind != Tok::Real) fail("expected a number");
    const Token& t = next();
    double v = 0;
    const auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (r.ec != std::errc() || r.ptr != t.text.data() + t.text.size()) {
      throw DslError(DslError::Kind::Lexical, t.pos, "number '" + t.text + "' is out of range");
    }
    return neg ? -v : v;
  }

  Row row() {
    expect(Tok::LBracket, "to open a row");
    Row r;
    r.push_back(number());
    while (peek().kind == Tok::Comma) {
      next();
      r.push_back(number());
    }
    expect(Tok::RBracket, "to close a row");
    return r;
  }

  MatrixLit matrix() {
    expect(Tok::LBracket, "to open a matrix");
    MatrixLit m;
    m.push_back(row());
    while (peek().kind == Tok::Comma) {
      next();
      m.push_back(row());
    }
    expect(Tok::RBracket, "to close a matrix");
    return m;
  }

  Literal literal() {
    Literal l;
    l.pos = peek().pos;
    if (peek().kind == Tok::Ident && peek().text == "kraus") {
      next();
      l.kind = Literal::Kind::Kraus;
      expect(Tok::LBrace, "after 'kraus'");
      l.kraus.push_back(matrix());
      while (peek().kind == Tok::Comma) {
        next();
        l.kraus.push_back(matrix());
      }
      expect(Tok::RBrace, "to close the Kraus family");
      return l;
    }
    if (peek().kind == Tok::Ident) {
      const Token& t = next();
      if (!builtin_names().count(t.text)) {
        throw DslError(DslError::Kind::Unresolved, t.pos, "unknown builtin '" + t.text + "'");
      }
      l.kind = Literal::Kind::Builtin;
      l.builtin = t.text;
      return l;
    }
    if (peek().kind == Tok::LBracket) {
      if (peek(1).kind == Tok::LBracket) {
        l.kind = Literal::Kind::Matrix;
        l.matrix = matrix();
      } else {
        l.kind = Literal::Kind::Vector;
        l.matrix = {row()};
      }
      return l;
    }
    fail("expected a literal (builtin, vector, matrix or kraus{...})");
  }

  // expr := par (";" par)* ; par := atom ("|" atom)*
  ExprPtr expr() {
    ExprPtr lhs = par();
    while (peek().kind == Tok::Semi) {
      const Pos p = next().pos;
      lhs = Expr::seq(lhs, par(), p);
    }
    return lhs;
  }

  ExprPtr par() {
    ExprPtr lhs = atom();
    while (peek().kind == Tok::Bar) {
      const Pos p = next().pos;
      lhs = Expr::par(lhs, atom(), p);
    }
    return lhs;
  }

  ExprPtr atom() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      next();
      ExprPtr e = expr();
      expect(Tok::RParen, "to close the parenthesis");
      return e;
    }
    if (t.kind == Tok::Ident && t.text == "swap") {
      const Pos p = next().pos;
      expect(Tok::LParen, "after 'swap'");
      SysExpr a = sys();
      expect(Tok::Comma, "between swap arguments");
      SysExpr b = sys();
      expect(Tok::RParen, "after swap arguments");
      return Expr::swap(std::move(a), std::move(b), p);
    }
    if (t.kind == Tok::Ident && t.text == "id") {
      const Pos p = next().pos;
      expect(Tok::LParen, "after 'id'");
      SysExpr a = sys();
      expect(Tok::RParen, "after the id argument");
      return Expr::id(std::move(a), p);
    }
    if (t.kind == Tok::Ident && !reserved_words().count(t.text)) {
      const Pos p = t.pos;
      std::string n = next().text;
      auto it = declared_.find(n);
      if (it == declared_.end()) throw DslError(DslError::Kind::Unresolved, p, "unknown box '" + n + "'");
      if (it->second.first == Decl::Kind::System) {
        throw DslError(DslError::Kind::Unresolved, p, "'" + n + "' is a system, not a box; use id(" + n + ")");
      }
      return Expr::ref(std::move(n), p);
    }
    fail("expected a box name, '(', swap(...) or id(...)");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::pair<Decl::Kind, Pos>> declared_;
};

}  // namespace detail

/// Parses a circuit file. Throws DslError with the source position.
inline Circuit parse(std::string_view text) { return detail::Parser(text).file(); }

}  // namespace optforge::dsl
