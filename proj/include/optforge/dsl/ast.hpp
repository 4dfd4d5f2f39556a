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

#include <memory>
#include <string>
#include <vector>

#include "optforge/system.hpp"

namespace optforge::dsl {

/// 1-based source position.
struct Pos {
  int line = 1;
  int col = 1;
};

inline std::string to_string(const Pos& p) {
  return std::to_string(p.line) + ":" + std::to_string(p.col);
}

/// Circuit-file error. `what()` starts with "line:col: <kind>".
class DslError : public Error {
 public:
  enum class Kind {
    Lexical,
    Syntax,
    Duplicate,
    Unresolved,
    Literal,
    WireMismatch,
    OpenWires,
    NotNormalized,
  };

  DslError(Kind kind, Pos pos, const std::string& message)
      : Error(to_string(pos) + ": " + kind_name(kind) + ": " + message), kind_(kind), pos_(pos) {}

  Kind kind() const { return kind_; }
  const Pos& pos() const { return pos_; }

  static std::string kind_name(Kind k) {
    switch (k) {
      case Kind::Lexical: return "lexical error";
      case Kind::Syntax: return "syntax error";
      case Kind::Duplicate: return "duplicate identifier";
      case Kind::Unresolved: return "unresolved identifier";
      case Kind::Literal: return "invalid literal";
      case Kind::WireMismatch: return "wire mismatch";
      case Kind::OpenWires: return "open wires";
      case Kind::NotNormalized: return "test not normalized";
    }
    return "error";
  }

 private:
  Kind kind_;
  Pos pos_;
};

/// "I" (no factors) or A*B*... over declared system names.
struct SysExpr {
  std::vector<std::string> factors;
  Pos pos;

  bool is_trivial() const { return factors.empty(); }
  friend bool operator==(const SysExpr& a, const SysExpr& b) { return a.factors == b.factors; }
};

/// A literal entry; `pair` records that it was written as (re, im).
struct Number {
  double re = 0;
  double im = 0;
  bool pair = false;
  friend bool operator==(const Number&, const Number&) = default;
};

using Row = std::vector<Number>;
using MatrixLit = std::vector<Row>;

struct Literal {
  enum class Kind { Builtin, Vector, Matrix, Kraus };
  Kind kind = Kind::Builtin;
  std::string builtin;
  MatrixLit matrix;                // Vector: exactly one row
  std::vector<MatrixLit> kraus;
  Pos pos;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.kind == b.kind && a.builtin == b.builtin && a.matrix == b.matrix && a.kraus == b.kraus;
  }
};

struct Branch {
  std::string outcome;
  Literal literal;
  Pos pos;
  friend bool operator==(const Branch& a, const Branch& b) {
    return a.outcome == b.outcome && a.literal == b.literal;
  }
};

struct Decl {
  enum class Kind { System, State, Effect, Channel, Test };
  Kind kind = Kind::System;
  std::string name;
  Pos pos;
  // system
  std::string theory;
  int dim = 0;
  // boxes; states have a trivial input, effects a trivial output
  SysExpr in, out;
  Literal literal;                 // state/effect/channel, or a builtin test body
  std::vector<Branch> branches;    // explicit test body

  friend bool operator==(const Decl& a, const Decl& b) {
    return a.kind == b.kind && a.name == b.name && a.theory == b.theory && a.dim == b.dim &&
           a.in == b.in && a.out == b.out && a.literal == b.literal && a.branches == b.branches;
  }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Wiring expression. `;` is diagram (temporal) order, `|` is parallel.
struct Expr {
  enum class Kind { Seq, Par, Swap, Id, Ref };
  Kind kind = Kind::Ref;
  ExprPtr lhs, rhs;                // Seq, Par
  SysExpr a, b;                    // Swap(a, b), Id(a)
  std::string name;                // Ref
  Pos pos;

  static ExprPtr seq(ExprPtr l, ExprPtr r, Pos p = {}) {
    return std::make_shared<Expr>(Expr{Kind::Seq, std::move(l), std::move(r), {}, {}, {}, p});
  }
  static ExprPtr par(ExprPtr l, ExprPtr r, Pos p = {}) {
    return std::make_shared<Expr>(Expr{Kind::Par, std::move(l), std::move(r), {}, {}, {}, p});
  }
  static ExprPtr ref(std::string n, Pos p = {}) {
    return std::make_shared<Expr>(Expr{Kind::Ref, {}, {}, {}, {}, std::move(n), p});
  }
  static ExprPtr id(SysExpr s, Pos p = {}) {
    return std::make_shared<Expr>(Expr{Kind::Id, {}, {}, std::move(s), {}, {}, p});
  }
  static ExprPtr swap(SysExpr s, SysExpr t, Pos p = {}) {
    return std::make_shared<Expr>(Expr{Kind::Swap, {}, {}, std::move(s), std::move(t), {}, p});
  }
};

/// Structural equality; positions are ignored.
inline bool same(const Expr& x, const Expr& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Seq:
    case Expr::Kind::Par: return same(*x.lhs, *y.lhs) && same(*x.rhs, *y.rhs);
    case Expr::Kind::Swap: return x.a == y.a && x.b == y.b;
    case Expr::Kind::Id: return x.a == y.a;
    case Expr::Kind::Ref: return x.name == y.name;
  }
  return false;
}

struct Circuit {
  std::vector<Decl> decls;
  ExprPtr wiring;

  const Decl* find(const std::string& name) const {
    for (const Decl& d : decls)
      if (d.name == name) return &d;
    return nullptr;
  }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.decls == b.decls && ((!a.wiring && !b.wiring) ||
                                  (a.wiring && b.wiring && same(*a.wiring, *b.wiring)));
  }
};

}  // namespace optforge::dsl
