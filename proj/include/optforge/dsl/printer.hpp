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
#include <string>

#include "optforge/dsl/ast.hpp"

namespace optforge::dsl {

/// Shortest text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string print(const SysExpr& s) {
  if (s.is_trivial()) return "I";
  std::string out;
  for (std::size_t i = 0; i < s.factors.size(); ++i) {
    if (i) out += "*";
    out += s.factors[i];
  }
  return out;
}

inline std::string print(const Number& x) {
  if (x.pair) return "(" + format_real(x.re) + ", " + format_real(x.im) + ")";
  return format_real(x.re);
}

inline std::string print(const Row& r) {
  std::string out = "[";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += ", ";
    out += print(r[i]);
  }
  return out + "]";
}

inline std::string print(const MatrixLit& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ", ";
    out += print(m[i]);
  }
  return out + "]";
}

inline std::string print(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Builtin: return l.builtin;
    case Literal::Kind::Vector: return print(l.matrix.front());
    case Literal::Kind::Matrix: return print(l.matrix);
    case Literal::Kind::Kraus: {
      std::string out = "kraus{";
      for (std::size_t i = 0; i < l.kraus.size(); ++i) {
        if (i) out += ", ";
        out += print(l.kraus[i]);
      }
      return out + "}";
    }
  }
  return "";
}

namespace detail {

// 0: a sequence is fine here; 1: inside '|'; 2: right operand of '|'.
inline std::string print_expr(const Expr& e, int ctx) {
  switch (e.kind) {
    case Expr::Kind::Ref: return e.name;
    case Expr::Kind::Id: return "id(" + print(e.a) + ")";
    case Expr::Kind::Swap: return "swap(" + print(e.a) + ", " + print(e.b) + ")";
    case Expr::Kind::Seq: {
      const std::string body = print_expr(*e.lhs, 0) + " ; " +
                               (e.rhs->kind == Expr::Kind::Seq ? "(" + print_expr(*e.rhs, 0) + ")"
                                                               : print_expr(*e.rhs, 1));
      return ctx == 0 ? body : "(" + body + ")";
    }
    case Expr::Kind::Par: {
      const std::string body = print_expr(*e.lhs, 1) + " | " + print_expr(*e.rhs, 2);
      return ctx == 2 ? "(" + body + ")" : body;
    }
  }
  return "";
}

}  // namespace detail

/// Minimal-parenthesis rendering that reparses to the same tree.
inline std::string print(const Expr& e) { return detail::print_expr(e, 0); }

inline std::string print(const Decl& d) {
  switch (d.kind) {
    case Decl::Kind::System:
      return "system " + d.name + ": " + d.theory + "(" + std::to_string(d.dim) + ")";
    case Decl::Kind::State: return "state " + d.name + ": " + print(d.out) + " = " + print(d.literal);
    case Decl::Kind::Effect: return "effect " + d.name + ": " + print(d.in) + " = " + print(d.literal);
    case Decl::Kind::Channel:
      return "channel " + d.name + ": " + print(d.in) + " -> " + print(d.out) + " = " + print(d.literal);
    case Decl::Kind::Test: {
      std::string out = "test " + d.name + ": " + print(d.in) + " -> " + print(d.out) + " = ";
      if (d.branches.empty()) return out + print(d.literal);
      out += "{\n";
      for (std::size_t i = 0; i < d.branches.size(); ++i) {
        out += "  " + d.branches[i].outcome + ": " + print(d.branches[i].literal);
        out += i + 1 < d.branches.size() ? ",\n" : "\n";
      }
      return out + "}";
    }
  }
  return "";
}

inline std::string print(const Circuit& c) {
  std::string out;
  for (const Decl& d : c.decls) out += print(d) + "\n";
  out += "circuit = " + (c.wiring ? print(*c.wiring) : std::string()) + "\n";
  return out;
}

}  // namespace optforge::dsl
