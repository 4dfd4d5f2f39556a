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

#include <vector>

#include "optforge/dsl/typecheck.hpp"

namespace optforge::dsl {

/// Wiring rewrites that leave the denoted circuit unchanged.
enum class Rewrite {
  Interchange,   // (a|b) ; (c|d)  ->  (a;c) | (b;d)
  Exchange,      // (a;c) | (b;d)  ->  (a|b) ; (c|d)
  Slide,         // f | g  ->  (f | id) ; (id | g)
  IdentityAfter, // x  ->  x ; id(out x)
  IdentityBefore // x  ->  id(in x) ; x
};

namespace detail {

/// Names a typed system with declared atomic systems.
inline SysExpr name_system(const TypedCircuit& c, const SystemRef& s) {
  SysExpr out;
  for (int f : s.factors()) {
    const SystemRef atom = SystemRef::atomic(s.backend_id(), f);
    bool found = false;
    for (const Decl& d : c.ast.decls) {
      if (d.kind == Decl::Kind::System && c.systems.at(d.name) == atom) {
        out.factors.push_back(d.name);
        found = true;
        break;
      }
    }
    if (!found) throw DomainError("no declared system names " + atom.to_string());
  }
  return out;
}

class Rewriter {
 public:
  Rewriter(const TypedCircuit& c, Rewrite kind, int target) : c_(c), kind_(kind), target_(target) {}

  ExprPtr walk(const ExprPtr& e, const TypedExpr& t) {
    if (applicable(*e, t) && counter_++ == target_) {
      done_ = true;
      return apply(e, t);
    }
    if (e->kind == Expr::Kind::Seq || e->kind == Expr::Kind::Par) {
      ExprPtr l = walk(e->lhs, *t.lhs);
      ExprPtr r = walk(e->rhs, *t.rhs);
      return e->kind == Expr::Kind::Seq ? Expr::seq(l, r, e->pos) : Expr::par(l, r, e->pos);
    }
    return e;
  }

  int sites() const { return counter_; }
  bool done() const { return done_; }

 private:
  bool applicable(const Expr& e, const TypedExpr& t) const {
    switch (kind_) {
      case Rewrite::Interchange:
        return e.kind == Expr::Kind::Seq && e.lhs->kind == Expr::Kind::Par && e.rhs->kind == Expr::Kind::Par &&
               t.lhs->lhs->out == t.rhs->lhs->in;
      case Rewrite::Exchange:
        return e.kind == Expr::Kind::Par && e.lhs->kind == Expr::Kind::Seq && e.rhs->kind == Expr::Kind::Seq;
      case Rewrite::Slide: return e.kind == Expr::Kind::Par;
      case Rewrite::IdentityAfter:
      case Rewrite::IdentityBefore: return true;
    }
    return false;
  }

  ExprPtr apply(const ExprPtr& e, const TypedExpr& t) const {
    switch (kind_) {
      case Rewrite::Interchange:
        return Expr::par(Expr::seq(e->lhs->lhs, e->rhs->lhs), Expr::seq(e->lhs->rhs, e->rhs->rhs));
      case Rewrite::Exchange:
        return Expr::seq(Expr::par(e->lhs->lhs, e->rhs->lhs), Expr::par(e->lhs->rhs, e->rhs->rhs));
      case Rewrite::Slide:
        return Expr::seq(Expr::par(e->lhs, Expr::id(name_system(c_, t.rhs->in))),
                         Expr::par(Expr::id(name_system(c_, t.lhs->out)), e->rhs));
      case Rewrite::IdentityAfter: return Expr::seq(e, Expr::id(name_system(c_, t.out)));
      case Rewrite::IdentityBefore: return Expr::seq(Expr::id(name_system(c_, t.in)), e);
    }
    return e;
  }

  const TypedCircuit& c_;
  Rewrite kind_;
  int target_;
  int counter_ = 0;
  bool done_ = false;
};

}  // namespace detail

/// Number of places where `kind` applies.
inline int rewrite_sites(const TypedCircuit& c, Rewrite kind) {
  detail::Rewriter r(c, kind, -1);
  r.walk(c.ast.wiring, *c.root);
  return r.sites();
}

/// The circuit with `kind` applied at site `site` (pre-order numbering).
inline Circuit rewrite(const TypedCircuit& c, Rewrite kind, int site) {
  detail::Rewriter r(c, kind, site);
  Circuit out = c.ast;
  out.wiring = r.walk(c.ast.wiring, *c.root);
  if (!r.done()) throw DomainError("rewrite site " + std::to_string(site) + " does not exist");
  return out;
}

/// Every single-step rewrite of every kind.
inline std::vector<Circuit> all_rewrites(const TypedCircuit& c) {
  std::vector<Circuit> out;
  for (Rewrite k : {Rewrite::Interchange, Rewrite::Exchange, Rewrite::Slide, Rewrite::IdentityAfter,
                    Rewrite::IdentityBefore}) {
    const int n = rewrite_sites(c, k);
    for (int s = 0; s < n; ++s) out.push_back(rewrite(c, k, s));
  }
  return out;
}

}  // namespace optforge::dsl
