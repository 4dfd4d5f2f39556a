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

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "optforge/backends.hpp"
#include "optforge/dsl/printer.hpp"
#include "optforge/linalg.hpp"
#include "optforge/linrep.hpp"

namespace optforge::dsl {

/// A declared box after resolution: one event per outcome. Lone states,
/// effects and channels have a single event and no outcome slot.
struct BoxDef {
  std::string name;
  Decl::Kind kind = Decl::Kind::State;
  SystemRef in, out;
  std::vector<std::pair<std::string, TransfMap>> events;
  bool deterministic = false;
  std::size_t decl_index = 0;
};

struct TypedExpr;
using TypedPtr = std::shared_ptr<const TypedExpr>;

struct TypedExpr {
  Expr::Kind kind = Expr::Kind::Ref;
  SystemRef in, out;
  SystemRef swap_a, swap_b;  // Swap
  TypedPtr lhs, rhs;
  int box = -1;    // index into TypedCircuit::boxes
  int slot = -1;   // outcome slot of a test occurrence
  Pos pos;
};

/// One occurrence of a test in the wiring, i.e. one coordinate of the joint outcome.
struct Slot {
  std::string test;
  Pos pos;
};

struct TypedCircuit {
  Circuit ast;
  std::map<std::string, SystemRef> systems;
  std::vector<BoxDef> boxes;
  std::map<std::string, int> box_index;
  std::vector<Slot> slots;  // declaration order of the test, then left-to-right
  TypedPtr root;
  /// Every lone state/effect/channel in the wiring is deterministic, so the
  /// outcome distribution sums to one.
  bool closed_normalized = true;

  const BoxDef& box(const std::string& name) const { return boxes.at(static_cast<std::size_t>(box_index.at(name))); }
};

namespace detail {

using cd = std::complex<double>;

inline Eigen::MatrixXcd to_matrix(const MatrixLit& m, Pos pos) {
  const std::size_t cols = m.front().size();
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != cols) {
      throw DslError(DslError::Kind::Literal, pos,
                     "ragged matrix: row " + std::to_string(i + 1) + " has " + std::to_string(m[i].size()) +
                         " entries, expected " + std::to_string(cols));
    }
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cd(m[i][j].re, m[i][j].im);
  }
  return out;
}

inline std::string shape(const Eigen::MatrixXcd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

class Checker {
 public:
  explicit Checker(const Circuit& c) { out_.ast = c; }

  TypedCircuit run() {
    for (std::size_t i = 0; i < out_.ast.decls.size(); ++i) declare(out_.ast.decls[i], i);
    if (!out_.ast.wiring) throw DslError(DslError::Kind::Syntax, {}, "missing wiring expression");
    out_.root = check(*out_.ast.wiring);
    if (!out_.root->in.is_trivial() || !out_.root->out.is_trivial()) {
      throw DslError(DslError::Kind::OpenWires, out_.ast.wiring->pos,
                     "the circuit has type " + out_.root->in.to_string() + " -> " +
                         out_.root->out.to_string() + "; a closed experiment needs I -> I");
    }
    number_slots();
    return std::move(out_);
  }

 private:
  SystemRef resolve(const SysExpr& s) const {
    SystemRef r;
    for (const std::string& f : s.factors) {
      auto it = out_.systems.find(f);
      if (it == out_.systems.end()) throw DslError(DslError::Kind::Unresolved, s.pos, "unknown system '" + f + "'");
      try {
        r = compose_systems(r, it->second);
      } catch (const Error& e) {
        throw DslError(DslError::Kind::WireMismatch, s.pos, e.what());
      }
    }
    if (!r.is_trivial()) {
      try {
        backend_of(r).dims(r);
      } catch (const Error& e) {
        throw DslError(DslError::Kind::Literal, s.pos, e.what());
      }
    }
    return r;
  }

  void declare(const Decl& d, std::size_t index) {
    if (d.kind == Decl::Kind::System) {
      if (!find_backend(d.theory)) {
        throw DslError(DslError::Kind::Unresolved, d.pos, "unknown theory '" + d.theory + "'");
      }
      try {
        out_.systems[d.name] = make_system(d.theory, d.dim);
      } catch (const Error& e) {
        throw DslError(DslError::Kind::Literal, d.pos, std::string("system '") + d.name + "': " + e.what());
      }
      return;
    }
    BoxDef box;
    box.name = d.name;
    box.kind = d.kind;
    box.in = resolve(d.in);
    box.out = resolve(d.out);
    box.decl_index = index;
    const TheoryBackend& b = backend(box.in, box.out, d.pos);
    if (d.kind == Decl::Kind::Test) {
      if (d.branches.empty()) {
        box.events = builtin_test(d, box.in, box.out);
      } else {
        for (const Branch& br : d.branches) box.events.emplace_back(br.outcome, event(br.literal, box.in, box.out, b));
      }
      for (const auto& [label, t] : box.events) {
        if (!b.is_transformation(t, 1e-9)) {
          throw DslError(DslError::Kind::Literal, d.pos,
                         "outcome '" + label + "' of test '" + d.name + "' is not a physical event");
        }
      }
      require_normalized(box, b, d.pos);
      box.deterministic = true;
    } else {
      box.events.emplace_back("", event(d.literal, box.in, box.out, b));
      const TransfMap& t = box.events.front().second;
      validate_event(d, t, b);
      box.deterministic = is_deterministic(t, 1e-9);
      if (d.kind == Decl::Kind::Channel) require_normalized(box, b, d.pos);
    }
    out_.box_index[d.name] = static_cast<int>(out_.boxes.size());
    out_.boxes.push_back(std::move(box));
  }

  static const TheoryBackend& backend(const SystemRef& in, const SystemRef& out, Pos pos) {
    try {
      return backend_of({&in, &out});
    } catch (const Error& e) {
      throw DslError(DslError::Kind::WireMismatch, pos, e.what());
    }
  }

  static void validate_event(const Decl& d, const TransfMap& t, const TheoryBackend& b) {
    if (b.is_transformation(t, 1e-9)) return;
    std::string witness;
    if (const auto* h = dynamic_cast<const HilbertBackend*>(&b)) {
      if (d.kind == Decl::Kind::State) {
        const Eigen::MatrixXcd rho = h->density(StateVec(t.output(), t.matrix().col(0)));
        witness = " (min eigenvalue " + format_real(linalg::min_eigenvalue(rho)) + ", trace " +
                  format_real(rho.trace().real()) + ")";
      } else if (d.kind == Decl::Kind::Effect) {
        const Eigen::VectorXd ev =
            linalg::eigenvalues(h->effect_operator(EffectVec(t.input(), t.matrix().row(0).transpose())));
        witness = " (eigenvalues in [" + format_real(ev.minCoeff()) + ", " + format_real(ev.maxCoeff()) + "])";
      }
    }
    const char* what = d.kind == Decl::Kind::State    ? "a valid state"
                       : d.kind == Decl::Kind::Effect ? "a valid effect"
                                                      : "a physical transformation";
    throw DslError(DslError::Kind::Literal, d.literal.pos, "'" + d.name + "' is not " + what + witness);
  }

  /// Σ_x T_x must be deterministic; the witness is the spectrum of the effect
  /// e∘Σ_x T_x, which equals the identity exactly when it is.
  static void require_normalized(const BoxDef& box, const TheoryBackend& b, Pos pos) {
    TransfMap total = box.events.front().second;
    for (std::size_t i = 1; i < box.events.size(); ++i) total = b.sum(total, box.events[i].second);
    TransfMap e = total;
    if (!box.out.is_trivial()) e = b.sequence(total, b.as_transformation(b.deterministic_effect(box.out)));
    double lo, hi;
    std::string what;
    if (box.in.is_trivial()) {
      lo = hi = e.matrix()(0, 0);
      what = "total probability " + format_real(hi);
    } else if (const auto* h = dynamic_cast<const HilbertBackend*>(&b)) {
      const Eigen::VectorXd ev = linalg::eigenvalues(h->effect_operator(EffectVec(box.in, e.matrix().row(0).transpose())));
      lo = ev.minCoeff();
      hi = ev.maxCoeff();
      what = "the summed effect has max eigenvalue " + format_real(hi) + " and min eigenvalue " + format_real(lo);
    } else {
      const Eigen::VectorXd v = e.matrix().row(0).transpose();
      lo = v.minCoeff();
      hi = v.maxCoeff();
      what = "the summed effect has entries in [" + format_real(lo) + ", " + format_real(hi) + "]";
    }
    if (std::abs(hi - 1) > 1e-9 || std::abs(lo - 1) > 1e-9) {
      throw DslError(DslError::Kind::NotNormalized, pos,
                     std::string(box.kind == Decl::Kind::Test ? "test '" : "channel '") + box.name +
                         "' does not sum to a deterministic transformation: " + what + " (expected 1)");
    }
  }

  static int computational_size(const SystemRef& s, const TheoryBackend& b) {
    return dynamic_cast<const HilbertBackend*>(&b) ? b.dims(s).d : b.dims(s).D;
  }

  std::vector<std::pair<std::string, TransfMap>> builtin_test(const Decl& d, const SystemRef& in,
                                                              const SystemRef& out) const {
    if (d.literal.kind != Literal::Kind::Builtin || d.literal.builtin != "computational_measurement") {
      throw DslError(DslError::Kind::Literal, d.literal.pos,
                     "a test body is either {outcome: literal, ...} or computational_measurement");
    }
    if (in.is_trivial() || (!out.is_trivial() && out != in)) {
      throw DslError(DslError::Kind::Literal, d.literal.pos,
                     "computational_measurement has type A -> I or A -> A, not " + in.to_string() + " -> " +
                         out.to_string());
    }
    const TheoryBackend& b = backend_of(in);
    const int n = computational_size(in, b);
    const auto* h = dynamic_cast<const HilbertBackend*>(&b);
    std::vector<std::pair<std::string, TransfMap>> events;
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
      p(k, k) = 1;
      TransfMap t;
      if (h) {
        t = out.is_trivial() ? b.as_transformation(h->effect(in, p)) : h->from_kraus(in, out, {p});
      } else {
        t = out.is_trivial() ? b.as_transformation(EffectVec(in, Eigen::VectorXd::Unit(n, k)))
                             : b.make_transformation(in, out, p);
      }
      events.emplace_back(std::to_string(k), std::move(t));
    }
    return events;
  }

  /// Interprets a literal against the box type in -> out.
  TransfMap event(const Literal& l, const SystemRef& in, const SystemRef& out, const TheoryBackend& b) const {
    try {
      return event_impl(l, in, out, b);
    } catch (const DslError&) {
      throw;
    } catch (const Error& e) {
      throw DslError(DslError::Kind::Literal, l.pos, e.what());
    }
  }

  TransfMap event_impl(const Literal& l, const SystemRef& in, const SystemRef& out, const TheoryBackend& b) const {
    const auto* h = dynamic_cast<const HilbertBackend*>(&b);
    const bool prep = in.is_trivial() && !out.is_trivial();
    const bool obs = !in.is_trivial() && out.is_trivial();
    const std::string type = in.to_string() + " -> " + out.to_string();
    auto bad = [&](const std::string& msg) -> DslError { return DslError(DslError::Kind::Literal, l.pos, msg); };

    if (l.kind == Literal::Kind::Builtin) {
      const std::string& n = l.builtin;
      if (n == "computational_measurement") throw bad("computational_measurement is a test body, not an event");
      if (n == "ket0" || n == "ket1") {
        const int k = n == "ket0" ? 0 : 1;
        if (!prep && !obs) throw bad(n + " is a state or an effect, not a box of type " + type);
        const SystemRef& s = prep ? out : in;
        const int dim = computational_size(s, b);
        if (h) {
          Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
          p(k, k) = 1;
          return prep ? b.as_transformation(h->state(s, p)) : b.as_transformation(h->effect(s, p));
        }
        const Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, k);
        return prep ? b.as_transformation(StateVec(s, v)) : b.as_transformation(EffectVec(s, v));
      }
      if (n == "maximally_mixed") {
        if (!prep) throw bad("maximally_mixed is a state, not a box of type " + type);
        return b.as_transformation(b.invariant_state(out));
      }
      if (n == "discard") {
        if (!obs) throw bad("discard is an effect, not a box of type " + type);
        return b.as_transformation(b.deterministic_effect(in));
      }
      if (n == "bell") {
        if (!h) throw bad("bell needs a Hilbert-space theory, not " + b.id());
        if (!prep && !obs) throw bad("bell is a state or an effect, not a box of type " + type);
        const SystemRef& s = prep ? out : in;
        const int half = bell_half(s);
        if (half == 0) throw bad("bell needs a system of the form A*A, not " + s.to_string());
        Eigen::VectorXcd omega = Eigen::VectorXcd::Zero(half * half);
        for (int i = 0; i < half; ++i) omega(i * half + i) = 1.0 / std::sqrt(static_cast<double>(half));
        const Eigen::MatrixXcd p = omega * omega.adjoint();
        return prep ? b.as_transformation(h->state(s, p)) : b.as_transformation(h->effect(s, p));
      }
      throw bad("unknown builtin '" + n + "'");
    }

    if (l.kind == Literal::Kind::Kraus) {
      if (!h) throw bad("kraus{...} needs a Hilbert-space theory, not " + b.id());
      std::vector<Eigen::MatrixXcd> ks;
      for (const MatrixLit& m : l.kraus) ks.push_back(kraus_shape(to_matrix(m, l.pos), in, out, b, l.pos));
      return h->from_kraus(in, out, ks);
    }

    const Eigen::MatrixXcd m = to_matrix(l.matrix, l.pos);
    if (h) {
      if (l.kind == Literal::Kind::Vector) {
        // a ket, or a row of Kraus entries for 1-dimensional boxes
        if (!prep && !obs) throw bad("a vector denotes a pure state or effect, not a box of type " + type);
        const SystemRef& s = prep ? out : in;
        const Eigen::VectorXcd v = m.row(0).transpose();
        if (v.size() != b.dims(s).d) {
          throw bad("ket of length " + std::to_string(v.size()) + " on system " + s.to_string());
        }
        const Eigen::MatrixXcd p = v * v.adjoint();
        return prep ? b.as_transformation(h->state(s, p)) : b.as_transformation(h->effect(s, p));
      }
      if (prep) return b.as_transformation(h->state(out, m));
      if (obs) return b.as_transformation(h->effect(in, m));
      return h->from_kraus(in, out, {kraus_shape(m, in, out, b, l.pos)});
    }

    // Classical theory: probability vectors, effect vectors and column-stochastic matrices.
    if (m.imag().cwiseAbs().maxCoeff() > 0) throw bad("classical literals must be real");
    const Eigen::MatrixXd r = m.real();
    const int ni = in.is_trivial() ? 1 : b.dims(in).D;
    const int no = out.is_trivial() ? 1 : b.dims(out).D;
    if (l.kind == Literal::Kind::Vector) {
      if (!prep && !obs) throw bad("a vector denotes a state or an effect, not a box of type " + type);
      const SystemRef& s = prep ? out : in;
      const Eigen::VectorXd v = r.row(0).transpose();
      if (v.size() != b.dims(s).D) {
        throw bad("vector of length " + std::to_string(v.size()) + " on system " + s.to_string());
      }
      return prep ? b.as_transformation(StateVec(s, v)) : b.as_transformation(EffectVec(s, v));
    }
    if (r.rows() != no || r.cols() != ni) {
      throw bad("matrix of shape " + shape(m) + " for a box " + type + " (expected " + std::to_string(no) + "x" +
                std::to_string(ni) + ")");
    }
    return b.make_transformation(in, out, m);
  }

  static Eigen::MatrixXcd kraus_shape(const Eigen::MatrixXcd& k, const SystemRef& in, const SystemRef& out,
                                      const TheoryBackend& b, Pos pos) {
    const int di = b.dims(in).d, dout = b.dims(out).d;
    if (k.rows() != dout || k.cols() != di) {
      throw DslError(DslError::Kind::Literal, pos,
                     "Kraus operator of shape " + shape(k) + " for a box " + in.to_string() + " -> " +
                         out.to_string() + " (expected " + std::to_string(dout) + "x" + std::to_string(di) + ")");
    }
    return k;
  }

  /// Dimension of A when `s` factors as A*A' with dim A = dim A', else 0.
  static int bell_half(const SystemRef& s) {
    const auto& f = s.factors();
    for (std::size_t k = 1; k < f.size(); ++k) {
      int left = 1, right = 1;
      for (std::size_t i = 0; i < k; ++i) left *= f[i];
      for (std::size_t i = k; i < f.size(); ++i) right *= f[i];
      if (left == right) return left;
    }
    return 0;
  }

  TypedPtr check(const Expr& e) {
    auto t = std::make_shared<TypedExpr>();
    t->kind = e.kind;
    t->pos = e.pos;
    switch (e.kind) {
      case Expr::Kind::Ref: {
        auto it = out_.box_index.find(e.name);
        if (it == out_.box_index.end()) throw DslError(DslError::Kind::Unresolved, e.pos, "unknown box '" + e.name + "'");
        const BoxDef& box = out_.boxes[static_cast<std::size_t>(it->second)];
        t->box = it->second;
        t->in = box.in;
        t->out = box.out;
        if (box.kind == Decl::Kind::Test) {
          t->slot = static_cast<int>(occurrences_.size());
          occurrences_.push_back({e.name, e.pos});
        } else if (!box.deterministic) {
          out_.closed_normalized = false;
        }
        break;
      }
      case Expr::Kind::Id:
        t->in = t->out = resolve(e.a);
        break;
      case Expr::Kind::Swap: {
        const SystemRef a = resolve(e.a), b = resolve(e.b);
        t->swap_a = a;
        t->swap_b = b;
        try {
          t->in = compose_systems(a, b);
          t->out = compose_systems(b, a);
        } catch (const Error& err) {
          throw DslError(DslError::Kind::WireMismatch, e.pos, err.what());
        }
        break;
      }
      case Expr::Kind::Seq: {
        t->lhs = check(*e.lhs);
        t->rhs = check(*e.rhs);
        if (t->lhs->out != t->rhs->in) {
          throw DslError(DslError::Kind::WireMismatch, e.pos,
                         "'" + print(*e.lhs) + "' outputs " + t->lhs->out.to_string() + " but '" + print(*e.rhs) +
                             "' expects " + t->rhs->in.to_string());
        }
        t->in = t->lhs->in;
        t->out = t->rhs->out;
        break;
      }
      case Expr::Kind::Par: {
        t->lhs = check(*e.lhs);
        t->rhs = check(*e.rhs);
        try {
          t->in = compose_systems(t->lhs->in, t->rhs->in);
          t->out = compose_systems(t->lhs->out, t->rhs->out);
        } catch (const Error& err) {
          throw DslError(DslError::Kind::WireMismatch, e.pos,
                         "cannot place '" + print(*e.lhs) + "' beside '" + print(*e.rhs) + "': " + err.what());
        }
        break;
      }
    }
    return t;
  }

  // Slots are ordered by the test's declaration, then by appearance.
  void number_slots() {
    std::vector<int> order(occurrences_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return out_.box(occurrences_[static_cast<std::size_t>(x)].test).decl_index <
             out_.box(occurrences_[static_cast<std::size_t>(y)].test).decl_index;
    });
    std::vector<int> rank(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
      out_.slots.push_back(occurrences_[static_cast<std::size_t>(order[r])]);
    }
    out_.root = renumber(out_.root, rank);
  }

  static TypedPtr renumber(const TypedPtr& t, const std::vector<int>& rank) {
    auto c = std::make_shared<TypedExpr>(*t);
    if (c->slot >= 0) c->slot = rank[static_cast<std::size_t>(c->slot)];
    if (c->lhs) c->lhs = renumber(c->lhs, rank);
    if (c->rhs) c->rhs = renumber(c->rhs, rank);
    return c;
  }

  TypedCircuit out_;
  std::vector<Slot> occurrences_;
};

}  // namespace detail

/// Resolves systems and literals and checks every wire. The result is closed:
/// the wiring has type I -> I.
inline TypedCircuit typecheck(const Circuit& c) { return detail::Checker(c).run(); }

}  // namespace optforge::dsl
