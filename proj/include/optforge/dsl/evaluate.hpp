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

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optforge/core.hpp"
#include "optforge/dsl/parser.hpp"
#include "optforge/dsl/typecheck.hpp"
#include "optforge/report.hpp"

namespace optforge::dsl {

/// Joint outcome probabilities. Keys are tuples over `slots`, listed in the
/// product order of the declared outcome sets.
struct Distribution {
  std::vector<Slot> slots;
  std::vector<std::pair<Outcome, double>> entries;

  double total() const {
    double s = 0;
    for (const auto& [o, p] : entries) s += p;
    return s;
  }

  double at(const Outcome& o) const {
    for (const auto& [k, p] : entries)
      if (k == o) return p;
    throw DomainError("no outcome " + outcome_label(o));
  }

  double max_difference(const Distribution& other) const {
    if (entries.size() != other.entries.size()) return 1.0 / 0.0;
    double m = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].first != other.entries[i].first) return 1.0 / 0.0;
      m = std::max(m, std::abs(entries[i].second - other.entries[i].second));
    }
    return m;
  }

  /// {"(a,b)": p, ...}
  Json to_json() const {
    Json j = Json::object();
    for (const auto& [o, p] : entries) j[outcome_label(o)] = p;
    return j;
  }
};

namespace detail {

// A partially contracted sub-circuit: one map per assignment of the slots it owns.
struct Partial {
  struct Branch {
    std::vector<std::pair<int, int>> labels;  // (slot, outcome index)
    TransfMap map;
  };
  std::vector<Branch> branches;
};

inline Partial contract(const TypedCircuit& c, const TypedExpr& t) {
  Partial p;
  switch (t.kind) {
    case Expr::Kind::Ref: {
      const BoxDef& box = c.boxes[static_cast<std::size_t>(t.box)];
      for (std::size_t k = 0; k < box.events.size(); ++k) {
        Partial::Branch b{{}, box.events[k].second};
        if (t.slot >= 0) b.labels.emplace_back(t.slot, static_cast<int>(k));
        p.branches.push_back(std::move(b));
      }
      return p;
    }
    case Expr::Kind::Id:
      p.branches.push_back({{}, backend_of(t.in).identity(t.in)});
      return p;
    case Expr::Kind::Swap:
      p.branches.push_back({{}, backend_of({&t.in}).swap(t.swap_a, t.swap_b)});
      return p;
    case Expr::Kind::Seq:
    case Expr::Kind::Par: {
      const Partial l = contract(c, *t.lhs);
      const Partial r = contract(c, *t.rhs);
      const TheoryBackend& b = backend_of({&t.in, &t.out});
      for (const auto& x : l.branches)
        for (const auto& y : r.branches) {
          Partial::Branch z;
          z.labels = x.labels;
          z.labels.insert(z.labels.end(), y.labels.begin(), y.labels.end());
          z.map = t.kind == Expr::Kind::Seq ? b.sequence(x.map, y.map) : b.tensor(x.map, y.map);
          p.branches.push_back(std::move(z));
        }
      return p;
    }
  }
  return p;
}

}  // namespace detail

/// Outcome distribution of a closed, typed circuit. Sub-circuits are
/// contracted bottom-up in the parsed tree: left to right along ';', pairwise
/// along '|'.
inline Distribution evaluate(const TypedCircuit& c) {
  const detail::Partial p = detail::contract(c, *c.root);
  std::vector<std::pair<std::vector<int>, double>> rows;
  for (const auto& br : p.branches) {
    std::vector<int> idx(c.slots.size(), -1);
    for (const auto& [slot, k] : br.labels) idx[static_cast<std::size_t>(slot)] = k;
    rows.emplace_back(std::move(idx), br.map.matrix()(0, 0));
  }
  std::sort(rows.begin(), rows.end());
  Distribution d;
  d.slots = c.slots;
  for (const auto& [idx, prob] : rows) {
    Outcome o;
    for (std::size_t s = 0; s < idx.size(); ++s)
      o.push_back(c.box(c.slots[s].test).events[static_cast<std::size_t>(idx[s])].first);
    d.entries.emplace_back(std::move(o), prob);
  }
  return d;
}

/// parse, typecheck and evaluate in one step.
inline Distribution run(std::string_view text) { return evaluate(typecheck(parse(text))); }

}  // namespace optforge::dsl
