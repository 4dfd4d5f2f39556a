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

// Events and tests: sequential and parallel composition, identities, swaps,
// coarse-graining and conditional tests.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "optforge/backends.hpp"
#include "optforge/linrep.hpp"

namespace optforge {

/// Joint outcome labels are tuples; composing tests concatenates them.
using Outcome = std::vector<std::string>;

inline std::string outcome_label(const Outcome& o) {
  std::string out = "(";
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (i) out += ",";
    out += o[i];
  }
  return out + ")";
}

inline Outcome concat(const Outcome& a, const Outcome& b) {
  Outcome out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// An event A→B, identified with its linear representation.
class Event {
 public:
  Event() = default;
  explicit Event(TransfMap map) : map_(std::move(map)) {}

  const SystemRef& input() const { return map_.input(); }
  const SystemRef& output() const { return map_.output(); }
  const TransfMap& map() const { return map_; }
  const TheoryBackend& backend() const { return backend_of({&input(), &output()}); }

 private:
  TransfMap map_;
};

inline Event seq_compose(const Event& e, const Event& f) {
  if (e.output() != f.input()) {
    throw TypeMismatch("seq_compose: output " + e.output().to_string() + " does not match input " +
                       f.input().to_string());
  }
  const TheoryBackend& b = backend_of({&e.input(), &e.output(), &f.output()});
  return Event(b.sequence(e.map(), f.map()));
}

inline Event par_compose(const Event& e, const Event& f) {
  const TheoryBackend& b =
      backend_of({&e.input(), &e.output(), &f.input(), &f.output()});
  return Event(b.tensor(e.map(), f.map()));
}

inline Event identity_event(const SystemRef& a) { return Event(backend_of(a).identity(a)); }

inline Event swap_event(const SystemRef& a, const SystemRef& b) {
  return Event(backend_of({&a, &b}).swap(a, b));
}

inline Event preparation(const StateVec& s) {
  return Event(backend_of(s.system()).as_transformation(s));
}

inline Event observation(const EffectVec& a) {
  return Event(backend_of(a.system()).as_transformation(a));
}

/// Probability of a closed scalar event.
inline double probability(const Event& scalar) {
  if (!scalar.input().is_trivial() || !scalar.output().is_trivial()) {
    throw TypeMismatch("probability: event is not a scalar (I→I)");
  }
  return scalar.map().matrix()(0, 0);
}

/// Statistical equality, using the references the backend requires.
inline bool equal(const Event& e, const Event& f, double tol = kProbabilityTolerance) {
  return statistically_equal(e.map(), f.map(), tol);
}

/// A finite outcome-indexed family of events A→B whose coarse-grained sum is
/// a deterministic transformation.
class Test {
 public:
  using Entry = std::pair<Outcome, Event>;

  explicit Test(std::vector<Entry> entries, double tol = kProbabilityTolerance)
      : entries_(std::move(entries)) {
    validate(tol);
  }

  /// The deterministic test with a single event.
  static Test deterministic(const Event& e, const std::string& label = "0") {
    return Test({{Outcome{label}, e}});
  }

  const SystemRef& input() const { return entries_.front().second.input(); }
  const SystemRef& output() const { return entries_.front().second.output(); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool is_deterministic() const { return entries_.size() == 1; }
  const TheoryBackend& backend() const { return entries_.front().second.backend(); }

  std::vector<Outcome> outcomes() const {
    std::vector<Outcome> out;
    for (const auto& [o, e] : entries_) out.push_back(o);
    return out;
  }

  const Event& event(const Outcome& o) const {
    for (const auto& [k, e] : entries_)
      if (k == o) return e;
    throw DomainError("test has no outcome " + outcome_label(o));
  }

  /// Σ_x T_x.
  Event total() const {
    const TheoryBackend& b = backend();
    TransfMap acc = entries_.front().second.map();
    for (std::size_t i = 1; i < entries_.size(); ++i) acc = b.sum(acc, entries_[i].second.map());
    return Event(acc);
  }

 private:
  void validate(double tol) const {
    if (entries_.empty()) throw DomainError("a test needs at least one outcome");
    std::set<Outcome> seen;
    const SystemRef& in = entries_.front().second.input();
    const SystemRef& out = entries_.front().second.output();
    const TheoryBackend& b = backend();
    for (const auto& [o, e] : entries_) {
      if (!seen.insert(o).second) throw DomainError("duplicate outcome " + outcome_label(o));
      if (e.input() != in || e.output() != out) {
        throw TypeMismatch("test events must share the type " + in.to_string() + "->" +
                           out.to_string() + ", outcome " + outcome_label(o) + " has " +
                           e.input().to_string() + "->" + e.output().to_string());
      }
      if (!b.is_transformation(e.map(), std::max(tol, kConeTolerance))) {
        throw DomainError("event " + outcome_label(o) + " is not a physical transformation");
      }
    }
    const Event t = total();
    if (!optforge::is_deterministic(t.map(), tol) || !b.is_transformation(t.map(), std::max(tol, kConeTolerance))) {
      throw DomainError("test is not normalized: the sum of its events is not deterministic");
    }
  }

  std::vector<Entry> entries_;
};

inline Test identity_test(const SystemRef& a) { return Test::deterministic(identity_event(a)); }

inline Test swap_test(const SystemRef& a, const SystemRef& b) {
  return Test::deterministic(swap_event(a, b));
}

/// Diagram order: `t` then `u`; outcomes are concatenated tuples (x, y).
inline Test seq_compose(const Test& t, const Test& u) {
  std::vector<Test::Entry> out;
  for (const auto& [x, e] : t.entries())
    for (const auto& [y, f] : u.entries()) out.emplace_back(concat(x, y), seq_compose(e, f));
  return Test(std::move(out));
}

inline Test par_compose(const Test& t, const Test& u) {
  std::vector<Test::Entry> out;
  for (const auto& [x, e] : t.entries())
    for (const auto& [y, f] : u.entries()) out.emplace_back(concat(x, y), par_compose(e, f));
  return Test(std::move(out));
}

/// One group of a coarse-graining: the new label and the outcomes it merges.
struct Group {
  Outcome label;
  std::vector<Outcome> members;
};

/// T′_y = Σ_{x ∈ X_y} T_x. The groups must partition the outcome set; an empty
/// group yields the zero transformation.
inline Test coarse_grain(const Test& t, const std::vector<Group>& groups) {
  std::set<Outcome> outcomes;
  for (const auto& o : t.outcomes()) outcomes.insert(o);
  std::set<Outcome> covered;
  const TheoryBackend& b = t.backend();
  std::vector<Test::Entry> out;
  for (const Group& g : groups) {
    TransfMap acc = b.zero(t.input(), t.output());
    for (const Outcome& m : g.members) {
      if (!outcomes.count(m)) throw DomainError("coarse_grain: unknown outcome " + outcome_label(m));
      if (!covered.insert(m).second) {
        throw DomainError("coarse_grain: outcome " + outcome_label(m) + " appears in two groups");
      }
      acc = b.sum(acc, t.event(m).map());
    }
    out.emplace_back(g.label, Event(acc));
  }
  if (covered.size() != outcomes.size()) {
    for (const auto& o : outcomes) {
      if (!covered.count(o)) throw DomainError("coarse_grain: outcome " + outcome_label(o) + " is not covered");
    }
  }
  return Test(std::move(out));
}

/// Merges every outcome into one deterministic event.
inline Test coarse_grain_all(const Test& t, const std::string& label = "0") {
  return coarse_grain(t, {Group{Outcome{label}, t.outcomes()}});
}

/// The conditional test: perform `t`, then on outcome x perform followers[x].
/// Outcomes are (x, y) for y in the outcome set of the x-th follower.
inline Test conditional(const Test& t, const std::map<Outcome, Test>& followers) {
  if (!t.backend().causal()) {
    throw DomainError("conditional tests require Causality, which backend " + t.backend().id() +
                      " fails");
  }
  std::vector<Test::Entry> out;
  const SystemRef* follower_output = nullptr;
  for (const auto& [x, e] : t.entries()) {
    auto it = followers.find(x);
    if (it == followers.end()) throw DomainError("conditional: no follower for outcome " + outcome_label(x));
    const Test& s = it->second;
    if (s.input() != t.output()) {
      throw TypeMismatch("conditional: follower for " + outcome_label(x) + " expects " +
                         s.input().to_string() + " but the test outputs " + t.output().to_string());
    }
    if (follower_output && *follower_output != s.output()) {
      throw TypeMismatch("conditional: followers have different output systems");
    }
    follower_output = &s.output();
    for (const auto& [y, f] : s.entries()) out.emplace_back(concat(x, y), seq_compose(e, f));
  }
  return Test(std::move(out));
}

/// Joint probabilities of a closed test (I→I).
inline std::map<Outcome, double> distribution(const Test& t) {
  std::map<Outcome, double> out;
  for (const auto& [o, e] : t.entries()) out[o] = probability(e);
  return out;
}

}  // namespace optforge
