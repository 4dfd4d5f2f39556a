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

// Operations on the real-vector-space representation: pairing, norms,
// marginals, internality and statistical equality with reference systems.

#include <vector>

#include "optforge/backends.hpp"
#include "optforge/vectors.hpp"

namespace optforge {

/// (a|s). The raw value is returned even when it falls outside [0, 1];
/// use probability_in_range to flag it.
inline double pair(const EffectVec& a, const StateVec& s) {
  if (a.system() != s.system()) {
    throw TypeMismatch("pairing effect on " + a.system().to_string() + " with state on " +
                       s.system().to_string());
  }
  return a.coords().dot(s.coords());
}

inline bool probability_in_range(double p, double tol = kProbabilityTolerance) {
  return p >= -tol && p <= 1 + tol;
}

/// sup over effects of (a|s), by the backend's closed form.
inline double operational_norm(const StateVec& s) {
  if (s.coords().isZero(0.0)) return 0.0;
  return backend_of(s.system()).operational_norm(s);
}

/// Lower bound on the operational norm from `samples` extremal effects plus
/// the deterministic effect. It agrees with the closed form whenever the
/// deterministic effect attains the supremum, as it does for every state.
inline double operational_norm_sampled(const StateVec& s, int samples, Rng& rng) {
  const TheoryBackend& b = backend_of(s.system());
  double best = pair(b.deterministic_effect(s.system()), s);
  for (int i = 0; i < samples; ++i) best = std::max(best, pair(b.sample_extremal_effect(s.system(), rng), s));
  return best;
}

enum class Keep { kFirst, kSecond };

/// Marginal of s on A⊗B: (id ⊗ e_B) s or (e_A ⊗ id) s.
inline StateVec marginal(const StateVec& s, const SystemRef& a, const SystemRef& b, Keep keep) {
  if (compose_systems(a, b) != s.system()) {
    throw TypeMismatch("marginal: state lives on " + s.system().to_string() + ", not " +
                       compose_systems(a, b).to_string());
  }
  const TheoryBackend& be = backend_of(s.system());
  if (!be.causal()) throw DomainError("marginal: backend " + be.id() + " fails Causality");
  TransfMap discard = keep == Keep::kFirst
                          ? be.tensor(be.identity(a), be.as_transformation(be.deterministic_effect(b)))
                          : be.tensor(be.as_transformation(be.deterministic_effect(a)), be.identity(b));
  return be.apply(discard, s);
}

inline bool is_internal(const StateVec& s) { return backend_of(s.system()).is_internal(s); }

inline StateVec apply(const TransfMap& t, const StateVec& s) {
  return backend_of({&t.input(), &t.output()}).apply(t, s);
}

/// (T ⊗ I_R) applied to a state on A⊗R, with R read off the state.
inline StateVec apply_extended(const TransfMap& t, const StateVec& s) {
  const SystemRef r = strip_prefix(s.system(), t.input());
  return StateVec(compose_systems(t.output(), r), t.extended_matrix(r) * s.coords());
}

inline bool is_deterministic(const TransfMap& t, double tol = kProbabilityTolerance) {
  const TheoryBackend& b = backend_of({&t.input(), &t.output()});
  const Eigen::VectorXd e_in = t.input().is_trivial() ? Eigen::VectorXd::Ones(1)
                                                       : b.deterministic_effect(t.input()).coords();
  const Eigen::VectorXd e_out = t.output().is_trivial() ? Eigen::VectorXd::Ones(1)
                                                         : b.deterministic_effect(t.output()).coords();
  return (t.matrix().transpose() * e_out - e_in).cwiseAbs().maxCoeff() <= tol;
}

/// Statistical equality: T1⊗I_R and T2⊗I_R agree for every listed reference
/// R (the trivial reference compares the bare maps). Equal coordinate
/// matrices are equivalent to agreement on spanning sets of states and
/// effects.
inline bool statistically_equal(const TransfMap& t1, const TransfMap& t2,
                                const std::vector<SystemRef>& refs,
                                double tol = kProbabilityTolerance) {
  if (t1.input() != t2.input() || t1.output() != t2.output()) {
    throw TypeMismatch("statistically_equal: transformations have different types");
  }
  for (const SystemRef& r : refs) {
    const Eigen::MatrixXd m1 = t1.extended_matrix(r);
    const Eigen::MatrixXd m2 = t2.extended_matrix(r);
    if ((m1 - m2).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

/// Statistical equality using the references the backend declares sufficient.
inline bool statistically_equal(const TransfMap& t1, const TransfMap& t2,
                                double tol = kProbabilityTolerance) {
  const TheoryBackend& b = backend_of({&t1.input(), &t1.output()});
  std::vector<SystemRef> refs = b.reference_requirement(t1.input());
  return statistically_equal(t1, t2, refs, tol);
}

}  // namespace optforge
