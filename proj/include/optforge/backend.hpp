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

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "optforge/linalg.hpp"
#include "optforge/system.hpp"
#include "optforge/vectors.hpp"

namespace optforge {

class TheoryBackend;

// ----------------------------------------------------------------------------
// Registry of the built-in theories. Concrete backend headers register their
// singleton on inclusion.

namespace detail {
inline std::map<std::string, const TheoryBackend*>& registry() {
  static std::map<std::string, const TheoryBackend*> r;
  return r;
}
inline std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

inline bool register_backend(const TheoryBackend* backend);

inline const TheoryBackend* find_backend(const std::string& id) {
  std::lock_guard<std::mutex> lock(detail::registry_mutex());
  auto it = detail::registry().find(id);
  return it == detail::registry().end() ? nullptr : it->second;
}

inline const TheoryBackend& backend_for_id(const std::string& id) {
  const TheoryBackend* b = find_backend(id);
  if (!b) throw DomainError("unknown theory backend '" + id + "'");
  return *b;
}

/// D = dim St_R(A), d = informational dimension.
struct Dims {
  int D;
  int d;
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Solution set {a : (a|ρ_i) = 1 for all sampled normalized ρ_i}.
struct DeterministicSlice {
  Eigen::VectorXd particular;
  Eigen::MatrixXd directions;  // basis of the homogeneous solution space
  double residual = 0.0;
};

/// Oracle interface for one theory. Implementations are stateless after
/// construction; randomness is always passed in.
///
/// Kernels are the backend's operator-level description of a transformation.
/// Everything coordinate-level (matrices, extension to reference systems) is
/// derived from them here.
class TheoryBackend {
 public:
  virtual ~TheoryBackend() = default;

  virtual std::string id() const = 0;
  virtual Dims dims(const SystemRef& a) const = 0;
  virtual bool locally_tomographic() const = 0;
  /// References that suffice for statistical equality on A.
  virtual std::vector<SystemRef> reference_requirement(const SystemRef& a) const = 0;

  // Kernel algebra -----------------------------------------------------------
  virtual Eigen::MatrixXd coordinate_matrix(const Eigen::MatrixXcd& kernel, const SystemRef& in,
                                            const SystemRef& out) const = 0;
  virtual Eigen::MatrixXcd identity_kernel(const SystemRef& a) const = 0;
  virtual Eigen::MatrixXcd swap_kernel(const SystemRef& a, const SystemRef& b) const = 0;
  virtual Eigen::MatrixXcd tensor_kernel(const Eigen::MatrixXcd& k1, const SystemRef& in1,
                                         const SystemRef& out1, const Eigen::MatrixXcd& k2,
                                         const SystemRef& in2, const SystemRef& out2) const = 0;
  virtual Eigen::MatrixXcd state_kernel(const StateVec& s) const = 0;
  virtual Eigen::MatrixXcd effect_kernel(const EffectVec& a) const = 0;

  // Membership oracles --------------------------------------------------------
  virtual bool is_state(const StateVec& s, double tol = kConeTolerance) const = 0;
  virtual bool is_effect(const EffectVec& a, double tol = kConeTolerance) const = 0;
  virtual bool is_transformation(const TransfMap& t, double tol = kConeTolerance) const = 0;
  virtual bool is_pure_state(const StateVec& s) const = 0;
  virtual bool is_pure_transformation(const TransfMap& t) const = 0;
  virtual bool is_internal(const StateVec& s) const = 0;
  virtual double operational_norm(const StateVec& s) const = 0;

  // Canonical objects ---------------------------------------------------------
  virtual EffectVec deterministic_effect(const SystemRef& a) const = 0;
  virtual StateVec invariant_state(const SystemRef& a) const = 0;
  /// index 0 is the computational maximal set; other indices are seeded
  /// random maximal sets.
  virtual std::vector<StateVec> pure_maximal_set(const SystemRef& a, int index) const {
    (void)a, (void)index;
    throw Unsupported(id() + ": pure_maximal_set");
  }

  // Sampling ------------------------------------------------------------------
  virtual StateVec sample_state(const SystemRef& a, Rng& rng) const = 0;
  virtual StateVec sample_pure_state(const SystemRef& a, Rng& rng) const {
    (void)a, (void)rng;
    throw Unsupported(id() + ": sample_pure_state");
  }
  virtual EffectVec sample_extremal_effect(const SystemRef& a, Rng& rng) const {
    (void)a, (void)rng;
    throw Unsupported(id() + ": sample_extremal_effect");
  }
  virtual std::vector<EffectVec> sample_measurement(const SystemRef& a, int outcomes,
                                                    Rng& rng) const = 0;
  virtual TransfMap reversible_sample(const SystemRef& a, Rng& rng) const {
    (void)a, (void)rng;
    throw Unsupported(id() + ": reversible_sample");
  }
  virtual TransfMap sample_pure_transformation(const SystemRef& in, const SystemRef& out,
                                               Rng& rng) const {
    (void)in, (void)out, (void)rng;
    throw Unsupported(id() + ": sample_pure_transformation");
  }
  virtual TransfMap sample_channel(const SystemRef& in, const SystemRef& out, Rng& rng) const {
    (void)in, (void)out, (void)rng;
    throw Unsupported(id() + ": sample_channel");
  }

  // Faces and discrimination --------------------------------------------------
  /// Effect that is certain on the face generated by `s` and null on its
  /// orthogonal complement.
  virtual EffectVec support_effect(const StateVec& s) const {
    (void)s;
    throw Unsupported(id() + ": support_effect");
  }
  /// A pure normalized state orthogonal to the support of `s`, or nullopt
  /// when `s` is internal.
  virtual std::optional<StateVec> orthogonal_pure_state(const StateVec& s) const {
    (void)s;
    throw Unsupported(id() + ": orthogonal_pure_state");
  }

  // Seeded convenience overloads.
  StateVec sample_pure_state(const SystemRef& a, std::uint64_t seed) const {
    Rng rng(seed);
    return sample_pure_state(a, rng);
  }
  TransfMap reversible_sample(const SystemRef& a, std::uint64_t seed) const {
    Rng rng(seed);
    return reversible_sample(a, rng);
  }

  // Derived constructions (non-virtual) ---------------------------------------

  void require_own(const SystemRef& a) const {
    if (!a.is_trivial() && a.backend_id() != id()) {
      throw TypeMismatch("system " + a.to_string() + " does not belong to backend " + id());
    }
  }

  TransfMap make_transformation(const SystemRef& in, const SystemRef& out,
                                Eigen::MatrixXcd kernel) const {
    require_own(in);
    require_own(out);
    Eigen::MatrixXd m = coordinate_matrix(kernel, in, out);
    if (in.is_trivial() && out.is_trivial()) {
      const double s = kernel(0, 0).real();
      TransfMap::ExtensionRule ext = [s](const SystemRef& r) -> Eigen::MatrixXd {
        const int D = backend_for_id(r.backend_id()).dims(r).D;
        return s * Eigen::MatrixXd::Identity(D, D);
      };
      return TransfMap(in, out, std::move(m), std::move(kernel), std::move(ext));
    }
    const TheoryBackend* self = this;
    TransfMap::ExtensionRule ext = [self, kernel, in, out](const SystemRef& r) {
      self->require_own(r);
      Eigen::MatrixXcd big =
          self->tensor_kernel(kernel, in, out, self->identity_kernel(r), r, r);
      return self->coordinate_matrix(big, compose_systems(in, r), compose_systems(out, r));
    };
    return TransfMap(in, out, std::move(m), std::move(kernel), std::move(ext));
  }

  TransfMap identity(const SystemRef& a) const {
    return make_transformation(a, a, identity_kernel(a));
  }
  TransfMap swap(const SystemRef& a, const SystemRef& b) const {
    return make_transformation(compose_systems(a, b), compose_systems(b, a), swap_kernel(a, b));
  }
  TransfMap as_transformation(const StateVec& s) const {
    return make_transformation(SystemRef::trivial(), s.system(), state_kernel(s));
  }
  TransfMap as_transformation(const EffectVec& a) const {
    return make_transformation(a.system(), SystemRef::trivial(), effect_kernel(a));
  }
  /// Diagram order: `first` then `second`, i.e. second ∘ first.
  TransfMap sequence(const TransfMap& first, const TransfMap& second) const {
    if (first.output() != second.input()) {
      throw TypeMismatch("wire mismatch: " + first.output().to_string() + " feeds " +
                         second.input().to_string());
    }
    return make_transformation(first.input(), second.output(), second.kernel() * first.kernel());
  }
  TransfMap tensor(const TransfMap& t, const TransfMap& u) const {
    return make_transformation(
        compose_systems(t.input(), u.input()), compose_systems(t.output(), u.output()),
        tensor_kernel(t.kernel(), t.input(), t.output(), u.kernel(), u.input(), u.output()));
  }
  TransfMap sum(const TransfMap& t, const TransfMap& u) const {
    if (t.input() != u.input() || t.output() != u.output()) {
      throw TypeMismatch("adding transformations of different types");
    }
    return make_transformation(t.input(), t.output(), t.kernel() + u.kernel());
  }
  TransfMap scale(double s, const TransfMap& t) const {
    return make_transformation(t.input(), t.output(), s * t.kernel());
  }
  TransfMap zero(const SystemRef& in, const SystemRef& out) const {
    const Eigen::MatrixXcd shape = identity_kernel(out);
    const Eigen::MatrixXcd shape_in = identity_kernel(in);
    return make_transformation(in, out, Eigen::MatrixXcd::Zero(shape.rows(), shape_in.cols()));
  }

  StateVec tensor(const StateVec& a, const StateVec& b) const {
    TransfMap t = tensor(as_transformation(a), as_transformation(b));
    return StateVec(t.output(), t.matrix().col(0));
  }
  EffectVec tensor(const EffectVec& a, const EffectVec& b) const {
    TransfMap t = tensor(as_transformation(a), as_transformation(b));
    return EffectVec(t.input(), t.matrix().row(0).transpose());
  }
  StateVec apply(const TransfMap& t, const StateVec& s) const {
    if (t.input() != s.system()) {
      throw TypeMismatch("wire mismatch: state on " + s.system().to_string() +
                         " into transformation from " + t.input().to_string());
    }
    return StateVec(t.output(), t.matrix() * s.coords());
  }

  /// Solves (a|ρ_i) = 1 over `samples` normalized states.
  DeterministicSlice deterministic_slice(const SystemRef& a, int samples, Rng& rng) const {
    const int D = dims(a).D;
    Eigen::MatrixXd rows(samples, D);
    for (int i = 0; i < samples; ++i) rows.row(i) = sample_state(a, rng).coords().transpose();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(samples);
    DeterministicSlice out;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(rows);
    cod.setThreshold(1e-9);
    out.particular = cod.solve(ones);
    out.residual = (rows * out.particular - ones).cwiseAbs().maxCoeff();
    out.directions = linalg::null_space(rows, 1e-8 * std::max(1.0, rows.norm()));
    return out;
  }

  /// Causality, checked once: the deterministic effect of a representative
  /// atomic system is unique and coincides with `deterministic_effect`.
  bool causal() const {
    std::call_once(causal_once_, [this] {
      Rng rng(0x5eed);
      SystemRef a = representative_system();
      const int D = dims(a).D;
      DeterministicSlice slice = deterministic_slice(a, D + 4, rng);
      causal_ = slice.directions.cols() == 0 && slice.residual < 1e-8 &&
                (slice.particular - deterministic_effect(a).coords()).cwiseAbs().maxCoeff() < 1e-8;
    });
    return causal_;
  }

  virtual SystemRef representative_system() const { return SystemRef::atomic(id(), 2); }

 private:
  mutable std::once_flag causal_once_;
  mutable bool causal_ = false;
};

inline bool register_backend(const TheoryBackend* backend) {
  std::lock_guard<std::mutex> lock(detail::registry_mutex());
  detail::registry()[backend->id()] = backend;
  return true;
}

}  // namespace optforge
