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
#include <numeric>

#include "optforge/backend.hpp"

namespace optforge {

/// Classical probability theory. A system with n outcomes has St_R = R^n,
/// states are nonnegative vectors, effects are [0,1]-valued functionals and
/// transformations are substochastic matrices (columns indexed by input).
/// The kernel of a transformation is its matrix.
class ClassicalBackend : public TheoryBackend {
 public:
  using TheoryBackend::reversible_sample;
  using TheoryBackend::sample_pure_state;

  static constexpr int kMaxAlphabet = 1296;

  std::string id() const override { return "classical"; }

  Dims dims(const SystemRef& a) const override {
    require_own(a);
    const int n = a.hilbert_dim();
    for (int f : a.factors())
      if (f < 2 || f > 64) throw DomainError("classical atomic size must be in [2, 64]");
    if (n > kMaxAlphabet) throw DomainError("classical composite too large: " + a.to_string());
    return {n, n};
  }

  bool locally_tomographic() const override { return true; }
  std::vector<SystemRef> reference_requirement(const SystemRef&) const override {
    return {SystemRef::trivial()};
  }

  Eigen::MatrixXd coordinate_matrix(const Eigen::MatrixXcd& kernel, const SystemRef&,
                                    const SystemRef&) const override {
    return kernel.real();
  }
  Eigen::MatrixXcd identity_kernel(const SystemRef& a) const override {
    const int n = a.is_trivial() ? 1 : dims(a).D;
    return Eigen::MatrixXcd::Identity(n, n);
  }
  Eigen::MatrixXcd swap_kernel(const SystemRef& a, const SystemRef& b) const override {
    const int na = a.is_trivial() ? 1 : dims(a).D;
    const int nb = b.is_trivial() ? 1 : dims(b).D;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(na * nb, na * nb);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) p(j * na + i, i * nb + j) = 1.0;
    return p;
  }
  Eigen::MatrixXcd tensor_kernel(const Eigen::MatrixXcd& k1, const SystemRef&, const SystemRef&,
                                 const Eigen::MatrixXcd& k2, const SystemRef&,
                                 const SystemRef&) const override {
    return linalg::kron(k1, k2);
  }
  Eigen::MatrixXcd state_kernel(const StateVec& s) const override {
    return s.coords().cast<std::complex<double>>();
  }
  Eigen::MatrixXcd effect_kernel(const EffectVec& a) const override {
    return a.coords().transpose().cast<std::complex<double>>();
  }

  bool is_state(const StateVec& s, double tol = kConeTolerance) const override {
    return s.coords().size() == size(s.system()) && (s.coords().size() == 0 || s.coords().minCoeff() >= -tol);
  }
  bool is_effect(const EffectVec& a, double tol = kConeTolerance) const override {
    return a.coords().size() == size(a.system()) &&
           (a.coords().size() == 0 || (a.coords().minCoeff() >= -tol && a.coords().maxCoeff() <= 1 + tol));
  }
  bool is_transformation(const TransfMap& t, double tol = kConeTolerance) const override {
    const Eigen::MatrixXd& m = t.matrix();
    if (m.size() == 0) return true;
    if (m.minCoeff() < -tol) return false;
    return m.colwise().sum().maxCoeff() <= 1 + tol;
  }
  /// Vertex indicators (up to scale).
  bool is_pure_state(const StateVec& s) const override { return nonzeros(s.coords()) <= 1; }
  /// Single-entry matrices λ|j><i|: anything with two nonzero entries splits
  /// into two non-proportional events.
  bool is_pure_transformation(const TransfMap& t) const override {
    return nonzeros(t.matrix().reshaped()) <= 1;
  }
  bool is_internal(const StateVec& s) const override {
    return s.coords().size() > 0 && s.coords().minCoeff() > 1e-9;
  }
  double operational_norm(const StateVec& s) const override { return s.coords().sum(); }

  EffectVec deterministic_effect(const SystemRef& a) const override {
    return EffectVec(a, Eigen::VectorXd::Ones(size(a)));
  }
  StateVec invariant_state(const SystemRef& a) const override {
    const int n = size(a);
    return StateVec(a, Eigen::VectorXd::Constant(n, 1.0 / n));
  }
  std::vector<StateVec> pure_maximal_set(const SystemRef& a, int) const override {
    std::vector<StateVec> out;
    for (int i = 0; i < size(a); ++i) out.push_back(vertex(a, i));
    return out;
  }

  StateVec sample_state(const SystemRef& a, Rng& rng) const override {
    std::exponential_distribution<double> ex(1.0);
    Eigen::VectorXd p(size(a));
    for (int i = 0; i < p.size(); ++i) p(i) = ex(rng);
    return StateVec(a, p / p.sum());
  }
  StateVec sample_pure_state(const SystemRef& a, Rng& rng) const override {
    std::uniform_int_distribution<int> u(0, size(a) - 1);
    return vertex(a, u(rng));
  }
  EffectVec sample_extremal_effect(const SystemRef& a, Rng& rng) const override {
    std::bernoulli_distribution b(0.5);
    Eigen::VectorXd v(size(a));
    for (int i = 0; i < v.size(); ++i) v(i) = b(rng) ? 1.0 : 0.0;
    return EffectVec(a, v);
  }
  std::vector<EffectVec> sample_measurement(const SystemRef& a, int outcomes, Rng& rng) const override {
    const int n = size(a);
    std::exponential_distribution<double> ex(1.0);
    Eigen::MatrixXd m(outcomes, n);
    for (int x = 0; x < outcomes; ++x)
      for (int i = 0; i < n; ++i) m(x, i) = ex(rng);
    for (int i = 0; i < n; ++i) m.col(i) /= m.col(i).sum();
    std::vector<EffectVec> out;
    for (int x = 0; x < outcomes; ++x) out.emplace_back(a, m.row(x).transpose());
    return out;
  }
  TransfMap reversible_sample(const SystemRef& a, Rng& rng) const override {
    const int n = size(a);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) p(perm[static_cast<std::size_t>(i)], i) = 1.0;
    return make_transformation(a, a, p);
  }
  TransfMap sample_pure_transformation(const SystemRef& in, const SystemRef& out,
                                       Rng& rng) const override {
    const int ni = size(in), no = size(out);
    std::uniform_int_distribution<int> ui(0, ni - 1), uo(0, no - 1);
    std::uniform_real_distribution<double> lam(0.1, 1.0);
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(no, ni);
    k(uo(rng), ui(rng)) = lam(rng);
    return make_transformation(in, out, k);
  }
  TransfMap sample_channel(const SystemRef& in, const SystemRef& out, Rng& rng) const override {
    const int ni = size(in), no = size(out);
    std::exponential_distribution<double> ex(1.0);
    Eigen::MatrixXd m(no, ni);
    for (int i = 0; i < ni; ++i) {
      for (int j = 0; j < no; ++j) m(j, i) = ex(rng);
      m.col(i) /= m.col(i).sum();
    }
    return make_transformation(in, out, m.cast<std::complex<double>>());
  }

  EffectVec support_effect(const StateVec& s) const override {
    Eigen::VectorXd v = (s.coords().array() > 1e-9).cast<double>();
    return EffectVec(s.system(), v);
  }
  std::optional<StateVec> orthogonal_pure_state(const StateVec& s) const override {
    for (int i = 0; i < s.coords().size(); ++i)
      if (std::abs(s.coords()(i)) <= 1e-9) return vertex(s.system(), i);
    return std::nullopt;
  }

  StateVec vertex(const SystemRef& a, int i) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size(a));
    v(i) = 1.0;
    return StateVec(a, v);
  }

 private:
  int size(const SystemRef& a) const { return a.is_trivial() ? 1 : dims(a).D; }

  template <typename V>
  static int nonzeros(const V& v) {
    int c = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(v(i)) > 1e-12) ++c;
    return c;
  }
};

inline SystemRef classical_system(int n) { return SystemRef::atomic("classical", n); }

inline const ClassicalBackend& classical() {
  static const ClassicalBackend b;
  return b;
}

namespace detail {
inline const bool kClassicalRegistered = register_backend(&classical());
}  // namespace detail

}  // namespace optforge
