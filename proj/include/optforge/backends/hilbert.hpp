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
#include <mutex>

#include "optforge/backend.hpp"
#include "optforge/linalg.hpp"

namespace optforge {

/// Quantum theory on complex Hilbert spaces, or (with `real_only`) on real
/// Hilbert spaces.
///
/// Coordinates are taken in the orthonormal Hermitian basis of
/// linalg::hermitian_basis, so the effect/state pairing is the Hilbert-Schmidt
/// inner product Tr[E ρ]. For real quantum theory only the symmetric part of
/// the basis is used and D = d(d+1)/2. Kernels are superoperators acting on
/// row-major vectorized operators; real-theory kernels are the complex-linear
/// extension of maps with real Kraus operators.
class HilbertBackend final : public TheoryBackend {
 public:
  using TheoryBackend::reversible_sample;
  using TheoryBackend::sample_pure_state;
  using cd = std::complex<double>;

  static constexpr int kMaxAtomicDim = 5;
  static constexpr int kMaxCompositeDim = 36;

  explicit HilbertBackend(bool real_only) : real_(real_only) {}

  bool real_only() const { return real_; }

  std::string id() const override { return real_ ? "realqt" : "quantum"; }

  Dims dims(const SystemRef& a) const override {
    if (a.is_trivial()) return {1, 1};
    require_own(a);
    for (int f : a.factors()) {
      if (f < 2 || f > kMaxAtomicDim) {
        throw DomainError(id() + " atomic dimension must be in [2, 5], got " + std::to_string(f));
      }
    }
    const int d = a.hilbert_dim();
    if (d > kMaxCompositeDim) throw DomainError("composite too large: " + a.to_string());
    return {real_ ? d * (d + 1) / 2 : d * d, d};
  }

  bool locally_tomographic() const override { return !real_; }

  std::vector<SystemRef> reference_requirement(const SystemRef& a) const override {
    if (!real_ || a.is_trivial()) return {SystemRef::trivial()};
    return {SystemRef::trivial(), a};
  }

  // Vectorization -------------------------------------------------------------

  const std::vector<linalg::BasisElement>& basis(int d) const {
    std::lock_guard<std::mutex> lock(basis_mutex_);
    auto it = basis_cache_.find(d);
    if (it == basis_cache_.end()) it = basis_cache_.emplace(d, linalg::hermitian_basis(d, real_)).first;
    return it->second;
  }

  Eigen::VectorXd vectorize(const Eigen::MatrixXcd& h, double tol = 1e-9) const {
    if (!linalg::is_hermitian(h, tol)) throw DomainError("vectorize: operator is not Hermitian");
    if (real_ && h.imag().cwiseAbs().maxCoeff() > tol) {
      throw DomainError("vectorize: real theory requires a real symmetric operator");
    }
    const int d = static_cast<int>(h.rows());
    const auto& b = basis(d);
    Eigen::VectorXd c(static_cast<long>(b.size()));
    for (std::size_t k = 0; k < b.size(); ++k) {
      cd acc = 0;
      for (const auto& e : b[k].entries) acc += e.value * h(e.col, e.row);
      c(static_cast<long>(k)) = acc.real();
    }
    return c;
  }

  Eigen::MatrixXcd devectorize(const Eigen::VectorXd& c, int d) const {
    const auto& b = basis(d);
    if (static_cast<std::size_t>(c.size()) != b.size()) {
      throw TypeMismatch("devectorize: coordinate length does not match dimension");
    }
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t k = 0; k < b.size(); ++k)
      for (const auto& e : b[k].entries) h(e.row, e.col) += c(static_cast<long>(k)) * e.value;
    return h;
  }

  Eigen::MatrixXcd density(const StateVec& s) const {
    return devectorize(s.coords(), dims(s.system()).d);
  }
  Eigen::MatrixXcd effect_operator(const EffectVec& a) const {
    return devectorize(a.coords(), dims(a.system()).d);
  }
  StateVec state(const SystemRef& a, const Eigen::MatrixXcd& rho) const {
    check_size(a, rho);
    return StateVec(a, vectorize(rho));
  }
  EffectVec effect(const SystemRef& a, const Eigen::MatrixXcd& e) const {
    check_size(a, e);
    return EffectVec(a, vectorize(e));
  }
  StateVec pure_state(const SystemRef& a, const Eigen::VectorXcd& ket) const {
    Eigen::VectorXcd k = ket / ket.norm();
    return state(a, k * k.adjoint());
  }

  TransfMap from_kraus(const SystemRef& in, const SystemRef& out,
                       const std::vector<Eigen::MatrixXcd>& kraus) const {
    if (kraus.empty()) throw DomainError("from_kraus: empty Kraus family");
    for (const auto& k : kraus) {
      if (k.rows() != dims(out).d || k.cols() != dims(in).d) {
        throw TypeMismatch("from_kraus: Kraus operator shape does not match systems");
      }
      if (real_ && k.imag().cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("from_kraus: real theory requires real Kraus operators");
      }
    }
    return make_transformation(in, out, linalg::superop_from_kraus(kraus));
  }
  TransfMap from_unitary(const SystemRef& a, const Eigen::MatrixXcd& u) const {
    return from_kraus(a, a, {u});
  }

  /// Choi operator Σ_ij T(|i><j|) ⊗ |i><j| (output factor first).
  Eigen::MatrixXcd choi_matrix(const TransfMap& t) const {
    return linalg::choi_from_superop(t.kernel(), dims(t.input()).d, dims(t.output()).d);
  }

  Eigen::MatrixXcd apply_operator(const TransfMap& t, const Eigen::MatrixXcd& x) const {
    return linalg::apply_superop(t.kernel(), x, dims(t.output()).d);
  }

  // Kernel algebra -------------------------------------------------------------

  Eigen::MatrixXd coordinate_matrix(const Eigen::MatrixXcd& s, const SystemRef& in,
                                    const SystemRef& out) const override {
    const int di = dims(in).d, dout = dims(out).d;
    const auto& bi = basis(di);
    const auto& bo = basis(dout);
    Eigen::MatrixXd m(static_cast<long>(bo.size()), static_cast<long>(bi.size()));
    for (std::size_t l = 0; l < bi.size(); ++l) {
      for (std::size_t k = 0; k < bo.size(); ++k) {
        cd acc = 0;
        for (const auto& eo : bo[k].entries)
          for (const auto& ei : bi[l].entries)
            acc += eo.value * ei.value * s(eo.col * dout + eo.row, ei.row * di + ei.col);
        m(static_cast<long>(k), static_cast<long>(l)) = acc.real();
      }
    }
    return m;
  }

  Eigen::MatrixXcd identity_kernel(const SystemRef& a) const override {
    const int d = dims(a).d;
    return Eigen::MatrixXcd::Identity(d * d, d * d);
  }

  Eigen::MatrixXcd swap_kernel(const SystemRef& a, const SystemRef& b) const override {
    Eigen::MatrixXcd p = linalg::permutation_unitary({dims(a).d, dims(b).d}, {1, 0});
    return linalg::kron(p, Eigen::MatrixXcd(p.conjugate()));
  }

  Eigen::MatrixXcd tensor_kernel(const Eigen::MatrixXcd& s1, const SystemRef& in1,
                                 const SystemRef& out1, const Eigen::MatrixXcd& s2,
                                 const SystemRef& in2, const SystemRef& out2) const override {
    const int i1 = dims(in1).d, o1 = dims(out1).d, i2 = dims(in2).d, o2 = dims(out2).d;
    const int dout = o1 * o2, din = i1 * i2;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dout * dout, din * din);
    std::vector<std::pair<std::pair<int, int>, cd>> nz2;
    for (int r2 = 0; r2 < s2.rows(); ++r2)
      for (int c2 = 0; c2 < s2.cols(); ++c2)
        if (s2(r2, c2) != cd(0)) nz2.push_back({{r2, c2}, s2(r2, c2)});
    for (int r1 = 0; r1 < s1.rows(); ++r1) {
      const int ap = r1 / o1, ap2 = r1 % o1;
      for (int c1 = 0; c1 < s1.cols(); ++c1) {
        const cd v1 = s1(r1, c1);
        if (v1 == cd(0)) continue;
        const int a = c1 / i1, a2 = c1 % i1;
        for (const auto& [rc, v2] : nz2) {
          const int bp = rc.first / o2, bp2 = rc.first % o2;
          const int b = rc.second / i2, b2 = rc.second % i2;
          const int row = (ap * o2 + bp) * dout + (ap2 * o2 + bp2);
          const int col = (a * i2 + b) * din + (a2 * i2 + b2);
          s(row, col) += v1 * v2;
        }
      }
    }
    return s;
  }

  Eigen::MatrixXcd state_kernel(const StateVec& s) const override {
    return linalg::vec(density(s));
  }
  Eigen::MatrixXcd effect_kernel(const EffectVec& a) const override {
    Eigen::MatrixXcd e = effect_operator(a);
    return linalg::vec(e.transpose()).transpose();
  }

  // Membership -------------------------------------------------------------------

  bool is_state(const StateVec& s, double tol = kConeTolerance) const override {
    if (s.coords().size() != dims(s.system()).D) return false;
    return linalg::min_eigenvalue(density(s)) >= -tol;
  }
  bool is_effect(const EffectVec& a, double tol = kConeTolerance) const override {
    if (a.coords().size() != dims(a.system()).D) return false;
    Eigen::MatrixXcd e = effect_operator(a);
    Eigen::VectorXd ev = linalg::eigenvalues(e);
    return ev.minCoeff() >= -tol && ev.maxCoeff() <= 1 + tol;
  }
  bool is_transformation(const TransfMap& t, double tol = kConeTolerance) const override {
    Eigen::MatrixXcd j = choi_matrix(t);
    if (!linalg::is_hermitian(j, 1e-9)) return false;
    if (real_ && j.imag().cwiseAbs().maxCoeff() > 1e-9) return false;
    const double slack = tol * std::max(1.0, static_cast<double>(j.rows()));
    if (linalg::min_eigenvalue(j) < -slack) return false;
    const int di = dims(t.input()).d, dout = dims(t.output()).d;
    std::vector<bool> keep = {false, true};
    Eigen::MatrixXcd tr = linalg::partial_trace(j, {dout, di}, keep);
    return linalg::max_eigenvalue(tr) <= 1 + slack;
  }
  bool is_pure_state(const StateVec& s) const override { return rank_one(density(s)); }
  bool is_pure_transformation(const TransfMap& t) const override {
    return rank_one(choi_matrix(t));
  }
  bool is_internal(const StateVec& s) const override {
    return linalg::min_eigenvalue(density(s)) > 1e-9;
  }
  double operational_norm(const StateVec& s) const override { return density(s).trace().real(); }

  // Canonical objects -------------------------------------------------------------

  EffectVec deterministic_effect(const SystemRef& a) const override {
    const int d = dims(a).d;
    return EffectVec(a, vectorize(Eigen::MatrixXcd::Identity(d, d)));
  }
  StateVec invariant_state(const SystemRef& a) const override {
    const int d = dims(a).d;
    return StateVec(a, vectorize(Eigen::MatrixXcd::Identity(d, d) / d));
  }
  std::vector<StateVec> pure_maximal_set(const SystemRef& a, int index) const override {
    const int d = dims(a).d;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
    if (index != 0) {
      Rng rng(static_cast<std::uint64_t>(index));
      u = linalg::random_unitary(d, real_, rng);
    }
    std::vector<StateVec> out;
    for (int i = 0; i < d; ++i) out.push_back(pure_state(a, u.col(i)));
    return out;
  }

  // Sampling ---------------------------------------------------------------------

  StateVec sample_state(const SystemRef& a, Rng& rng) const override {
    const int d = dims(a).d;
    return state(a, linalg::random_density(d, d, real_, rng));
  }
  StateVec sample_state_of_rank(const SystemRef& a, int rank, Rng& rng) const {
    const int d = dims(a).d;
    return state(a, linalg::random_density(d, rank, real_, rng));
  }
  StateVec sample_pure_state(const SystemRef& a, Rng& rng) const override {
    return pure_state(a, linalg::random_unit_vector(dims(a).d, real_, rng));
  }
  EffectVec sample_extremal_effect(const SystemRef& a, Rng& rng) const override {
    const int d = dims(a).d;
    std::uniform_int_distribution<int> rk(1, d);
    Eigen::MatrixXcd u = linalg::random_unitary(d, real_, rng);
    const int r = rk(rng);
    Eigen::MatrixXcd p = u.leftCols(r) * u.leftCols(r).adjoint();
    return effect(a, p);
  }
  std::vector<EffectVec> sample_measurement(const SystemRef& a, int outcomes, Rng& rng) const override {
    const int d = dims(a).d;
    std::vector<Eigen::MatrixXcd> g;
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(d, d);
    for (int x = 0; x < outcomes; ++x) {
      Eigen::MatrixXcd m = linalg::gaussian_matrix(d, d, real_, rng);
      g.push_back(m * m.adjoint());
      total += g.back();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(total);
    Eigen::MatrixXcd inv_sqrt = es.eigenvectors() *
                                es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                es.eigenvectors().adjoint();
    std::vector<EffectVec> out;
    for (const auto& m : g) {
      Eigen::MatrixXcd e = inv_sqrt * m * inv_sqrt;
      out.push_back(effect(a, 0.5 * (e + e.adjoint())));
    }
    return out;
  }
  TransfMap reversible_sample(const SystemRef& a, Rng& rng) const override {
    return from_unitary(a, linalg::random_unitary(dims(a).d, real_, rng));
  }
  TransfMap sample_pure_transformation(const SystemRef& in, const SystemRef& out,
                                       Rng& rng) const override {
    Eigen::MatrixXcd k = linalg::gaussian_matrix(dims(out).d, dims(in).d, real_, rng);
    std::uniform_real_distribution<double> shrink(0.3, 1.0);
    k *= shrink(rng) / linalg::operator_norm(k);
    return from_kraus(in, out, {k});
  }
  TransfMap sample_channel(const SystemRef& in, const SystemRef& out, Rng& rng) const override {
    return from_kraus(in, out, linalg::random_channel_kraus(dims(in).d, dims(out).d, 3, real_, rng));
  }

  EffectVec support_effect(const StateVec& s) const override {
    return effect(s.system(), linalg::support_projector(density(s), 1e-9));
  }
  std::optional<StateVec> orthogonal_pure_state(const StateVec& s) const override {
    Eigen::MatrixXcd rho = density(s);
    Eigen::MatrixXcd support = linalg::aligned_support_basis(rho, 1e-9);
    const int d = static_cast<int>(rho.rows());
    if (support.cols() == d) return std::nullopt;
    Eigen::MatrixXcd kernel = linalg::aligned_support_basis(
        Eigen::MatrixXcd::Identity(d, d) - support * support.adjoint(), 1e-9);
    return pure_state(s.system(), kernel.col(0));
  }

  /// Rank ≤ 1 with the second eigenvalue below 1e-8 of the first.
  static bool rank_one(const Eigen::MatrixXcd& h) {
    Eigen::VectorXd ev = linalg::eigenvalues(0.5 * (h + h.adjoint()));
    const long n = ev.size();
    if (n < 2) return true;
    const double top = ev(n - 1);
    if (top <= 1e-12) return true;
    return ev(n - 2) < 1e-8 * top;
  }

 private:
  void check_size(const SystemRef& a, const Eigen::MatrixXcd& m) const {
    const int d = dims(a).d;
    if (m.rows() != d || m.cols() != d) {
      throw TypeMismatch("operator of size " + std::to_string(m.rows()) + " on system " +
                         a.to_string());
    }
  }

  bool real_;
  mutable std::mutex basis_mutex_;
  mutable std::map<int, std::vector<linalg::BasisElement>> basis_cache_;
};

inline const HilbertBackend& quantum() {
  static const HilbertBackend b(false);
  return b;
}

inline const HilbertBackend& realqt() {
  static const HilbertBackend b(true);
  return b;
}

namespace detail {
inline const bool kQuantumRegistered = register_backend(&quantum());
inline const bool kRealRegistered = register_backend(&realqt());
}  // namespace detail

inline SystemRef quantum_system(int d) { return SystemRef::atomic("quantum", d); }
inline SystemRef realqt_system(int d) { return SystemRef::atomic("realqt", d); }

}  // namespace optforge
