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

// Constructions on Hilbert-space backends: Bell states and the Choi map,
// teleportation and entanglement swapping, steering, daggers, spectral and
// Schmidt decompositions, faces and projections, superposition, maximal-set
// equivalence and the Bloch ball.
//
// Operator-level helpers work on matrices directly so that they are not
// limited by the composite-size caps of the coordinate representation.

#include <string>
#include <vector>

#include "optforge/axioms.hpp"
#include "optforge/backends.hpp"
#include "optforge/linrep.hpp"
#include "optforge/report.hpp"

namespace optforge {

namespace detail {

inline const HilbertBackend& require_hilbert(const SystemRef& a, const char* what) {
  const HilbertBackend* h = as_hilbert(backend_of(a));
  if (!h) throw DomainError(std::string(what) + " needs a Hilbert-space backend, got " + a.backend_id());
  return *h;
}

/// Unit ket of a rank-one density matrix, phase-fixed so that its largest
/// component is real and positive.
inline Eigen::VectorXcd ket_of(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXcd v = es.eigenvectors().col(rho.rows() - 1);
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  return v * (std::abs(v(k)) / v(k));
}

inline double max_abs_c(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace detail

// Bell state and Choi map ---------------------------------------------------------

struct BellState {
  SystemRef system;     // A
  SystemRef conjugate;  // Ā: the same Hilbert dimension, transpose taken in the computational basis
  StateVec state;       // |Ω><Ω| on A⊗Ā, |Ω> = Σ|ii>/√d
};

inline Eigen::VectorXcd omega_ket(int d) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

inline BellState bell_state(const SystemRef& a) {
  const HilbertBackend& h = detail::require_hilbert(a, "bell_state");
  const int d = h.dims(a).d;
  BellState out{a, a, {}};
  out.state = h.pure_state(compose_systems(a, a), omega_ket(d));
  return out;
}

/// Φ_T = (T ⊗ I)Φ on C⊗Ā for T: A → C.
inline StateVec choi(const TransfMap& t) {
  BellState phi = bell_state(t.input());
  return apply_extended(t, phi.state);
}

/// Inverse of `choi`, for a state on C⊗Ā with Ā of the same dimension as `input`.
inline TransfMap choi_inverse(const StateVec& s, const SystemRef& input) {
  const HilbertBackend& h = detail::require_hilbert(input, "choi_inverse");
  const SystemRef output = strip_suffix(s.system(), input);
  const int di = h.dims(input).d, dout = h.dims(output).d;
  const Eigen::MatrixXcd j = static_cast<double>(di) * h.density(s);
  TransfMap t = h.make_transformation(input, output, linalg::superop_from_choi(j, di, dout));
  if (!h.is_state(s) || !h.is_transformation(t)) {
    throw DomainError("choi_inverse: state is not the Choi state of a transformation");
  }
  return t;
}

// Teleportation ------------------------------------------------------------------------

/// Output of conclusive teleportation applied to ρ, before renormalization.
inline Eigen::MatrixXcd teleport(const Eigen::MatrixXcd& rho) {
  const int d = static_cast<int>(rho.rows());
  const Eigen::VectorXcd omega = omega_ket(d);
  const Eigen::MatrixXcd bell = omega * omega.adjoint();
  const Eigen::MatrixXcd joint = linalg::kron(rho, bell);
  const Eigen::MatrixXcd e = linalg::kron(bell, Eigen::MatrixXcd::Identity(d, d));
  return linalg::partial_trace(e * joint, {d, d, d}, {false, false, true});
}

struct TeleportationCertificate {
  EffectVec effect;   // E on Ā⊗A (the Bell projector)
  double p = 0;       // success probability
  int D = 0, d = 0;
  double identity_residual = 0;    // ‖(E ⊗ I)(I ⊗ Φ) − p·I‖ on coordinates
  double trace_value = 0;          // Tr[Φ E] from product-basis coefficient matrices
  double trace_residual = 0;       // |Tr[ΦE] − p·D|
  double decomposition_min_eig = 0;  // of τ = (χ⊗χ − pΦ)/(1 − p)
  double factorization_residual = 0; // ‖E − Φ†∘SWAP‖
  bool effect_pure = false;
  bool passed = false;
};

/// Coefficients of an operator on A⊗A in the product basis ω_i ⊗ ω_j of the
/// atomic Hermitian basis.
inline Eigen::MatrixXd product_coefficients(const HilbertBackend& h, const Eigen::MatrixXcd& x, int d) {
  const auto& basis = h.basis(d);
  const auto n = static_cast<long>(basis.size());
  Eigen::MatrixXd c(n, n);
  std::vector<Eigen::MatrixXcd> dense;
  for (const auto& b : basis) dense.push_back(linalg::dense(b, d));
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      c(i, j) = (x * linalg::kron(dense[static_cast<std::size_t>(i)], dense[static_cast<std::size_t>(j)])).trace().real();
  return c;
}

inline TeleportationCertificate teleportation(const SystemRef& a) {
  const HilbertBackend& h = detail::require_hilbert(a, "teleportation");
  const Dims dm = h.dims(a);
  const int d = dm.d;
  const SystemRef aa = compose_systems(a, a);
  TeleportationCertificate c;
  c.D = dm.D;
  c.d = d;
  BellState phi = bell_state(a);
  const Eigen::MatrixXcd bell = h.density(phi.state);
  c.effect = h.effect(aa, bell);
  c.effect_pure = h.is_pure_state(StateVec(aa, c.effect.coords()));

  // Input on wire 1, Φ on wires 2-3, E on wires 1-2, output on wire 3. The three-wire
  // composite exceeds the coordinate caps for d > 3, so contract operators directly.
  Eigen::MatrixXd tele(dm.D, dm.D);
  const auto& basis = h.basis(d);
  for (int k = 0; k < dm.D; ++k) {
    const Eigen::MatrixXcd out = teleport(linalg::dense(basis[static_cast<std::size_t>(k)], d));
    tele.col(k) = h.vectorize(out);
  }
  c.p = tele.trace() / dm.D;
  c.identity_residual = (tele - c.p * Eigen::MatrixXd::Identity(dm.D, dm.D)).cwiseAbs().maxCoeff();

  const Eigen::MatrixXd phi_c = product_coefficients(h, bell, d);
  const Eigen::MatrixXd e_c = product_coefficients(h, bell, d);
  c.trace_value = (e_c * phi_c).trace();
  c.trace_residual = std::abs(c.trace_value - c.p * dm.D);

  const Eigen::MatrixXcd chi2 = Eigen::MatrixXcd::Identity(d * d, d * d) / static_cast<double>(d * d);
  const Eigen::MatrixXcd tau = (chi2 - c.p * bell) / (1 - c.p);
  c.decomposition_min_eig = linalg::min_eigenvalue(tau);

  const Eigen::MatrixXcd sw = linalg::permutation_unitary({d, d}, {1, 0});
  c.factorization_residual = detail::max_abs_c(bell - sw.adjoint() * bell * sw);

  c.passed = std::abs(c.p - 1.0 / (d * d)) <= kProbabilityTolerance && c.identity_residual <= kProbabilityTolerance &&
             c.trace_residual <= kProbabilityTolerance && dm.D == d * d &&
             c.decomposition_min_eig >= -kConeTolerance && c.factorization_residual <= kProbabilityTolerance &&
             c.effect_pure;
  return c;
}

struct SwapCertificate {
  double p = 0;
  double residual = 0;  // ‖(I ⊗ E ⊗ I)(Φ⊗Φ) − p Φ‖ after tracing the middle pair
  double probability = 0;
  bool passed = false;
};

inline SwapCertificate entanglement_swap_check(int d) {
  SwapCertificate c;
  c.p = 1.0 / (d * d);
  const Eigen::VectorXcd omega = omega_ket(d);
  const Eigen::MatrixXcd bell = omega * omega.adjoint();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd in = linalg::kron(bell, bell);
  const Eigen::MatrixXcd e = linalg::kron(linalg::kron(id, bell), id);
  const Eigen::MatrixXcd post = linalg::partial_trace(e * in, {d, d, d, d}, {true, false, false, true});
  c.residual = detail::max_abs_c(post - c.p * bell);
  c.probability = post.trace().real();
  c.passed = c.residual <= kProbabilityTolerance && std::abs(c.probability - c.p) <= kProbabilityTolerance;
  return c;
}

// Steering -----------------------------------------------------------------------------

/// Coefficient matrix M (d_A × d_B) of a pure state on A⊗B, |Ψ> = Σ M_ij |i>|j>.
inline Eigen::MatrixXcd coefficient_matrix(const StateVec& psi, const SystemRef& a, const SystemRef& b) {
  const HilbertBackend& h = detail::require_hilbert(a, "coefficient_matrix");
  if (compose_systems(a, b) != psi.system()) throw TypeMismatch("state does not live on A⊗B");
  if (!h.is_pure_state(psi)) throw DomainError("state is not pure");
  const Eigen::MatrixXcd rho = h.density(psi);
  const Eigen::VectorXcd k = detail::ket_of(rho) * std::sqrt(std::max(0.0, rho.trace().real()));
  const int da = h.dims(a).d, db = h.dims(b).d;
  Eigen::MatrixXcd m(da, db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) m(i, j) = k(i * db + j);
  return m;
}

/// Effects {b_x} on B with Tr_B[(I ⊗ b_x)Ψ] = ρ_x.
inline std::vector<EffectVec> steer(const StateVec& psi, const SystemRef& a, const SystemRef& b,
                                    const std::vector<StateVec>& ensemble) {
  const HilbertBackend& h = detail::require_hilbert(a, "steer");
  if (ensemble.empty()) throw DomainError("steer: empty ensemble");
  const Eigen::MatrixXcd m = coefficient_matrix(psi, a, b);
  const Eigen::MatrixXcd marg = m * m.adjoint();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(marg.rows(), marg.cols());
  for (const auto& r : ensemble) {
    if (r.system() != a) throw TypeMismatch("steer: ensemble member on the wrong system");
    total += h.density(r);
  }
  if (detail::max_abs_c(total - marg) > 1e-8) throw DomainError("steer: ensemble does not sum to the marginal");
  const Eigen::MatrixXcd pinv = linalg::pseudo_inverse(m, 1e-10);
  const int db = h.dims(b).d;
  const Eigen::MatrixXcd q = pinv * m;  // projector onto the co-support on B
  const Eigen::MatrixXcd rest = (Eigen::MatrixXcd::Identity(db, db) - q) / static_cast<double>(ensemble.size());
  std::vector<EffectVec> out;
  for (const auto& r : ensemble) {
    const Eigen::MatrixXcd rho = h.density(r);
    Eigen::MatrixXcd bt = pinv * rho * pinv.adjoint() + rest;
    bt = 0.5 * (bt + bt.adjoint());
    if (detail::max_abs_c(m * bt * m.adjoint() - rho) > 1e-8) {
      throw DomainError("steer: ensemble member is not supported on the marginal's support");
    }
    out.push_back(h.effect(b, bt.transpose()));
  }
  return out;
}

/// Tr_B[(I ⊗ b)Ψ] as an (unnormalized) state on A.
inline StateVec steered_state(const StateVec& psi, const SystemRef& a, const SystemRef& b, const EffectVec& e) {
  const HilbertBackend& h = detail::require_hilbert(a, "steered_state");
  const TransfMap t = h.tensor(h.identity(a), h.as_transformation(e));
  (void)b;
  return h.apply(t, psi);
}

// Duality and decompositions ------------------------------------------------------------

/// The pure normalized effect α† with (α†|α) = 1.
inline EffectVec dagger(const StateVec& alpha) {
  const HilbertBackend& h = detail::require_hilbert(alpha.system(), "dagger");
  if (!h.is_pure_state(alpha)) throw DomainError("dagger: state is not pure");
  if (std::abs(operational_norm(alpha) - 1) > kProbabilityTolerance) {
    throw DomainError("dagger: state is not normalized");
  }
  return EffectVec(alpha.system(), alpha.coords());
}

struct SpectralDecomposition {
  std::vector<StateVec> states;      // a pure maximal set
  Eigen::VectorXd coefficients;      // decreasing
};

inline SpectralDecomposition spectral_decompose(const StateVec& v) {
  const HilbertBackend& h = detail::require_hilbert(v.system(), "spectral_decompose");
  const Eigen::MatrixXcd m = h.density(v);
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  if (h.real_only()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m.real() + m.real().transpose()));
    values = es.eigenvalues();
    vectors = es.eigenvectors().cast<linalg::cd>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }
  SpectralDecomposition out;
  out.coefficients.resize(d);
  for (int k = 0; k < d; ++k) {
    out.coefficients(k) = values(d - 1 - k);
    out.states.push_back(h.pure_state(v.system(), vectors.col(d - 1 - k)));
  }
  return out;
}

struct SchmidtDecomposition {
  Eigen::VectorXd probabilities;  // decreasing, zero terms dropped
  std::vector<StateVec> alpha;    // on A
  std::vector<StateVec> beta;     // on B
};

inline SchmidtDecomposition schmidt(const StateVec& psi, const SystemRef& a, const SystemRef& b) {
  const HilbertBackend& h = detail::require_hilbert(a, "schmidt");
  const Eigen::MatrixXcd m = coefficient_matrix(psi, a, b);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtDecomposition out;
  std::vector<double> p;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    const double s = svd.singularValues()(k);
    if (s * s <= 1e-14) continue;
    p.push_back(s * s);
    out.alpha.push_back(h.pure_state(a, svd.matrixU().col(k)));
    out.beta.push_back(h.pure_state(b, svd.matrixV().col(k).conjugate()));
  }
  out.probabilities = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<long>(p.size()));
  return out;
}

// Faces --------------------------------------------------------------------------------

struct Face {
  SystemRef system;
  Eigen::MatrixXcd projector;
  int rank = 0;
};

namespace detail {
inline Face face_of_projector(const SystemRef& a, Eigen::MatrixXcd p) {
  p = 0.5 * (p + p.adjoint());
  const int rank = static_cast<int>(std::lround(p.trace().real()));
  return Face{a, std::move(p), rank};
}

inline Eigen::MatrixXcd range_projector(const Eigen::MatrixXcd& basis) {
  return basis * basis.adjoint();
}
}  // namespace detail

inline Face face_from_states(const std::vector<StateVec>& states) {
  if (states.empty()) throw DomainError("face_from_states: empty state list");
  const HilbertBackend& h = detail::require_hilbert(states.front().system(), "face_from_states");
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(h.dims(states.front().system()).d, h.dims(states.front().system()).d);
  for (const auto& s : states) {
    if (s.system() != states.front().system()) throw TypeMismatch("face_from_states: mixed systems");
    sum += h.density(s);
  }
  return detail::face_of_projector(states.front().system(), linalg::support_projector(sum, 1e-9));
}

inline Face face_from_projector(const SystemRef& a, const Eigen::MatrixXcd& p) {
  detail::require_hilbert(a, "face_from_projector");
  return detail::face_of_projector(a, p);
}

inline EffectVec identifying_effect(const Face& f) {
  return detail::require_hilbert(f.system, "identifying_effect").effect(f.system, f.projector);
}

inline Face complement(const Face& f) {
  const auto n = f.projector.rows();
  return detail::face_of_projector(f.system, Eigen::MatrixXcd::Identity(n, n) - f.projector);
}

inline void require_same_system(const Face& f, const Face& g) {
  if (f.system != g.system) throw TypeMismatch("faces live on different systems");
}

/// F ∧ G: the range intersection, i.e. the kernel of 2I − P − Q.
inline Face meet(const Face& f, const Face& g) {
  require_same_system(f, g);
  const auto n = f.projector.rows();
  const Eigen::MatrixXcd k = 2.0 * Eigen::MatrixXcd::Identity(n, n) - f.projector - g.projector;
  return detail::face_of_projector(f.system, detail::range_projector(linalg::null_space(k, 1e-8)));
}

/// F ∨ G: the range of P + Q.
inline Face join(const Face& f, const Face& g) {
  require_same_system(f, g);
  return detail::face_of_projector(f.system, linalg::support_projector(f.projector + g.projector, 1e-8));
}

/// F ⪯ G.
inline bool contained_in(const Face& f, const Face& g, double tol = 1e-8) {
  return detail::max_abs_c(g.projector * f.projector - f.projector) <= tol;
}

inline bool same_face(const Face& f, const Face& g, double tol = 1e-8) {
  return detail::max_abs_c(f.projector - g.projector) <= tol;
}

/// Π_F(ρ) = P ρ P.
inline TransfMap projection(const Face& f) {
  const HilbertBackend& h = detail::require_hilbert(f.system, "projection");
  Eigen::MatrixXcd p = f.projector;
  if (h.real_only()) p = p.real().cast<linalg::cd>();
  return h.from_kraus(f.system, f.system, {p});
}

/// ω_F = (1/d_F) Σ α_x for the maximal set given by the columns of `frame`.
inline StateVec barycenter(const Face& f, const Eigen::MatrixXcd& frame) {
  const HilbertBackend& h = detail::require_hilbert(f.system, "barycenter");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(f.projector.rows(), f.projector.cols());
  for (int x = 0; x < frame.cols(); ++x) acc += frame.col(x) * frame.col(x).adjoint();
  return h.state(f.system, acc / static_cast<double>(frame.cols()));
}

/// A random orthonormal frame of the face's range.
inline Eigen::MatrixXcd random_frame(const Face& f, bool real_only, Rng& rng) {
  const Eigen::MatrixXcd range = linalg::support_basis(f.projector, 0.5);
  const Eigen::MatrixXcd u = linalg::random_unitary(static_cast<int>(range.cols()), real_only, rng);
  return range * u;
}

// Superposition -------------------------------------------------------------------------

namespace detail {
inline std::vector<Eigen::VectorXcd> kets_of(const HilbertBackend& h, const std::vector<StateVec>& set) {
  std::vector<Eigen::VectorXcd> out;
  for (const auto& s : set) {
    if (!h.is_pure_state(s)) throw DomainError("set contains a mixed state");
    out.push_back(ket_of(h.density(s)));
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (std::abs(out[i].dot(out[j])) > 1e-8) throw DomainError("set is not perfectly distinguishable");
  return out;
}
}  // namespace detail

/// A pure state ψ with (α_x†|ψ) = p_x, phases zero in the frame of the kets.
inline StateVec superpose(const std::vector<StateVec>& set, const std::vector<double>& probs) {
  if (set.empty()) throw DomainError("superpose: empty set");
  const HilbertBackend& h = detail::require_hilbert(set.front().system(), "superpose");
  if (probs.size() != set.size()) throw DomainError("superpose: need one probability per state");
  double total = 0;
  for (double p : probs) {
    if (p < -kProbabilityTolerance) throw DomainError("superpose: negative probability");
    total += p;
  }
  if (std::abs(total - 1) > kProbabilityTolerance) throw DomainError("superpose: probabilities do not sum to 1");
  const auto kets = detail::kets_of(h, set);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(kets.front().size());
  for (std::size_t x = 0; x < kets.size(); ++x) psi += std::sqrt(std::max(0.0, probs[x])) * kets[x];
  return h.pure_state(set.front().system(), psi);
}

/// Ã = A_0 + A_1 for pure maps with orthogonal input faces: Ã Π_{F_x} = A_x.
inline TransfMap superpose_transformations(const TransfMap& a0, const TransfMap& a1) {
  const HilbertBackend& h = detail::require_hilbert(a0.input(), "superpose_transformations");
  if (a0.input() != a1.input() || a0.output() != a1.output()) throw TypeMismatch("maps of different types");
  if (!h.is_pure_transformation(a0) || !h.is_pure_transformation(a1)) throw DomainError("maps are not pure");
  const int di = h.dims(a0.input()).d, dout = h.dims(a0.output()).d;
  auto k0 = linalg::kraus_from_superop(a0.kernel(), di, dout, 1e-10);
  auto k1 = linalg::kraus_from_superop(a1.kernel(), di, dout, 1e-10);
  if (k0.empty() || k1.empty()) throw DomainError("superpose_transformations: zero map");
  if (detail::max_abs_c(k0[0].adjoint() * k1[0]) > 1e-8 || detail::max_abs_c(k0[0] * k1[0].adjoint()) > 1e-8) {
    if (detail::max_abs_c(k0[0] * Eigen::MatrixXcd(k1[0].adjoint() * k1[0])) > 1e-8) {
      throw DomainError("superpose_transformations: input faces are not orthogonal");
    }
  }
  Eigen::MatrixXcd k = k0[0] + k1[0];
  if (h.real_only()) k = k.real().cast<linalg::cd>();
  return h.from_kraus(a0.input(), a0.output(), {k});
}

/// Input face of a pure map: the support of K†K.
inline Face input_face(const TransfMap& t) {
  const HilbertBackend& h = detail::require_hilbert(t.input(), "input_face");
  const int di = h.dims(t.input()).d, dout = h.dims(t.output()).d;
  auto ks = linalg::kraus_from_superop(t.kernel(), di, dout, 1e-10);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(di, di);
  for (const auto& k : ks) g += k.adjoint() * k;
  return detail::face_of_projector(t.input(), linalg::support_projector(g, 1e-9));
}

// Maximal sets and transitivity -----------------------------------------------------------

/// A reversible U with U α_x = β_x.
inline TransfMap maximal_set_equivalence(const std::vector<StateVec>& set_a, const std::vector<StateVec>& set_b) {
  if (set_a.empty() || set_b.empty()) throw DomainError("maximal_set_equivalence: empty set");
  const SystemRef& a = set_a.front().system();
  const SystemRef& b = set_b.front().system();
  const HilbertBackend& h = detail::require_hilbert(a, "maximal_set_equivalence");
  if (h.dims(a).d != h.dims(b).d || set_a.size() != set_b.size()) {
    throw DomainError("maximal_set_equivalence: dimension mismatch");
  }
  if (static_cast<int>(set_a.size()) != h.dims(a).d) throw DomainError("maximal_set_equivalence: sets are not maximal");
  const auto ka = detail::kets_of(h, set_a);
  const auto kb = detail::kets_of(h, set_b);
  const int d = h.dims(a).d;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t x = 0; x < ka.size(); ++x) u += kb[x] * ka[x].adjoint();
  if (h.real_only()) u = u.real().cast<linalg::cd>();
  return h.from_kraus(a, b, {u});
}

/// Completes a pure state to a pure maximal set.
inline std::vector<StateVec> complete_maximal_set(const StateVec& alpha) {
  const HilbertBackend& h = detail::require_hilbert(alpha.system(), "complete_maximal_set");
  Eigen::VectorXcd k = detail::ket_of(h.density(alpha));
  if (h.real_only()) k = k.real().cast<linalg::cd>();
  const Eigen::MatrixXcd rest = linalg::orthonormal_complement(k, h.real_only());
  std::vector<StateVec> out = {h.pure_state(alpha.system(), k)};
  for (int i = 0; i < rest.cols(); ++i) out.push_back(h.pure_state(alpha.system(), rest.col(i)));
  return out;
}

/// A reversible U with U α = β.
inline TransfMap connecting_reversible(const StateVec& alpha, const StateVec& beta) {
  return maximal_set_equivalence(complete_maximal_set(alpha), complete_maximal_set(beta));
}

struct InformationalDimension {
  int d = 0;
  bool consistent = true;
  double max_deviation = 0;  // of 1/(α†|χ) from the integer
};

inline InformationalDimension informational_dimension(const SystemRef& a, int samples, Rng& rng) {
  const HilbertBackend& h = detail::require_hilbert(a, "informational_dimension");
  const StateVec chi = h.invariant_state(a);
  InformationalDimension out;
  for (int i = 0; i < samples; ++i) {
    const double inv = 1.0 / pair(dagger(h.sample_pure_state(a, rng)), chi);
    const int r = static_cast<int>(std::lround(inv));
    if (i == 0) out.d = r;
    if (r != out.d) out.consistent = false;
    out.max_deviation = std::max(out.max_deviation, std::abs(inv - r));
  }
  return out;
}

// Bloch ball ----------------------------------------------------------------------------

struct BlochCertificate {
  int affine_dimension = 0;       // D − 1
  double pure_radius_error = 0;   // max | |r| − 1 | over sampled pure states
  double boundary_impurity = 0;   // max second eigenvalue of sampled boundary states
  bool boundary_pure = true;
  double orthogonality_error = 0; // max |MᵀM − I| over sampled reversibles
  double determinant_error = 0;   // max |det M − 1|
  bool passed = false;
};

inline Eigen::Vector3d bloch_vector(const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, linalg::cd(0, -1), linalg::cd(0, 1), 0;
  z << 1, 0, 0, -1;
  return {(rho * x).trace().real(), (rho * y).trace().real(), (rho * z).trace().real()};
}

inline BlochCertificate bloch_check(int samples, std::uint64_t seed) {
  const HilbertBackend& h = quantum();
  const SystemRef q = quantum_system(2);
  Rng rng(seed);
  BlochCertificate c;
  c.affine_dimension = h.dims(q).D - 1;
  for (int i = 0; i < samples; ++i) {
    const StateVec s = h.sample_pure_state(q, rng);
    c.pure_radius_error = std::max(c.pure_radius_error, std::abs(bloch_vector(h.density(s)).norm() - 1));
  }
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < samples; ++i) {
    Eigen::Vector3d r(n(rng), n(rng), n(rng));
    r.normalize();
    Eigen::MatrixXcd rho(2, 2);
    rho << 1 + r(2), linalg::cd(r(0), -r(1)), linalg::cd(r(0), r(1)), 1 - r(2);
    rho /= 2.0;
    const StateVec s = h.state(q, rho);
    const Eigen::VectorXd ev = linalg::eigenvalues(rho);
    c.boundary_impurity = std::max(c.boundary_impurity, std::abs(ev(0)));
    if (!h.is_state(s) || !h.is_pure_state(s)) c.boundary_pure = false;
  }
  Eigen::MatrixXcd paulis[3];
  paulis[0] = Eigen::MatrixXcd(2, 2);
  paulis[0] << 0, 1, 1, 0;
  paulis[1] = Eigen::MatrixXcd(2, 2);
  paulis[1] << 0, linalg::cd(0, -1), linalg::cd(0, 1), 0;
  paulis[2] = Eigen::MatrixXcd(2, 2);
  paulis[2] << 1, 0, 0, -1;
  for (int i = 0; i < samples; ++i) {
    const TransfMap u = h.reversible_sample(q, rng);
    Eigen::Matrix3d m;
    for (int j = 0; j < 3; ++j) {
      const Eigen::MatrixXcd out = h.apply_operator(u, paulis[j]);
      for (int k = 0; k < 3; ++k) m(k, j) = 0.5 * (paulis[k] * out).trace().real();
    }
    c.orthogonality_error = std::max(c.orthogonality_error, (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    c.determinant_error = std::max(c.determinant_error, std::abs(m.determinant() - 1));
  }
  c.passed = c.affine_dimension == 3 && c.pure_radius_error <= kProbabilityTolerance && c.boundary_pure &&
             c.orthogonality_error <= kProbabilityTolerance;
  return c;
}

}  // namespace optforge
