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

// Rebuilding the density-matrix representation of a theory presented in
// unknown linear coordinates.
//
// A presentation exposes sampled states and effects, a dagger map for pure
// states, a pure maximal set {α_m}, the projection onto each two-dimensional
// face F_mn and a qubit codec for that face. The reconstruction reads the
// diagonal of S_ρ from the daggers, the off-diagonals from the codecs, and
// aligns the per-face phase and conjugation gauges with a reference pure state
// and cycle tests on triples.

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "optforge/backends.hpp"
#include "optforge/report.hpp"

namespace optforge {

/// Qubit codec for a face: `encode` maps a coordinate vector to the real
/// parameters (τ_00, τ_11, Re τ_01, Im τ_01) of a 2×2 matrix; `decode` is its
/// inverse on the face.
struct QubitCodec {
  Eigen::MatrixXd encode;  // 4×D
  Eigen::MatrixXd decode;  // D×4
};

struct AbstractPresentation {
  int D = 0;
  int d = 0;
  std::vector<Eigen::VectorXd> states;       // sampled normalized states
  std::vector<Eigen::VectorXd> pure_states;  // sampled normalized pure states
  std::vector<Eigen::VectorXd> effects;      // sampled effects
  Eigen::VectorXd deterministic_effect;
  Eigen::MatrixXd dagger_map;                // pure state ↦ its dagger effect
  std::vector<Eigen::VectorXd> maximal_set;  // d pure states
  std::map<std::pair<int, int>, Eigen::MatrixXd> face_projection;  // Π_{F_mn}, m < n
  std::map<std::pair<int, int>, QubitCodec> codecs;

  Eigen::VectorXd dagger(const Eigen::VectorXd& pure) const { return dagger_map * pure; }

  Json to_json() const {
    Json j;
    j["schema"] = "presentation_v1";
    j["D"] = D;
    j["d"] = d;
    auto list = [](const std::vector<Eigen::VectorXd>& vs) {
      Json out = Json::array();
      for (const auto& v : vs) out.push_back(optforge::to_json(v));
      return out;
    };
    j["states"] = list(states);
    j["pure_states"] = list(pure_states);
    j["effects"] = list(effects);
    j["deterministic_effect"] = optforge::to_json(deterministic_effect);
    j["dagger_map"] = optforge::to_json(dagger_map);
    j["maximal_set"] = list(maximal_set);
    Json faces = Json::array();
    for (const auto& [mn, proj] : face_projection) {
      const QubitCodec& c = codecs.at(mn);
      faces.push_back({{"m", mn.first},
                       {"n", mn.second},
                       {"projection", optforge::to_json(proj)},
                       {"encode", optforge::to_json(c.encode)},
                       {"decode", optforge::to_json(c.decode)}});
    }
    j["faces"] = faces;
    return j;
  }

  static AbstractPresentation from_json(const Json& j) {
    AbstractPresentation p;
    try {
      p.D = j.at("D").get<int>();
      p.d = j.at("d").get<int>();
      auto list = [](const Json& a) {
        std::vector<Eigen::VectorXd> out;
        for (const auto& v : a) out.push_back(vector_from_json(v));
        return out;
      };
      p.states = list(j.at("states"));
      p.pure_states = list(j.at("pure_states"));
      p.effects = list(j.at("effects"));
      p.deterministic_effect = vector_from_json(j.at("deterministic_effect"));
      p.dagger_map = matrix_from_json(j.at("dagger_map"));
      p.maximal_set = list(j.at("maximal_set"));
      for (const auto& f : j.at("faces")) {
        const std::pair<int, int> mn{f.at("m").get<int>(), f.at("n").get<int>()};
        p.face_projection[mn] = matrix_from_json(f.at("projection"));
        p.codecs[mn] = QubitCodec{matrix_from_json(f.at("encode")), matrix_from_json(f.at("decode"))};
      }
    } catch (const nlohmann::json::exception& e) {
      throw DomainError(std::string("malformed presentation: ") + e.what());
    }
    p.validate();
    return p;
  }

  void validate() const {
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw DomainError("presentation: " + what);
    };
    need(d >= 2 && D == d * d, "D must equal d² for a Hilbert-space presentation");
    need(static_cast<int>(maximal_set.size()) == d, "maximal set must have d elements");
    need(dagger_map.rows() == D && dagger_map.cols() == D, "dagger map has the wrong shape");
    need(deterministic_effect.size() == D, "deterministic effect has the wrong size");
    for (const auto& v : states) need(v.size() == D, "state of the wrong size");
    for (const auto& v : pure_states) need(v.size() == D, "pure state of the wrong size");
    for (const auto& v : effects) need(v.size() == D, "effect of the wrong size");
    for (int m = 0; m < d; ++m)
      for (int n = m + 1; n < d; ++n) {
        need(face_projection.count({m, n}) && codecs.count({m, n}), "missing face data");
        const QubitCodec& c = codecs.at({m, n});
        need(c.encode.rows() == 4 && c.encode.cols() == D && c.decode.rows() == D && c.decode.cols() == 4,
             "codec has the wrong shape");
      }
  }
};

/// The hidden data behind `scramble_quantum`, for tests.
struct ScrambleTruth {
  Eigen::MatrixXd scramble;  // quantum coordinates ↦ presented coordinates
  Eigen::MatrixXcd frame;    // columns are the kets of the maximal set
};

namespace detail {

struct Scrambled {
  AbstractPresentation presentation;
  ScrambleTruth truth;
};

inline Eigen::Vector4d qubit_params(const Eigen::Matrix2cd& t) {
  return {t(0, 0).real(), t(1, 1).real(), t(0, 1).real(), t(0, 1).imag()};
}

inline Eigen::Matrix2cd qubit_matrix(const Eigen::Vector4d& p) {
  Eigen::Matrix2cd t;
  t << p(0), linalg::cd(p(2), p(3)), linalg::cd(p(2), -p(3)), p(1);
  return t;
}

inline Scrambled build_scrambled(int d, std::uint64_t seed, bool identity) {
  if (d < 2 || d > 4) throw DomainError("scramble_quantum: need 2 ≤ d ≤ 4");
  const HilbertBackend& q = quantum();
  const SystemRef a = quantum_system(d);
  const int D = d * d;
  Rng rng(seed);
  Scrambled out;
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(D, D);
  Eigen::MatrixXcd frame = Eigen::MatrixXcd::Identity(d, d);
  if (!identity) {
    // Well-conditioned random invertible matrix: O1 diag(e^u) O2.
    std::normal_distribution<double> n(0, 1);
    std::uniform_real_distribution<double> u(-1, 1);
    auto orth = [&] {
      Eigen::MatrixXd g(D, D);
      for (int i = 0; i < D * D; ++i) g(i / D, i % D) = n(rng);
      return Eigen::MatrixXd(Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ());
    };
    Eigen::VectorXd scale(D);
    for (int i = 0; i < D; ++i) scale(i) = std::exp(u(rng));
    const Eigen::MatrixXd o1 = orth();
    const Eigen::MatrixXd o2 = orth();
    s = o1 * scale.asDiagonal() * o2;
    frame = linalg::random_unitary(d, false, rng);
  }
  const Eigen::MatrixXd s_inv = s.inverse();
  out.truth = ScrambleTruth{s, frame};

  AbstractPresentation& p = out.presentation;
  p.D = D;
  p.d = d;
  for (int i = 0; i < 300; ++i) p.states.push_back(s * q.sample_state(a, rng).coords());
  for (int i = 0; i < 200; ++i) p.pure_states.push_back(s * q.sample_pure_state(a, rng).coords());
  for (int i = 0; i < 200; ++i) {
    const EffectVec e = i % 2 ? q.sample_extremal_effect(a, rng) : q.sample_measurement(a, 3, rng)[0];
    p.effects.push_back(s_inv.transpose() * e.coords());
  }
  p.deterministic_effect = s_inv.transpose() * q.deterministic_effect(a).coords();
  // Pure normalized states have the same coordinates as their daggers in the
  // orthonormal basis.
  p.dagger_map = s_inv.transpose() * s_inv;
  for (int m = 0; m < d; ++m) p.maximal_set.push_back(s * q.pure_state(a, frame.col(m)).coords());

  const auto& basis = q.basis(d);
  std::uniform_real_distribution<double> phase(0, 2 * M_PI);
  std::bernoulli_distribution coin(0.5);
  for (int m = 0; m < d; ++m)
    for (int n = m + 1; n < d; ++n) {
      Eigen::MatrixXcd v(d, 2);
      v.col(0) = frame.col(m);
      v.col(1) = frame.col(n);
      const TransfMap proj = q.from_kraus(a, a, {Eigen::MatrixXcd(v * v.adjoint())});
      p.face_projection[{m, n}] = s * proj.matrix() * s_inv;
      // Codec gauge: a relative phase, an optional conjugation, an optional swap.
      const double phi = identity ? 0.0 : phase(rng);
      const bool conj = identity ? false : coin(rng);
      const bool swap = identity ? false : coin(rng);
      Eigen::Matrix2cd g = Eigen::Matrix2cd::Identity();
      g(1, 1) = std::polar(1.0, -phi);
      Eigen::Matrix2cd x;
      x << 0, 1, 1, 0;
      auto gauge = [&](Eigen::Matrix2cd t) {
        t = g * t * g.adjoint();
        if (conj) t = t.transpose().eval();
        if (swap) t = x * t * x;
        return t;
      };
      auto ungauge = [&](Eigen::Matrix2cd t) {
        if (swap) t = x * t * x;
        if (conj) t = t.transpose().eval();
        return Eigen::Matrix2cd(g.adjoint() * t * g);
      };
      QubitCodec c;
      Eigen::MatrixXd enc(4, D);
      for (int k = 0; k < D; ++k) {
        const Eigen::MatrixXcd hk = linalg::dense(basis[static_cast<std::size_t>(k)], d);
        enc.col(k) = qubit_params(gauge(Eigen::Matrix2cd(v.adjoint() * hk * v)));
      }
      Eigen::MatrixXd dec(D, 4);
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector4d e = Eigen::Vector4d::Unit(k);
        const Eigen::Matrix2cd t = ungauge(qubit_matrix(e));
        dec.col(k) = q.vectorize(v * t * v.adjoint(), 1e-9);
      }
      c.encode = enc * s_inv;
      c.decode = s * dec;
      p.codecs[{m, n}] = c;
    }
  return out;
}

}  // namespace detail

/// A quantum system of dimension d in hidden random coordinates.
inline AbstractPresentation scramble_quantum(int d, std::uint64_t seed, bool identity = false) {
  return detail::build_scrambled(d, seed, identity).presentation;
}

inline ScrambleTruth scramble_truth(int d, std::uint64_t seed, bool identity = false) {
  return detail::build_scrambled(d, seed, identity).truth;
}

// Reconstruction ---------------------------------------------------------------------

struct ReconstructionCertificate {
  int D = 0, d = 0;
  std::uint64_t seed = 0;
  double spanning_condition = 0;      // of the spanning-state matrix
  double max_cycle_residual = 0;
  double max_trace_error = 0;
  double min_eigenvalue = 0;
  double max_pure_impurity = 0;       // λ_2/λ_1 over sampled pure states
  double max_born_deviation = 0;
  int born_pairs = 0;
  double min_preimage_pairing = 0;    // over preimages of projectors and densities
  double max_preimage_pairing = 0;
  double max_preimage_normalization_error = 0;
  double gauge_residual = 0;          // against a second run
  bool gauge_antiunitary = false;
  bool passed = false;

  Json to_json() const {
    Json j;
    j["D"] = D;
    j["d"] = d;
    j["seed"] = seed;
    j["spanning_condition"] = spanning_condition;
    j["max_cycle_residual"] = max_cycle_residual;
    j["max_trace_error"] = max_trace_error;
    j["min_eigenvalue"] = min_eigenvalue;
    j["max_pure_impurity"] = max_pure_impurity;
    j["max_born_deviation"] = max_born_deviation;
    j["born_pairs"] = born_pairs;
    j["min_preimage_pairing"] = min_preimage_pairing;
    j["max_preimage_pairing"] = max_preimage_pairing;
    j["max_preimage_normalization_error"] = max_preimage_normalization_error;
    j["gauge_residual"] = gauge_residual;
    j["gauge_antiunitary"] = gauge_antiunitary;
    j["passed"] = passed;
    return j;
  }
};

/// R: presented coordinates ↦ Hermitian d×d matrices, stored as a D×D map into
/// the orthonormal Hermitian coordinates of the quantum backend.
struct DensityRepresentation {
  int d = 0;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd inverse;

  Eigen::MatrixXcd operator()(const Eigen::VectorXd& v) const { return quantum().devectorize(matrix * v, d); }
  /// R⁻¹ of a Hermitian matrix.
  Eigen::VectorXd preimage(const Eigen::MatrixXcd& h) const { return inverse * quantum().vectorize(h, 1e-9); }
  /// R*(a): the operator with Tr[R*(a) R(ρ)] = (a|ρ).
  Eigen::MatrixXcd effect_operator(const Eigen::VectorXd& a) const {
    return quantum().devectorize(inverse.transpose() * a, d);
  }
};

struct Reconstruction {
  DensityRepresentation rep;
  ReconstructionCertificate certificate;
};

namespace detail {

/// Per-pair off-diagonal readout with the codec's gauge resolved.
class OffDiagonalReader {
 public:
  OffDiagonalReader(const AbstractPresentation& p, std::uint64_t seed) : p_(p) {
    const int d = p.d;
    // Swap gauge: α_m must encode to |0><0|.
    for (const auto& [mn, c] : p.codecs) {
      const Eigen::Vector4d t = c.encode * p.maximal_set[static_cast<std::size_t>(mn.first)];
      swapped_[mn] = t(1) > t(0);
    }
    // Reference pure state: the sample with the largest smallest raw overlap,
    // among a seed-dependent shuffle.
    std::vector<std::size_t> order(p.pure_states.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    double best = -1;
    const std::size_t scan = std::min<std::size_t>(order.size(), 40);
    for (std::size_t k = 0; k < scan; ++k) {
      const Eigen::VectorXd& psi = p.pure_states[order[k]];
      double worst = 1e300;
      for (const auto& mn : pairs()) worst = std::min(worst, std::abs(raw(mn, psi)));
      if (worst > best) {
        best = worst;
        reference_ = psi;
      }
    }
    if (best <= 1e-6) throw DomainError("reconstruct: no reference pure state overlaps every face");
    for (const auto& mn : pairs()) {
      const linalg::cd r = raw(mn, reference_);
      rephase_[mn] = std::conj(r) / std::abs(r);
    }
    resolve_conjugations(d);
  }

  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int m = 0; m < p_.d; ++m)
      for (int n = m + 1; n < p_.d; ++n) out.emplace_back(m, n);
    return out;
  }

  /// [τ^mn]_01 of the projected state, after the swap gauge.
  linalg::cd raw(const std::pair<int, int>& mn, const Eigen::VectorXd& v) const {
    const Eigen::VectorXd face = p_.face_projection.at(mn) * v;
    const Eigen::Vector4d t = p_.codecs.at(mn).encode * face;
    const linalg::cd off(t(2), t(3));
    return swapped_.at(mn) ? std::conj(off) : off;
  }

  linalg::cd rephased(const std::pair<int, int>& mn, const Eigen::VectorXd& v) const {
    return raw(mn, v) * rephase_.at(mn);
  }

  linalg::cd element(const std::pair<int, int>& mn, const Eigen::VectorXd& v) const {
    const linalg::cd u = rephased(mn, v);
    return conjugated_.at(mn) ? std::conj(u) : u;
  }

  double max_cycle_residual() const { return cycle_residual_; }

 private:
  /// Cycle phase defect of σ_mn σ_nk σ_km over sampled pure states.
  double cycle_defect(const std::pair<int, int>& mn, bool cmn, const std::pair<int, int>& nk, bool cnk,
                      const std::pair<int, int>& mk, bool cmk) const {
    double worst = 0;
    const std::size_t count = std::min<std::size_t>(p_.pure_states.size(), 20);
    for (std::size_t i = 0; i < count; ++i) {
      const Eigen::VectorXd& v = p_.pure_states[i];
      auto pick = [&](const std::pair<int, int>& e, bool c) {
        const linalg::cd u = rephased(e, v);
        return c ? std::conj(u) : u;
      };
      const linalg::cd prod = pick(mn, cmn) * pick(nk, cnk) * std::conj(pick(mk, cmk));
      const double scale = std::abs(prod);
      if (scale < 1e-10) continue;
      worst = std::max(worst, std::abs(prod.imag()) / scale + std::max(0.0, -prod.real() / scale));
    }
    return worst;
  }

  void resolve_conjugations(int d) {
    // Global antiunitary freedom: fix the (0,1) face unconjugated.
    conjugated_[{0, 1}] = false;
    for (int n = 2; n < d; ++n) {
      double best = 1e300;
      bool b1 = false, b0 = false;
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c0 = 0; c0 < 2; ++c0) {
          const double r = cycle_defect({0, 1}, false, {1, n}, c1 != 0, {0, n}, c0 != 0);
          if (r < best) {
            best = r;
            b1 = c1 != 0;
            b0 = c0 != 0;
          }
        }
      conjugated_[{1, n}] = b1;
      conjugated_[{0, n}] = b0;
      cycle_residual_ = std::max(cycle_residual_, best);
    }
    for (int m = 2; m < d; ++m)
      for (int n = m + 1; n < d; ++n) {
        double best = 1e300;
        bool pick = false;
        for (int c = 0; c < 2; ++c) {
          const double r = cycle_defect({0, m}, conjugated_.at({0, m}), {m, n}, c != 0, {0, n},
                                        conjugated_.at({0, n}));
          if (r < best) {
            best = r;
            pick = c != 0;
          }
        }
        conjugated_[{m, n}] = pick;
        cycle_residual_ = std::max(cycle_residual_, best);
      }
    if (cycle_residual_ > 1e-6) {
      throw DomainError("reconstruct: cycle-consistency residual " + std::to_string(cycle_residual_) +
                        " exceeds 1e-6; the presentation is not quantum");
    }
  }

  const AbstractPresentation& p_;
  std::map<std::pair<int, int>, bool> swapped_;
  std::map<std::pair<int, int>, bool> conjugated_;
  std::map<std::pair<int, int>, linalg::cd> rephase_;
  Eigen::VectorXd reference_;
  double cycle_residual_ = 0;
};

inline Eigen::MatrixXcd read_state(const AbstractPresentation& p, const OffDiagonalReader& r,
                                   const std::vector<Eigen::VectorXd>& daggers, const Eigen::VectorXd& v) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(p.d, p.d);
  for (int m = 0; m < p.d; ++m) s(m, m) = daggers[static_cast<std::size_t>(m)].dot(v);
  for (const auto& mn : r.pairs()) {
    const linalg::cd e = r.element(mn, v);
    s(mn.first, mn.second) = e;
    s(mn.second, mn.first) = std::conj(e);
  }
  return s;
}

struct GaugeFit {
  Eigen::MatrixXcd w;
  bool antiunitary = false;
  double residual = 1e300;
};

/// W with R′(ρ) = W R(ρ)^{(T)} W† on sampled ρ, from the Choi operator of R′∘R⁻¹.
inline GaugeFit align_gauge(const DensityRepresentation& r1, const DensityRepresentation& r2,
                            const std::vector<Eigen::VectorXd>& samples) {
  const int d = r1.d;
  GaugeFit best;
  for (int anti = 0; anti < 2; ++anti) {
    auto phi = [&](const Eigen::MatrixXcd& h) {
      const Eigen::MatrixXcd x = anti ? Eigen::MatrixXcd(h.transpose()) : h;
      return r2(r1.preimage(x));
    };
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Eigen::MatrixXcd eab = Eigen::MatrixXcd::Zero(d, d);
        eab(a, b) = 1;
        const Eigen::MatrixXcd herm = 0.5 * (eab + eab.adjoint());
        const Eigen::MatrixXcd skew = linalg::cd(0, -0.5) * (eab - eab.adjoint());
        const Eigen::MatrixXcd img = phi(herm) + linalg::cd(0, 1) * phi(skew);
        j += linalg::kron(img, eab);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (j + j.adjoint()));
    const Eigen::VectorXcd top = es.eigenvectors().col(d * d - 1) * std::sqrt(std::max(0.0, es.eigenvalues()(d * d - 1)));
    Eigen::MatrixXcd w(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) w(i, k) = top(i * d + k);
    double res = 0;
    for (const auto& v : samples) {
      const Eigen::MatrixXcd x = anti ? Eigen::MatrixXcd(r1(v).transpose()) : r1(v);
      res = std::max(res, (r2(v) - w * x * w.adjoint()).cwiseAbs().maxCoeff());
    }
    if (res < best.residual) best = GaugeFit{w, anti != 0, res};
  }
  return best;
}

inline DensityRepresentation build_representation(const AbstractPresentation& p, std::uint64_t seed,
                                                  double* cycle_residual, double* condition) {
  p.validate();
  OffDiagonalReader reader(p, seed);
  *cycle_residual = reader.max_cycle_residual();
  std::vector<Eigen::VectorXd> daggers;
  for (const auto& a : p.maximal_set) daggers.push_back(p.dagger(a));
  // Spanning set: greedy independent selection over a seed-dependent order.
  std::vector<std::size_t> order(p.states.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed ^ 0xabcdefull);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::MatrixXd span(p.D, 0);
  for (std::size_t k : order) {
    if (span.cols() == p.D) break;
    Eigen::MatrixXd trial(p.D, span.cols() + 1);
    trial << span, p.states[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(trial);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-6 * sv(0)) span = trial;
  }
  if (span.cols() < p.D) throw DomainError("reconstruct: sampled states do not span the state space");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
  *condition = svd.singularValues()(0) / svd.singularValues()(p.D - 1);
  Eigen::MatrixXd images(p.D, p.D);
  for (int k = 0; k < p.D; ++k) images.col(k) = quantum().vectorize(read_state(p, reader, daggers, span.col(k)), 1e-8);
  DensityRepresentation rep;
  rep.d = p.d;
  rep.matrix = images * span.inverse();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(rep.matrix);
  if (!lu.isInvertible()) throw DomainError("reconstruct: recovered map is singular");
  rep.inverse = lu.inverse();
  return rep;
}

}  // namespace detail

/// Rebuilds R and certifies it. `seed` picks the reference state and the
/// spanning set; a second run at `seed + 1` is used for the gauge check.
inline Reconstruction reconstruct_density_rep(const AbstractPresentation& p, std::uint64_t seed = 1) {
  Reconstruction out;
  ReconstructionCertificate& c = out.certificate;
  c.D = p.D;
  c.d = p.d;
  c.seed = seed;
  out.rep = detail::build_representation(p, seed, &c.max_cycle_residual, &c.spanning_condition);
  const DensityRepresentation& r = out.rep;

  c.min_eigenvalue = 1e300;
  const std::size_t n_states = std::min<std::size_t>(p.states.size(), 200);
  for (std::size_t i = 0; i < n_states; ++i) {
    const Eigen::MatrixXcd m = r(p.states[i]);
    c.max_trace_error = std::max(c.max_trace_error, std::abs(m.trace().real() - 1));
    c.min_eigenvalue = std::min(c.min_eigenvalue, linalg::min_eigenvalue(m));
  }
  for (const auto& v : p.pure_states) {
    const Eigen::VectorXd ev = linalg::eigenvalues(r(v));
    c.max_pure_impurity = std::max(c.max_pure_impurity, std::abs(ev(ev.size() - 2)) / ev(ev.size() - 1));
  }
  // Born rule on state-effect pairs.
  for (std::size_t i = 0; i < p.states.size() && c.born_pairs < 500; ++i)
    for (std::size_t k = 0; k < 2 && c.born_pairs < 500; ++k) {
      const Eigen::VectorXd& a = p.effects[(2 * i + k) % p.effects.size()];
      const double direct = a.dot(p.states[i]);
      const double born = (r.effect_operator(a) * r(p.states[i])).trace().real();
      c.max_born_deviation = std::max(c.max_born_deviation, std::abs(direct - born));
      ++c.born_pairs;
    }
  // Attainment, and the reverse inclusion of normalized states: preimages of
  // rank-one projectors and random densities pair into [0, 1].
  Rng rng(seed * 7919 + 3);
  std::vector<Eigen::MatrixXcd> targets;
  for (int m = 0; m < p.d; ++m) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(p.d);
    e(m) = 1;
    targets.push_back(e * e.adjoint());
  }
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXcd k = linalg::random_unit_vector(p.d, false, rng);
    targets.push_back(k * k.adjoint());
  }
  for (int i = 0; i < 50; ++i) targets.push_back(linalg::random_density(p.d, p.d, false, rng));
  c.min_preimage_pairing = 1e300;
  c.max_preimage_pairing = -1e300;
  for (const auto& t : targets) {
    const Eigen::VectorXd v = r.preimage(t);
    c.max_preimage_normalization_error =
        std::max(c.max_preimage_normalization_error, std::abs(p.deterministic_effect.dot(v) - 1));
    for (const auto& a : p.effects) {
      const double x = a.dot(v);
      c.min_preimage_pairing = std::min(c.min_preimage_pairing, x);
      c.max_preimage_pairing = std::max(c.max_preimage_pairing, x);
    }
  }
  // Gauge covariance against an independent run.
  double ignored_cycle = 0, ignored_cond = 0;
  const DensityRepresentation other = detail::build_representation(p, seed + 1, &ignored_cycle, &ignored_cond);
  std::vector<Eigen::VectorXd> samples(p.states.begin(), p.states.begin() + static_cast<long>(std::min<std::size_t>(p.states.size(), 50)));
  const detail::GaugeFit fit = detail::align_gauge(r, other, samples);
  c.gauge_residual = fit.residual;
  c.gauge_antiunitary = fit.antiunitary;

  c.passed = c.max_cycle_residual <= 1e-8 && c.max_trace_error <= 1e-9 && c.min_eigenvalue >= -1e-8 &&
             c.max_pure_impurity <= 1e-8 && c.max_born_deviation <= 1e-8 && c.min_preimage_pairing >= -1e-8 &&
             c.max_preimage_pairing <= 1 + 1e-8 && c.max_preimage_normalization_error <= 1e-8 &&
             c.gauge_residual <= 1e-8;
  return out;
}

/// W with R(S x) = W ρ(x)^{(T)} W† against the hidden ground truth.
inline double truth_residual(const Reconstruction& rec, const ScrambleTruth& truth, int samples, std::uint64_t seed) {
  const int d = rec.rep.d;
  DensityRepresentation plain;
  plain.d = d;
  plain.matrix = truth.scramble.inverse();
  plain.inverse = truth.scramble;
  Rng rng(seed);
  std::vector<Eigen::VectorXd> vs;
  for (int i = 0; i < samples; ++i) vs.push_back(truth.scramble * quantum().sample_state(quantum_system(d), rng).coords());
  return detail::align_gauge(plain, rec.rep, vs).residual;
}

}  // namespace optforge
