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

// Executable checks of the six principles against a backend. Each check
// returns an AxiomReport; a failing report always carries a witness.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "optforge/backends.hpp"
#include "optforge/core.hpp"
#include "optforge/linrep.hpp"
#include "optforge/report.hpp"

namespace optforge {

enum class Verdict { kPass, kFail, kNotApplicable };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kNotApplicable:
      return "not_applicable";
  }
  return "unknown";
}

struct AxiomReport {
  std::string axiom;  // A1..A5, P6
  std::string name;
  std::string backend;
  std::vector<std::string> systems;
  int trials = 0;
  Verdict verdict = Verdict::kPass;
  Json witnesses = Json::array();
  std::string detail;

  void fail(std::string why, Json witness) {
    verdict = Verdict::kFail;
    if (detail.empty()) detail = std::move(why);
    witnesses.push_back(std::move(witness));
  }

  Json to_json() const {
    Json j;
    j["axiom"] = axiom;
    j["name"] = name;
    j["backend"] = backend;
    j["systems"] = systems;
    j["trials"] = trials;
    j["verdict"] = optforge::to_string(verdict);
    j["detail"] = detail;
    j["witnesses"] = witnesses;
    return j;
  }
};

struct AxiomInfo {
  const char* id;
  const char* name;
};

inline const std::vector<AxiomInfo>& axiom_catalog() {
  static const std::vector<AxiomInfo> c = {
      {"A1", "causality"},          {"A2", "purity_of_composition"}, {"A3", "local_tomography"},
      {"A4", "perfect_discrimination"}, {"A5", "ideal_compression"},  {"P6", "purification"}};
  return c;
}

/// Accepts either the short id or the long name.
inline std::string axiom_id(const std::string& key) {
  for (const auto& a : axiom_catalog())
    if (key == a.id || key == a.name) return a.id;
  throw DomainError("unknown axiom '" + key + "'");
}

inline std::string axiom_name(const std::string& id) {
  for (const auto& a : axiom_catalog())
    if (id == a.id) return a.name;
  throw DomainError("unknown axiom '" + id + "'");
}

/// Verdicts each built-in theory is known to produce.
inline Verdict expected_verdict(const std::string& backend_id, const std::string& axiom) {
  if (backend_id == "classical" && axiom == "P6") return Verdict::kFail;
  if (backend_id == "realqt" && axiom == "A3") return Verdict::kFail;
  return Verdict::kPass;
}

namespace detail {

inline AxiomReport start_report(const std::string& id, const TheoryBackend& b,
                                std::vector<SystemRef> systems, int trials) {
  AxiomReport r;
  r.axiom = id;
  r.name = axiom_name(id);
  r.backend = b.id();
  for (const auto& s : systems) r.systems.push_back(s.to_string());
  r.trials = trials;
  return r;
}

inline const HilbertBackend* as_hilbert(const TheoryBackend& b) {
  return dynamic_cast<const HilbertBackend*>(&b);
}

inline const ClassicalBackend* as_classical(const TheoryBackend& b) {
  return dynamic_cast<const ClassicalBackend*>(&b);
}

inline double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace detail

// A1 ----------------------------------------------------------------------------

/// Uniqueness of the deterministic effect, plus the no-signalling form:
/// the marginal statistics of a preparation test do not depend on which
/// observation test follows it.
inline AxiomReport check_causality(const TheoryBackend& b, const SystemRef& a, int trials,
                                   std::uint64_t seed) {
  AxiomReport r = detail::start_report("A1", b, {a}, trials);
  Rng rng(seed);
  const int D = b.dims(a).D;
  DeterministicSlice slice = b.deterministic_slice(a, std::max(trials, D + 4), rng);
  const EffectVec e = b.deterministic_effect(a);
  if (slice.residual > 1e-8) {
    r.fail("no effect is deterministic on every sampled state", Json{{"residual", slice.residual}});
    return r;
  }
  if (slice.directions.cols() > 0) {
    Json w;
    w["kind"] = "two_deterministic_effects";
    w["effect_0"] = to_json(e.coords());
    w["slice_dimension"] = slice.directions.cols();
    const Eigen::VectorXd dir = slice.directions.col(0) / detail::max_abs(slice.directions.col(0));
    for (double t : {-1.0, 1.0, -0.5, 0.5, -0.1, 0.1}) {
      EffectVec cand(a, e.coords() + t * dir);
      if (b.is_effect(cand)) {
        w["effect_1"] = to_json(cand.coords());
        break;
      }
    }
    if (!w.contains("effect_1")) w["effect_1"] = to_json(Eigen::VectorXd(e.coords() + dir));
    r.fail("the deterministic slice of the effect cone is not a single point", w);
    return r;
  }
  if (detail::max_abs(slice.particular - e.coords()) > 1e-8 || !b.is_effect(EffectVec(a, slice.particular))) {
    r.fail("the unique deterministic functional is not the backend's deterministic effect",
           Json{{"found", to_json(slice.particular)}, {"declared", to_json(e.coords())}});
    return r;
  }

  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    std::uniform_int_distribution<int> k(2, 3);
    const int nx = k(rng);
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> w(static_cast<std::size_t>(nx));
    double total = 0;
    for (auto& x : w) total += (x = ex(rng));
    std::vector<StateVec> prep;
    for (int x = 0; x < nx; ++x) prep.push_back((w[static_cast<std::size_t>(x)] / total) * b.sample_state(a, rng));
    const auto m0 = b.sample_measurement(a, 2, rng);
    const auto m1 = b.sample_measurement(a, 3, rng);
    for (const auto& rho : prep) {
      double p0 = 0, p1 = 0;
      for (const auto& m : m0) p0 += pair(m, rho);
      for (const auto& m : m1) p1 += pair(m, rho);
      worst = std::max(worst, std::abs(p0 - p1));
    }
  }
  if (worst > kProbabilityTolerance) {
    r.fail("marginal statistics depend on the later observation", Json{{"max_gap", worst}});
  } else {
    r.detail = "unique deterministic effect; max signalling gap " + std::to_string(worst);
  }
  return r;
}

// A2 ----------------------------------------------------------------------------

inline AxiomReport check_purity_of_composition(const TheoryBackend& b, const SystemRef& a,
                                               const SystemRef& mid, const SystemRef& c, int trials,
                                               std::uint64_t seed) {
  AxiomReport r = detail::start_report("A2", b, {a, mid, c}, trials);
  Rng rng(seed);
  // The classical identity refines into point masses, so it is not pure there.
  if (b.is_pure_transformation(b.identity(a)) &&
      !b.is_pure_transformation(b.sequence(b.identity(a), b.identity(a)))) {
    r.fail("identity composed with identity is not pure", Json{{"system", a.to_string()}});
  }
  for (int t = 0; t < trials; ++t) {
    TransfMap first = b.sample_pure_transformation(a, mid, rng);
    TransfMap second = b.sample_pure_transformation(mid, c, rng);
    if (!b.is_pure_transformation(first) || !b.is_pure_transformation(second)) {
      throw Error("backend sampled an impure transformation as pure");
    }
    TransfMap comp = b.sequence(first, second);
    if (!b.is_pure_transformation(comp)) {
      r.fail("composition of two pure transformations is not pure",
             Json{{"trial", t}, {"first", to_json(first.matrix())}, {"second", to_json(second.matrix())}});
      break;
    }
  }
  return r;
}

// A3 ----------------------------------------------------------------------------

/// Product relation D_AB = D_A D_B and separation of bipartite states by
/// product effects.
inline AxiomReport check_local_tomography(const TheoryBackend& b, const SystemRef& a,
                                          const SystemRef& c, int trials, std::uint64_t seed) {
  AxiomReport r = detail::start_report("A3", b, {a, c}, trials);
  Rng rng(seed);
  const SystemRef ac = compose_systems(a, c);
  const int da = b.dims(a).D, dc = b.dims(c).D, dac = b.dims(ac).D;

  // Span of product effects from sampled effects on each side.
  std::vector<EffectVec> ea, ec;
  ea.push_back(b.deterministic_effect(a));
  ec.push_back(b.deterministic_effect(c));
  while (static_cast<int>(ea.size()) < 2 * da + 2) ea.push_back(b.sample_extremal_effect(a, rng));
  while (static_cast<int>(ec.size()) < 2 * dc + 2) ec.push_back(b.sample_extremal_effect(c, rng));
  Eigen::MatrixXd products(static_cast<long>(ea.size() * ec.size()), dac);
  long row = 0;
  for (const auto& x : ea)
    for (const auto& y : ec) products.row(row++) = b.tensor(x, y).coords().transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(products);
  lu.setThreshold(1e-9);
  const int rank = static_cast<int>(lu.rank());
  const Eigen::MatrixXd invisible = linalg::null_space(products, 1e-8 * std::max(1.0, products.norm()));

  Json relation = {{"D_A", da}, {"D_B", dc}, {"D_AB", dac}, {"product_effect_rank", rank}};
  r.detail = "D_AB = " + std::to_string(dac) + ", D_A*D_B = " + std::to_string(da * dc);

  double worst_separation = 1e300;
  int undetected = 0;
  for (int t = 0; t < trials; ++t) {
    StateVec s = b.sample_state(ac, rng), u = b.sample_state(ac, rng);
    const double sep = detail::max_abs(products * (s.coords() - u.coords()));
    worst_separation = std::min(worst_separation, sep);
    if (sep < 1e-9) ++undetected;
  }
  relation["min_product_separation"] = worst_separation;

  if (dac != da * dc || rank != dac || undetected > 0) {
    Json w;
    w["kind"] = "product_relation_violated";
    w["relation"] = relation;
    w["undetected_pairs"] = undetected;
    if (invisible.cols() > 0) w["locally_invisible_direction"] = to_json(Eigen::VectorXd(invisible.col(0)));
    r.fail("product effects do not separate bipartite states", w);
    if (b.id() == "realqt" && a == c && a.factors() == std::vector<int>{2}) {
      RealCounterexample cx = realqt_counterexample();
      Json k;
      k["kind"] = "locally_indistinguishable_states";
      k["rho"] = to_json(realqt().density(cx.rho));
      k["rho_prime"] = to_json(realqt().density(cx.rho_prime));
      k["difference"] = to_json(cx.difference);
      k["difference_equals_half_JxJ_residual"] = cx.difference_residual;
      k["local_statistics_gap"] = cx.local_statistics_gap;
      k["overlap"] = cx.overlap;
      k["channel_gap_on_symmetric"] = cx.channel_gap_on_symmetric;
      k["channel_output_gap"] = cx.channel_output_gap;
      k["choi_gap"] = cx.choi_gap;
      r.witnesses.push_back(k);
    }
  } else {
    r.witnesses.push_back(relation);
  }
  return r;
}

// A4 ----------------------------------------------------------------------------

struct Discrimination {
  StateVec rho1;
  EffectVec m0;
  EffectVec m1;
  Eigen::Matrix2d pairings;  // (m_x | ρ_x′)
};

/// A state orthogonal to `rho0` and a binary measurement telling them apart;
/// nullopt when `rho0` is internal.
inline std::optional<Discrimination> discriminate(const TheoryBackend& b, const StateVec& rho0) {
  std::optional<StateVec> rho1 = b.orthogonal_pure_state(rho0);
  if (!rho1) return std::nullopt;
  Discrimination out;
  out.rho1 = *rho1;
  out.m0 = b.support_effect(rho0);
  out.m1 = b.deterministic_effect(rho0.system()) - out.m0;
  out.pairings << pair(out.m0, rho0), pair(out.m0, out.rho1), pair(out.m1, rho0), pair(out.m1, out.rho1);
  return out;
}

inline AxiomReport check_perfect_state_discrimination(const TheoryBackend& b, const StateVec& rho0) {
  AxiomReport r = detail::start_report("A4", b, {rho0.system()}, 1);
  if (b.is_internal(rho0)) {
    r.verdict = Verdict::kNotApplicable;
    r.detail = "state is internal; the principle only concerns non-internal states";
    return r;
  }
  std::optional<Discrimination> d = discriminate(b, rho0);
  if (!d) {
    r.fail("no orthogonal state found for a non-internal state", Json{{"rho0", to_json(rho0.coords())}});
    return r;
  }
  const double err = (d->pairings - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
  const bool valid = b.is_state(d->rho1) && b.is_effect(d->m0) && b.is_effect(d->m1);
  Json w = {{"rho1", to_json(d->rho1.coords())},
            {"m0", to_json(d->m0.coords())},
            {"pairings", to_json(Eigen::MatrixXd(d->pairings))},
            {"max_error", err}};
  if (!valid || err > kProbabilityTolerance) {
    r.fail("constructed measurement does not discriminate", w);
  } else {
    r.witnesses.push_back(w);
  }
  return r;
}

/// Runs A4 on `trials` sampled non-internal states (pure states, plus
/// rank-deficient mixtures where the dimension allows).
inline AxiomReport check_perfect_state_discrimination(const TheoryBackend& b, const SystemRef& a,
                                                      int trials, std::uint64_t seed) {
  AxiomReport r = detail::start_report("A4", b, {a}, trials);
  Rng rng(seed);
  const int d = b.dims(a).d;
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    StateVec rho0 = b.sample_pure_state(a, rng);
    if (d >= 3 && t % 2 == 1) rho0 = 0.5 * rho0 + 0.5 * b.sample_pure_state(a, rng);
    AxiomReport one = check_perfect_state_discrimination(b, rho0);
    if (one.verdict == Verdict::kFail) {
      r.fail(one.detail, one.witnesses.front());
      return r;
    }
    if (one.verdict == Verdict::kPass) worst = std::max(worst, one.witnesses.front()["max_error"].get<double>());
  }
  r.detail = "max pairing error " + std::to_string(worst);
  return r;
}

// A5 ----------------------------------------------------------------------------

/// Encoder A → target and decoder target → A for the face of a state.
struct Compression {
  SystemRef target;
  TransfMap encoder;
  TransfMap decoder;
  Eigen::MatrixXcd isometry;  // V (Hilbert backends) or the support embedding (classical)
  int rank = 0;
};

inline Compression build_compression(const TheoryBackend& b, const StateVec& rho) {
  const SystemRef& a = rho.system();
  Compression out;
  if (const HilbertBackend* h = detail::as_hilbert(b)) {
    const Eigen::MatrixXcd m = h->density(rho);
    const int d = static_cast<int>(m.rows());
    Eigen::MatrixXcd v = linalg::aligned_support_basis(m, 1e-9);
    if (h->real_only()) v = v.real().cast<linalg::cd>();
    const int r = static_cast<int>(v.cols());
    const Eigen::MatrixXcd w = linalg::orthonormal_complement(v, h->real_only());
    out.rank = r;
    out.isometry = v;
    out.target = r == 1 ? SystemRef::trivial() : SystemRef::atomic(b.id(), r);
    // E(X) = V†XV + Tr[(I − VV†)X] |0><0|, D(Y) = V Y V†.
    std::vector<Eigen::MatrixXcd> enc = {v.adjoint()};
    for (int j = 0; j < w.cols(); ++j) {
      Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(r, d);
      k.row(0) = w.col(j).adjoint();
      enc.push_back(k);
    }
    out.encoder = h->from_kraus(a, out.target, enc);
    out.decoder = h->from_kraus(out.target, a, {v});
    return out;
  }
  if (detail::as_classical(b)) {
    const int n = static_cast<int>(rho.coords().size());
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (rho.coords()(i) > 1e-9) support.push_back(i);
    const int r = static_cast<int>(support.size());
    out.rank = r;
    out.target = r == 1 ? SystemRef::trivial() : SystemRef::atomic(b.id(), r);
    Eigen::MatrixXcd enc = Eigen::MatrixXcd::Zero(r, n), dec = Eigen::MatrixXcd::Zero(n, r);
    std::vector<bool> in_support(static_cast<std::size_t>(n), false);
    for (int k = 0; k < r; ++k) {
      const int i = support[static_cast<std::size_t>(k)];
      in_support[static_cast<std::size_t>(i)] = true;
      enc(k, i) = 1.0;
      dec(i, k) = 1.0;
    }
    for (int i = 0; i < n; ++i)
      if (!in_support[static_cast<std::size_t>(i)]) enc(0, i) = 1.0;
    out.isometry = dec;
    out.encoder = b.make_transformation(a, out.target, enc);
    out.decoder = b.make_transformation(out.target, a, dec);
    return out;
  }
  throw Unsupported(b.id() + ": ideal compression");
}

namespace detail {

/// A random state in the face of `rho`.
inline StateVec sample_face_state(const TheoryBackend& b, const Compression& c, Rng& rng) {
  if (c.target.is_trivial()) return b.apply(c.decoder, StateVec(SystemRef::trivial(), Eigen::VectorXd::Ones(1)));
  return b.apply(c.decoder, b.sample_state(c.target, rng));
}

}  // namespace detail

struct CompressionCheck {
  double lossless_error = 0;   // max ‖D(E(σ)) − σ‖ over face states
  double efficiency_error = 0; // max ‖E(D(τ)) − τ‖ and leakage of D(τ) out of the face
  bool channels_valid = true;
};

inline CompressionCheck verify_compression(const TheoryBackend& b, const StateVec& rho,
                                           const Compression& c, int samples, Rng& rng) {
  CompressionCheck out;
  out.channels_valid = b.is_transformation(c.encoder) && b.is_transformation(c.decoder) &&
                       is_deterministic(c.encoder) && is_deterministic(c.decoder);
  const EffectVec outside = b.deterministic_effect(rho.system()) - b.support_effect(rho);
  const TransfMap round = b.sequence(c.encoder, c.decoder);
  auto check_face_state = [&](const StateVec& sigma) {
    out.lossless_error = std::max(out.lossless_error, detail::max_abs(b.apply(round, sigma).coords() - sigma.coords()));
  };
  check_face_state(rho);
  for (int i = 0; i < samples; ++i) check_face_state(detail::sample_face_state(b, c, rng));
  const TransfMap back = b.sequence(c.decoder, c.encoder);
  for (int i = 0; i < samples; ++i) {
    StateVec tau = c.target.is_trivial() ? StateVec(SystemRef::trivial(), Eigen::VectorXd::Ones(1))
                                         : b.sample_state(c.target, rng);
    out.efficiency_error = std::max(out.efficiency_error, detail::max_abs(b.apply(back, tau).coords() - tau.coords()));
    out.efficiency_error = std::max(out.efficiency_error, std::abs(pair(outside, b.apply(c.decoder, tau))));
  }
  return out;
}

inline AxiomReport check_ideal_compression(const TheoryBackend& b, const StateVec& rho, int samples,
                                           std::uint64_t seed) {
  AxiomReport r = detail::start_report("A5", b, {rho.system()}, samples);
  Rng rng(seed);
  Compression c = build_compression(b, rho);
  CompressionCheck k = verify_compression(b, rho, c, samples, rng);
  Json w = {{"rank", c.rank},
            {"target", c.target.to_string()},
            {"lossless_error", k.lossless_error},
            {"efficiency_error", k.efficiency_error}};
  if (!k.channels_valid || k.lossless_error > 1e-10 || k.efficiency_error > 1e-10) {
    r.fail("compression is not ideal", w);
  } else {
    r.witnesses.push_back(w);
  }
  return r;
}

/// A5 over `trials` sampled states of random rank.
inline AxiomReport check_ideal_compression(const TheoryBackend& b, const SystemRef& a, int trials,
                                           std::uint64_t seed) {
  AxiomReport r = detail::start_report("A5", b, {a}, trials);
  Rng rng(seed);
  const int d = b.dims(a).d;
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    std::uniform_int_distribution<int> rk(1, d);
    const int rank = rk(rng);
    StateVec rho = b.sample_pure_state(a, rng);
    if (const HilbertBackend* h = detail::as_hilbert(b)) {
      rho = h->sample_state_of_rank(a, rank, rng);
    } else {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
      std::vector<int> idx(static_cast<std::size_t>(d));
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      std::exponential_distribution<double> ex(1.0);
      for (int i = 0; i < rank; ++i) p(idx[static_cast<std::size_t>(i)]) = ex(rng) + 0.01;
      rho = StateVec(a, p / p.sum());
    }
    Compression c = build_compression(b, rho);
    CompressionCheck k = verify_compression(b, rho, c, 5, rng);
    worst = std::max({worst, k.lossless_error, k.efficiency_error});
    if (!k.channels_valid || k.lossless_error > 1e-10 || k.efficiency_error > 1e-10) {
      r.fail("compression is not ideal",
             Json{{"trial", t}, {"rho", to_json(rho.coords())}, {"lossless_error", k.lossless_error},
                  {"efficiency_error", k.efficiency_error}});
      return r;
    }
  }
  r.detail = "max round-trip error " + std::to_string(worst);
  return r;
}

// P6 ----------------------------------------------------------------------------

/// Ψ as a d×d_E coefficient matrix and as a state on A⊗E.
struct Purification {
  SystemRef environment;
  Eigen::MatrixXcd coefficients;
  StateVec psi;
};

/// Ψ = Σ_x √p_x |α_x>|x> with an environment of Hilbert dimension `env_dim`
/// (must be at least the rank). With env_dim equal to the system dimension
/// this is (√ρ ⊗ I) Σ|ii>, which is basis-matched for diagonal ρ.
inline Purification purify(const HilbertBackend& h, const StateVec& rho, int env_dim) {
  const Eigen::MatrixXcd m = h.density(rho);
  const int d = static_cast<int>(m.rows());
  const int rank = linalg::rank_of_psd(m, 1e-9);
  if (env_dim < rank) {
    throw DomainError("purification needs an environment of dimension at least " + std::to_string(rank));
  }
  Purification out;
  out.environment = SystemRef::atomic(h.id(), env_dim);
  if (env_dim == d) {
    out.coefficients = linalg::psd_sqrt(m);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    out.coefficients = Eigen::MatrixXcd::Zero(d, env_dim);
    int col = 0;
    for (int x = d - 1; x >= 0 && col < env_dim; --x) {
      const double p = std::max(0.0, es.eigenvalues()(x));
      if (p <= 1e-12) break;
      out.coefficients.col(col++) = std::sqrt(p) * es.eigenvectors().col(x);
    }
  }
  out.psi = h.pure_state(compose_systems(rho.system(), out.environment), linalg::vec(out.coefficients));
  return out;
}

/// Unitary U on the environment with (I ⊗ U) Ψ = Ψ′, from two coefficient
/// matrices with the same marginal: M Uᵀ = M′ (orthogonal Procrustes).
inline Eigen::MatrixXcd connecting_unitary(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& m_prime) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.adjoint() * m_prime, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXcd ut = svd.matrixU() * svd.matrixV().adjoint();
  return ut.transpose();
}

struct PurificationCheck {
  double marginal_error = 0;
  double uniqueness_residual = 0;
  bool pure = true;
};

inline PurificationCheck verify_purification(const HilbertBackend& h, const StateVec& rho, Rng& rng) {
  PurificationCheck out;
  const int d = h.dims(rho.system()).d;
  Purification p = purify(h, rho, d);
  out.pure = h.is_pure_state(p.psi);
  StateVec marg = marginal(p.psi, rho.system(), p.environment, Keep::kFirst);
  out.marginal_error = detail::max_abs(marg.coords() - rho.coords());
  // A second purification with the same environment.
  const Eigen::MatrixXcd w = linalg::random_unitary(d, h.real_only(), rng);
  const Eigen::MatrixXcd m2 = p.coefficients * w;
  const Eigen::MatrixXcd u = connecting_unitary(p.coefficients, m2);
  const Eigen::MatrixXcd moved = p.coefficients * u.transpose();
  out.uniqueness_residual = (moved - m2).norm();
  return out;
}

/// Stinespring-style reversible dilation of a channel: C(ρ) = Tr_E[U(ρ⊗η)U†].
struct ReversibleDilation {
  SystemRef environment;
  StateVec eta;
  TransfMap unitary;
  double residual = 0;  // max over a spanning set of input states
};

inline ReversibleDilation dilate(const HilbertBackend& h, const SystemRef& a,
                                 const std::vector<Eigen::MatrixXcd>& kraus) {
  const int d = h.dims(a).d;
  const int n = static_cast<int>(kraus.size());
  ReversibleDilation out;
  out.environment = SystemRef::atomic(h.id(), n);
  // Isometry |ψ> ↦ Σ_k K_k|ψ> ⊗ |k>, extended to a unitary on A⊗E acting on |ψ>|0>.
  Eigen::MatrixXcd iso = Eigen::MatrixXcd::Zero(d * n, d);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) iso(i * n + k, j) = kraus[static_cast<std::size_t>(k)](i, j);
  Eigen::MatrixXcd complement = linalg::orthonormal_complement(iso, h.real_only());
  Eigen::MatrixXcd u(d * n, d * n);
  int fill = 0;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < n; ++k) {
      u.col(j * n + k) = k == 0 ? Eigen::VectorXcd(iso.col(j)) : Eigen::VectorXcd(complement.col(fill++));
    }
  }
  const SystemRef ae = compose_systems(a, out.environment);
  out.unitary = h.from_unitary(ae, u);
  out.eta = h.pure_state(out.environment, Eigen::VectorXcd::Unit(n, 0));

  const TransfMap channel = h.from_kraus(a, a, kraus);
  const TransfMap prepare = h.tensor(h.identity(a), h.as_transformation(out.eta));
  const TransfMap discard = h.tensor(h.identity(a), h.as_transformation(h.deterministic_effect(out.environment)));
  const TransfMap simulated = h.sequence(h.sequence(prepare, out.unitary), discard);
  // Pure states |i>, (|i>+|j>)/√2 and (|i>+i|j>)/√2 span St_R(A).
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      for (int phase = 0; phase < (i == j ? 1 : (h.real_only() ? 1 : 2)); ++phase) {
        Eigen::VectorXcd ket = Eigen::VectorXcd::Unit(d, i);
        if (j != i) ket(j) = phase == 0 ? linalg::cd(1, 0) : linalg::cd(0, 1);
        StateVec s = h.pure_state(a, ket);
        out.residual = std::max(out.residual, detail::max_abs(h.apply(simulated, s).coords() -
                                                              h.apply(channel, s).coords()));
      }
    }
  }
  return out;
}

inline AxiomReport check_purification(const TheoryBackend& b, const SystemRef& a, int trials,
                                      std::uint64_t seed) {
  AxiomReport r = detail::start_report("P6", b, {a}, trials);
  Rng rng(seed);
  if (const HilbertBackend* h = detail::as_hilbert(b)) {
    double marg = 0, uniq = 0;
    for (int t = 0; t < trials; ++t) {
      StateVec rho = h->sample_state(a, rng);
      PurificationCheck k = verify_purification(*h, rho, rng);
      marg = std::max(marg, k.marginal_error);
      uniq = std::max(uniq, k.uniqueness_residual);
      if (!k.pure || k.marginal_error > 1e-10 || k.uniqueness_residual > 1e-8) {
        r.fail("purification failed", Json{{"trial", t}, {"rho", to_json(rho.coords())},
                                             {"marginal_error", k.marginal_error},
                                             {"uniqueness_residual", k.uniqueness_residual}});
        return r;
      }
    }
    Json w = {{"max_marginal_error", marg}, {"max_uniqueness_residual", uniq}};
    if (h->dims(a).d == 2) {
      double dil = 0;
      for (int t = 0; t < std::min(trials, 50); ++t) {
        dil = std::max(dil, dilate(*h, a, linalg::random_channel_kraus(2, 2, 4, h->real_only(), rng)).residual);
      }
      w["reversible_dilation_residual"] = dil;
      if (dil > 1e-9) {
        r.fail("reversible dilation does not reproduce the channel", w);
        return r;
      }
    }
    r.witnesses.push_back(w);
    r.detail = "purifications found and connected by environment unitaries";
    return r;
  }
  if (const ClassicalBackend* c = detail::as_classical(b)) {
    // Pure states of A⊗A are vertices, whose marginals are vertices.
    const SystemRef aa = compose_systems(a, a);
    const int n = b.dims(a).D;
    std::set<int> marginals;
    for (int v = 0; v < n * n; ++v) {
      StateVec m = marginal(c->vertex(aa, v), a, a, Keep::kFirst);
      for (int i = 0; i < n; ++i)
        if (m.coords()(i) > 0.5) marginals.insert(i);
    }
    for (int t = 0; t < trials; ++t) {
      StateVec rho = b.sample_state(a, rng);
      if (!b.is_pure_state(rho)) {
        Json w;
        w["kind"] = "vertex_marginals";
        w["state"] = to_json(rho.coords());
        w["pure_bipartite_states"] = n * n;
        w["marginal_vertices"] = std::vector<int>(marginals.begin(), marginals.end());
        w["reason"] = "every pure state of the composite is a vertex with a vertex marginal";
        r.fail("mixed classical states have no purification", w);
        return r;
      }
    }
    return r;
  }
  r.verdict = Verdict::kNotApplicable;
  r.detail = "backend offers no purification construction";
  return r;
}

// Suite -------------------------------------------------------------------------

inline AxiomReport run_axiom(const TheoryBackend& b, const std::string& axiom, int dim, int trials,
                             std::uint64_t seed) {
  const SystemRef a = SystemRef::atomic(b.id(), dim);
  b.dims(a);
  const std::string id = axiom_id(axiom);
  if (id == "A1") return check_causality(b, a, trials, seed);
  if (id == "A2") {
    const SystemRef mid = SystemRef::atomic(b.id(), dim == 2 ? 3 : 2);
    return check_purity_of_composition(b, a, mid, a, trials, seed);
  }
  if (id == "A3") return check_local_tomography(b, a, a, trials, seed);
  if (id == "A4") return check_perfect_state_discrimination(b, a, trials, seed);
  if (id == "A5") return check_ideal_compression(b, a, trials, seed);
  return check_purification(b, a, trials, seed);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ull + a * 0xBF58476D1CE4E5B9ull + b * 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

/// Runs the selected axioms (all when empty) on each dimension, in order.
inline std::vector<AxiomReport> run_suite(const TheoryBackend& b, const std::vector<int>& dims,
                                          std::vector<std::string> axioms, int trials,
                                          std::uint64_t seed) {
  if (axioms.empty())
    for (const auto& a : axiom_catalog()) axioms.push_back(a.id);
  std::vector<AxiomReport> out;
  for (int d : dims) {
    for (std::size_t k = 0; k < axioms.size(); ++k) {
      const std::string id = axiom_id(axioms[k]);
      out.push_back(run_axiom(b, id, d, trials, mix_seed(seed, static_cast<std::uint64_t>(d), id[1] - '0')));
    }
  }
  return out;
}

}  // namespace optforge
