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

#include <gtest/gtest.h>

#include "optforge/axioms.hpp"
#include "oracles.hpp"

namespace {

using namespace optforge;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// A classical theory whose states never populate the last outcome, so the
// deterministic effect is not pinned down on that coordinate.
class LeakyBackend : public ClassicalBackend {
 public:
  std::string id() const override { return "leaky"; }
  StateVec sample_state(const SystemRef& a, Rng& rng) const override {
    StateVec s = ClassicalBackend::sample_state(a, rng);
    Eigen::VectorXd v = s.coords();
    v(v.size() - 1) = 0;
    v /= v.sum();
    return StateVec(a, v);
  }
};

const LeakyBackend& leaky() {
  static const LeakyBackend b;
  static const bool registered = register_backend(&b);
  (void)registered;
  return b;
}

// Verdict matrix ----------------------------------------------------------------

struct SuiteCase {
  const char* backend;
  int dim;
};

class VerdictMatrix : public ::testing::TestWithParam<SuiteCase> {};

TEST_P(VerdictMatrix, MatchesKnownTheory) {
  const TheoryBackend& b = backend_for_id(GetParam().backend);
  for (const AxiomReport& r : run_suite(b, {GetParam().dim}, {}, 12, 3)) {
    const Verdict expected = expected_verdict(b.id(), r.axiom);
    EXPECT_EQ(r.verdict, expected) << b.id() << " " << r.axiom << ": " << r.detail;
    if (r.verdict == Verdict::kFail) {
      EXPECT_FALSE(r.witnesses.empty()) << r.axiom;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Backends, VerdictMatrix,
                         ::testing::Values(SuiteCase{"quantum", 2}, SuiteCase{"quantum", 3},
                                           SuiteCase{"classical", 2}, SuiteCase{"classical", 3},
                                           SuiteCase{"realqt", 2}, SuiteCase{"realqt", 3}),
                         [](const auto& info) {
                           return std::string(info.param.backend) + "_d" + std::to_string(info.param.dim);
                         });

TEST(Suite, SameSeedSameReport) {
  auto run = [] {
    Json all = Json::array();
    for (const auto& r : run_suite(realqt(), {2}, {"A1", "A3", "P6"}, 8, 99)) all.push_back(r.to_json());
    return all.dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(Suite, AcceptsLongNames) {
  auto reports = run_suite(quantum(), {2}, {"causality", "A4"}, 4, 1);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].axiom, "A1");
  EXPECT_EQ(reports[1].name, "perfect_discrimination");
  EXPECT_THROW(axiom_id("A9"), DomainError);
}

// Causality ---------------------------------------------------------------------

TEST(Causality, LeakyTheoryFailsWithTwoDeterministicEffects) {
  const SystemRef a = SystemRef::atomic("leaky", 3);
  AxiomReport r = check_causality(leaky(), a, 20, 5);
  ASSERT_EQ(r.verdict, Verdict::kFail);
  ASSERT_FALSE(r.witnesses.empty());
  const Json& w = r.witnesses[0];
  ASSERT_TRUE(w.contains("effect_0"));
  ASSERT_TRUE(w.contains("effect_1"));
  const Eigen::VectorXd e0 = vector_from_json(w["effect_0"]);
  const Eigen::VectorXd e1 = vector_from_json(w["effect_1"]);
  EXPECT_GT((e0 - e1).cwiseAbs().maxCoeff(), 1e-6);
  Rng rng(17);
  for (int i = 0; i < 30; ++i) {
    const Eigen::VectorXd s = leaky().sample_state(a, rng).coords();
    EXPECT_NEAR(e0.dot(s), 1.0, 1e-9);
    EXPECT_NEAR(e1.dot(s), 1.0, 1e-9);
  }
  for (int k = 0; k < 3; ++k) {
    EXPECT_GE(e1(k), -1e-10);
    EXPECT_LE(e1(k), 1 + 1e-10);
  }
}

TEST(Causality, QuantumSliceIsTheTrace) {
  AxiomReport r = check_causality(quantum(), quantum_system(3), 20, 4);
  EXPECT_EQ(r.verdict, Verdict::kPass) << r.detail;
}

// Local tomography --------------------------------------------------------------

TEST(LocalTomography, RealQubitsHaveLocallyIndistinguishablePair) {
  AxiomReport r = check_local_tomography(realqt(), realqt_system(2), realqt_system(2), 10, 2);
  ASSERT_EQ(r.verdict, Verdict::kFail);
  const Json* pair_w = nullptr;
  for (const auto& w : r.witnesses)
    if (w.value("kind", "") == "locally_indistinguishable_states") pair_w = &w;
  ASSERT_NE(pair_w, nullptr);
  // Independent check: every real product observable gives the same value.
  RealCounterexample cx = realqt_counterexample();
  const MatrixXcd diff = realqt().density(cx.rho) - realqt().density(cx.rho_prime);
  EXPECT_GT(oracle::max_abs(diff), 0.1);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd x(2, 2), y(2, 2);
    x << n(rng), n(rng), 0, n(rng);
    y << n(rng), n(rng), 0, n(rng);
    x(1, 0) = x(0, 1);
    y(1, 0) = y(0, 1);
    const MatrixXcd prod = oracle::kron(x.cast<oracle::cd>(), y.cast<oracle::cd>());
    EXPECT_NEAR(std::abs((prod * diff).trace()), 0.0, 1e-12);
  }
}

TEST(LocalTomography, ProductEffectsSpanForQuantum) {
  AxiomReport r = check_local_tomography(quantum(), quantum_system(2), quantum_system(3), 10, 2);
  EXPECT_EQ(r.verdict, Verdict::kPass) << r.detail;
}

// Perfect discrimination ----------------------------------------------------------

TEST(Discrimination, PureQubitPairingsAreIdentity) {
  std::mt19937_64 rng(3);
  const VectorXcd k = oracle::random_ket(2, rng);
  const StateVec rho0 = quantum().pure_state(quantum_system(2), k);
  std::optional<Discrimination> d = discriminate(quantum(), rho0);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR((d->pairings - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  // The orthogonal partner has zero overlap with the original ket.
  const MatrixXcd r1 = quantum().density(d->rho1);
  EXPECT_NEAR(std::abs(k.dot(r1 * k)), 0.0, 1e-9);
  EXPECT_TRUE(quantum().is_effect(d->m0));
  EXPECT_TRUE(quantum().is_effect(d->m1));
}

TEST(Discrimination, InternalStateIsNotApplicable) {
  const StateVec chi = quantum().invariant_state(quantum_system(3));
  EXPECT_EQ(check_perfect_state_discrimination(quantum(), chi).verdict, Verdict::kNotApplicable);
}

TEST(Discrimination, RankDeficientClassicalState) {
  const SystemRef a = classical_system(3);
  const StateVec rho(a, Eigen::Vector3d(0.3, 0.7, 0.0));
  AxiomReport r = check_perfect_state_discrimination(classical(), rho);
  EXPECT_EQ(r.verdict, Verdict::kPass) << r.detail;
}

// Compression ------------------------------------------------------------------------

TEST(Compression, TwoQubitRankTwoStateFitsInAQubit) {
  const SystemRef aa = compose_systems(quantum_system(2), quantum_system(2));
  VectorXcd v0 = VectorXcd::Zero(4), v1 = VectorXcd::Zero(4);
  v0(0) = 1;
  v1(1) = v1(2) = 1 / std::sqrt(2.0);
  const MatrixXcd rho_op = 0.75 * v0 * v0.adjoint() + 0.25 * v1 * v1.adjoint();
  const StateVec rho = quantum().state(aa, rho_op);
  Compression c = build_compression(quantum(), rho);
  EXPECT_EQ(c.rank, 2);
  EXPECT_EQ(quantum().dims(c.target).d, 2);
  EXPECT_TRUE(quantum().is_transformation(c.encoder));
  EXPECT_TRUE(quantum().is_transformation(c.decoder));
  // D∘E fixes the state and every state in its face.
  const StateVec back = quantum().apply(c.decoder, quantum().apply(c.encoder, rho));
  EXPECT_NEAR(oracle::max_abs(quantum().density(back) - rho_op), 0.0, 1e-10);
  const StateVec face = quantum().pure_state(aa, (v0 + v1) / std::sqrt(2.0));
  const StateVec face_back = quantum().apply(c.decoder, quantum().apply(c.encoder, face));
  EXPECT_NEAR(oracle::max_abs(quantum().density(face_back) - quantum().density(face)), 0.0, 1e-10);
  // E∘D is the identity on the target.
  const TransfMap ed = quantum().sequence(c.decoder, c.encoder);
  EXPECT_NEAR((ed.matrix() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0, 1e-10);
  Rng rng(4);
  CompressionCheck k = verify_compression(quantum(), rho, c, 10, rng);
  EXPECT_LE(k.lossless_error, 1e-10);
  EXPECT_LE(k.efficiency_error, 1e-10);
}

TEST(Compression, PureStateCompressesToTrivialSystem) {
  const StateVec psi = quantum().pure_state(quantum_system(3), oracle::ket(3, 1));
  Compression c = build_compression(quantum(), psi);
  EXPECT_TRUE(c.target.is_trivial());
  EXPECT_EQ(check_ideal_compression(quantum(), psi, 5, 1).verdict, Verdict::kPass);
}

TEST(Compression, RealQtUsesRealIsometry) {
  Rng rng(6);
  const StateVec rho = realqt().sample_state_of_rank(realqt_system(3), 2, rng);
  Compression c = build_compression(realqt(), rho);
  EXPECT_LE(c.isometry.imag().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(realqt().is_transformation(c.encoder));
  EXPECT_EQ(check_ideal_compression(realqt(), rho, 5, 2).verdict, Verdict::kPass);
}

// Purification -----------------------------------------------------------------------

TEST(Purification, EnvironmentMustCoverTheRank) {
  Rng rng(2);
  const StateVec rho = quantum().sample_state_of_rank(quantum_system(3), 2, rng);
  EXPECT_THROW(purify(quantum(), rho, 1), DomainError);
  Purification p = purify(quantum(), rho, 2);
  EXPECT_EQ(quantum().dims(p.environment).d, 2);
  EXPECT_TRUE(quantum().is_pure_state(p.psi));
  const MatrixXcd marg = oracle::trace_out_second(quantum().density(p.psi), 3, 2);
  EXPECT_NEAR(oracle::max_abs(marg - quantum().density(rho)), 0.0, 1e-10);
}

TEST(Purification, PurificationsConnectedByEnvironmentUnitary) {
  std::mt19937_64 rng(12);
  const MatrixXcd rho = oracle::random_density(3, rng);
  const StateVec s = quantum().state(quantum_system(3), rho);
  Purification p = purify(quantum(), s, 3);
  const MatrixXcd w = oracle::random_unitary(3, rng);
  const MatrixXcd m2 = p.coefficients * w;
  const MatrixXcd u = connecting_unitary(p.coefficients, m2);
  EXPECT_NEAR(oracle::max_abs(u * u.adjoint() - MatrixXcd::Identity(3, 3)), 0.0, 1e-9);
  // (I ⊗ U)|ψ> has coefficient matrix M Uᵀ.
  EXPECT_NEAR(oracle::max_abs(p.coefficients * u.transpose() - m2), 0.0, 1e-9);
}

TEST(Purification, ReversibleDilationReproducesAmplitudeDamping) {
  const double g = 0.3;
  MatrixXcd k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  ReversibleDilation dl = dilate(quantum(), quantum_system(2), {k0, k1});
  EXPECT_LE(dl.residual, 1e-10);
  EXPECT_TRUE(quantum().is_pure_state(dl.eta));
  std::mt19937_64 rng(1);
  const MatrixXcd rho = oracle::random_density(2, rng);
  const MatrixXcd joint = oracle::kron(rho, quantum().density(dl.eta));
  const MatrixXcd out = quantum().apply_operator(dl.unitary, joint);
  EXPECT_NEAR(oracle::max_abs(oracle::trace_out_second(out, 2, 2) - oracle::kraus_apply({k0, k1}, rho)), 0.0,
              1e-10);
}

TEST(Purification, ClassicalWitnessNamesVertexMarginals) {
  AxiomReport r = check_purification(classical(), classical_system(2), 5, 3);
  ASSERT_EQ(r.verdict, Verdict::kFail);
  EXPECT_EQ(r.witnesses[0]["kind"], "vertex_marginals");
  EXPECT_EQ(r.witnesses[0]["pure_bipartite_states"], 4);
  // Oracle: a mixed state on the diagonal is not a vertex, while marginal of a
  // product of vertices is a vertex.
  const Eigen::VectorXd s = vector_from_json(r.witnesses[0]["state"]);
  int nonzero = 0;
  for (int i = 0; i < s.size(); ++i) nonzero += s(i) > 1e-12;
  EXPECT_GE(nonzero, 2);
}

}  // namespace
