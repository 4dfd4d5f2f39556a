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

#include "optforge/backends.hpp"
#include "optforge/linrep.hpp"
#include "oracles.hpp"

namespace {

using namespace optforge;
using oracle::cd;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Systems ---------------------------------------------------------------------

TEST(SystemRef, TrivialIsUnit) {
  SystemRef a = quantum_system(2);
  EXPECT_EQ(compose_systems(a, SystemRef::trivial()), a);
  EXPECT_EQ(compose_systems(SystemRef::trivial(), a), a);
  EXPECT_EQ(SystemRef::trivial().to_string(), "I");
}

TEST(SystemRef, CompositionIsFlat) {
  SystemRef a = quantum_system(2), b = quantum_system(3), c = quantum_system(2);
  EXPECT_EQ(compose_systems(compose_systems(a, b), c), compose_systems(a, compose_systems(b, c)));
  EXPECT_EQ(compose_systems(a, b).factors(), (std::vector<int>{2, 3}));
}

TEST(SystemRef, CompositeDimensionIsMultiplicative) {
  SystemRef ab = compose_systems(quantum_system(2), quantum_system(3));
  EXPECT_EQ(quantum().dims(ab).D, 36);
}

TEST(SystemRef, BackendMismatchThrows) {
  EXPECT_THROW(compose_systems(quantum_system(2), classical_system(2)), TypeMismatch);
}

// Dimensions --------------------------------------------------------------------

TEST(Dims, PerTheory) {
  for (int d = 2; d <= 5; ++d) EXPECT_EQ(quantum().dims(quantum_system(d)), (Dims{d * d, d}));
  EXPECT_EQ(classical().dims(classical_system(3)), (Dims{3, 3}));
  EXPECT_EQ(realqt().dims(realqt_system(2)), (Dims{3, 2}));
  SystemRef rr = compose_systems(realqt_system(2), realqt_system(2));
  EXPECT_EQ(realqt().dims(rr).D, 10);
  EXPECT_EQ(4 * 5 / 2, 10);
}

TEST(Dims, UnknownLabelOrOutOfRange) {
  EXPECT_THROW(quantum().dims(quantum_system(6)), DomainError);
  EXPECT_THROW(backend_for_id("boxworld"), DomainError);
  EXPECT_THROW(make_system("quantum", 1), DomainError);
}

// Vectorization ---------------------------------------------------------------

TEST(Vectorize, RoundTripMaximallyMixed) {
  MatrixXcd h = MatrixXcd::Identity(2, 2) / 2.0;
  EXPECT_LT(oracle::max_abs(quantum().devectorize(quantum().vectorize(h), 2) - h), 1e-14);
}

TEST(Vectorize, RoundTripQubitPureState) {
  const double p = 0.5, theta = 0.0;
  VectorXcd alpha(2);
  alpha << std::sqrt(p), std::exp(cd(0, theta)) * std::sqrt(1 - p);
  MatrixXcd rho = alpha * alpha.adjoint();
  MatrixXcd back = quantum().devectorize(quantum().vectorize(rho), 2);
  EXPECT_LT(oracle::max_abs(back - rho), 1e-14);
  EXPECT_EQ(oracle::numerical_rank(back), 1);
}

TEST(Vectorize, PairingIsTraceInnerProduct) {
  Rng rng(3);
  for (int d = 2; d <= 4; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      MatrixXcd a = linalg::random_hermitian(d, false, rng);
      MatrixXcd b = linalg::random_hermitian(d, false, rng);
      const double direct = (a * b).trace().real();
      EXPECT_NEAR(quantum().vectorize(a).dot(quantum().vectorize(b)), direct, 1e-12);
    }
  }
}

TEST(Vectorize, RejectsNonHermitian) {
  MatrixXcd m(2, 2);
  m << 1, 1, 0, 1;
  EXPECT_THROW(quantum().vectorize(m), DomainError);
  EXPECT_THROW(realqt().vectorize(oracle::pauli_y()), DomainError);
}

// Pairing and norms -----------------------------------------------------------------

TEST(Pair, DeterministicEffectOnNormalizedState) {
  Rng rng(1);
  SystemRef q = quantum_system(3);
  EXPECT_NEAR(pair(quantum().deterministic_effect(q), quantum().sample_state(q, rng)), 1.0, 1e-12);
  SystemRef c = classical_system(4);
  EXPECT_NEAR(pair(classical().deterministic_effect(c), classical().sample_state(c, rng)), 1.0, 1e-12);
}

TEST(Pair, ProjectorOnInvariantQubitState) {
  SystemRef q = quantum_system(2);
  EffectVec m = quantum().effect(q, oracle::proj(oracle::ket(2, 0)));
  EXPECT_NEAR(pair(m, quantum().invariant_state(q)), 0.5, 1e-15);
}

TEST(Pair, MatchesDirectTrace) {
  Rng rng(5);
  std::mt19937_64 orng(55);
  SystemRef q = quantum_system(3);
  for (int i = 0; i < 25; ++i) {
    MatrixXcd rho = oracle::random_density(3, orng);
    StateVec s = quantum().state(q, rho);
    EffectVec a = quantum().sample_extremal_effect(q, rng);
    const double direct = (quantum().effect_operator(a) * rho).trace().real();
    EXPECT_NEAR(pair(a, s), direct, 1e-12);
  }
}

TEST(Pair, BilinearAndTyped) {
  Rng rng(8);
  SystemRef q = quantum_system(2);
  StateVec s = quantum().sample_state(q, rng), t = quantum().sample_state(q, rng);
  EffectVec a = quantum().sample_extremal_effect(q, rng);
  EXPECT_NEAR(pair(a, 0.3 * s + 0.7 * t), 0.3 * pair(a, s) + 0.7 * pair(a, t), 1e-14);
  EXPECT_THROW(pair(a, quantum().sample_state(quantum_system(3), rng)), TypeMismatch);
  EXPECT_FALSE(probability_in_range(1.1));
  EXPECT_TRUE(probability_in_range(1.0 + 1e-10));
}

TEST(OperationalNorm, ClosedFormsAndSampledBound) {
  SystemRef q = quantum_system(2);
  EXPECT_EQ(operational_norm(StateVec(q, Eigen::VectorXd::Zero(4))), 0.0);
  MatrixXcd rho(2, 2);
  rho << 0.5, cd(0.1, 0.05), cd(0.1, -0.05), 0.2;
  StateVec s = quantum().state(q, rho);
  EXPECT_NEAR(operational_norm(s), 0.7, 1e-14);
  EXPECT_NEAR(oracle::eigvals(rho).sum(), 0.7, 1e-14);
  Rng rng(2);
  const double sampled = operational_norm_sampled(s, 200, rng);
  EXPECT_NEAR(sampled, 0.7, 1e-12);

  SystemRef c = classical_system(2);
  StateVec p(c, Eigen::Vector2d(0.2, 0.3));
  EXPECT_NEAR(operational_norm(p), 0.5, 1e-15);
  EXPECT_NEAR(operational_norm_sampled(p, 200, rng), 0.5, 1e-15);
}

// Marginals ----------------------------------------------------------------------

TEST(Marginal, ProductStateFactors) {
  Rng rng(4);
  SystemRef a = quantum_system(2), b = quantum_system(3);
  StateVec alpha = quantum().sample_state(a, rng), beta = quantum().sample_state(b, rng);
  StateVec ab = quantum().tensor(alpha, beta);
  EXPECT_LT((marginal(ab, a, b, Keep::kFirst).coords() - alpha.coords()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((marginal(ab, a, b, Keep::kSecond).coords() - beta.coords()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Marginal, BellStateGivesInvariantState) {
  SystemRef a = quantum_system(2);
  StateVec phi = quantum().pure_state(compose_systems(a, a), oracle::omega(2));
  StateVec m = marginal(phi, a, a, Keep::kSecond);
  EXPECT_LT((m.coords() - quantum().invariant_state(a).coords()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Marginal, MatchesPartialTraceOracle) {
  std::mt19937_64 orng(77);
  SystemRef a = quantum_system(3);
  SystemRef ab = compose_systems(a, a);
  for (int i = 0; i < 5; ++i) {
    MatrixXcd rho = oracle::random_density(9, orng);
    StateVec s = quantum().state(ab, rho);
    MatrixXcd ma = quantum().density(marginal(s, a, a, Keep::kFirst));
    MatrixXcd mb = quantum().density(marginal(s, a, a, Keep::kSecond));
    EXPECT_LT(oracle::max_abs(ma - oracle::trace_out_second(rho, 3, 3)), 1e-12);
    EXPECT_LT(oracle::max_abs(mb - oracle::trace_out_first(rho, 3, 3)), 1e-12);
  }
}

TEST(Marginal, IsLinear) {
  Rng rng(6);
  SystemRef a = classical_system(2), b = classical_system(3);
  SystemRef ab = compose_systems(a, b);
  StateVec s = classical().sample_state(ab, rng), t = classical().sample_state(ab, rng);
  StateVec lhs = marginal(0.4 * s + 0.6 * t, a, b, Keep::kFirst);
  StateVec rhs = 0.4 * marginal(s, a, b, Keep::kFirst) + 0.6 * marginal(t, a, b, Keep::kFirst);
  EXPECT_LT((lhs.coords() - rhs.coords()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Marginal, PureMarginalOfPureStateImpliesProduct) {
  Rng rng(10);
  SystemRef a = quantum_system(2), b = quantum_system(2);
  for (int i = 0; i < 20; ++i) {
    StateVec alpha = quantum().sample_pure_state(a, rng);
    StateVec beta = quantum().sample_pure_state(b, rng);
    StateVec ab = quantum().tensor(alpha, beta);
    StateVec ma = marginal(ab, a, b, Keep::kFirst);
    ASSERT_TRUE(quantum().is_pure_state(ma));
    StateVec mb = marginal(ab, a, b, Keep::kSecond);
    StateVec rebuilt = quantum().tensor(ma, mb);
    EXPECT_LT((rebuilt.coords() - ab.coords()).cwiseAbs().maxCoeff(), 1e-12);
  }
  // An entangled pure state has a mixed marginal.
  StateVec psi = quantum().sample_pure_state(compose_systems(a, b), rng);
  EXPECT_FALSE(quantum().is_pure_state(marginal(psi, a, b, Keep::kFirst)));
}

// Internality --------------------------------------------------------------------------

TEST(Internal, InvariantPureAndRankDeficient) {
  Rng rng(11);
  SystemRef q = quantum_system(3);
  EXPECT_TRUE(is_internal(quantum().invariant_state(q)));
  EXPECT_FALSE(is_internal(quantum().sample_pure_state(q, rng)));
  EXPECT_FALSE(is_internal(quantum().sample_state_of_rank(q, 2, rng)));
  EXPECT_TRUE(is_internal(classical().invariant_state(classical_system(3))));
  EXPECT_FALSE(is_internal(StateVec(classical_system(3), Eigen::Vector3d(0.5, 0.5, 0))));
}

// Statistical equality --------------------------------------------------------------------

TEST(StatisticalEquality, Reflexive) {
  Rng rng(12);
  SystemRef q = quantum_system(2);
  TransfMap t = quantum().sample_channel(q, q, rng);
  EXPECT_TRUE(statistically_equal(t, t, {SystemRef::trivial(), q}));
}

TEST(StatisticalEquality, RealChannelsNeedReference) {
  RealCounterexample cx = realqt_counterexample();
  SystemRef a = realqt_system(2);
  EXPECT_TRUE(statistically_equal(cx.channel, cx.channel_prime, {SystemRef::trivial()}));
  EXPECT_FALSE(statistically_equal(cx.channel, cx.channel_prime, {a}));
  EXPECT_FALSE(statistically_equal(cx.channel, cx.channel_prime));
  EXPECT_EQ(realqt().reference_requirement(a).size(), 2u);
}

TEST(StatisticalEquality, DistinctRandomChannels) {
  Rng rng(13);
  SystemRef q = quantum_system(2);
  TransfMap t = quantum().sample_channel(q, q, rng), u = quantum().sample_channel(q, q, rng);
  EXPECT_FALSE(statistically_equal(t, u, {SystemRef::trivial()}));
}

TEST(StatisticalEquality, EquivalenceOnSamples) {
  Rng rng(14);
  SystemRef q = quantum_system(2);
  TransfMap u = quantum().reversible_sample(q, rng);
  // Two Kraus presentations of the same channel.
  MatrixXcd k0 = MatrixXcd::Identity(2, 2) * std::sqrt(0.5), k1 = oracle::pauli_z() * std::sqrt(0.5);
  MatrixXcd plus = (k0 + k1) / std::sqrt(2.0), minus = (k0 - k1) / std::sqrt(2.0);
  TransfMap t1 = quantum().from_kraus(q, q, {k0, k1});
  TransfMap t2 = quantum().from_kraus(q, q, {plus, minus});
  TransfMap t3 = quantum().from_kraus(q, q, {minus, plus});
  EXPECT_TRUE(statistically_equal(t1, t2));
  EXPECT_TRUE(statistically_equal(t2, t1));
  EXPECT_TRUE(statistically_equal(t2, t3));
  EXPECT_TRUE(statistically_equal(t1, t3));
  EXPECT_FALSE(statistically_equal(t1, u));
}

// Apply -------------------------------------------------------------------------------

TEST(Apply, IdentityUnchanged) {
  Rng rng(15);
  SystemRef q = quantum_system(3);
  StateVec s = quantum().sample_state(q, rng);
  EXPECT_LT((apply(quantum().identity(q), s).coords() - s.coords()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Apply, ExtendedRealChannelGivesCounterexampleState) {
  RealCounterexample cx = realqt_counterexample();
  SystemRef a = realqt_system(2);
  StateVec phi = realqt().pure_state(compose_systems(a, a), oracle::omega(2));
  StateVec out = apply_extended(cx.channel_prime, phi);
  EXPECT_LT((out.coords() - cx.rho_prime.coords()).cwiseAbs().maxCoeff(), 1e-14);
  StateVec out2 = apply_extended(cx.channel, phi);
  EXPECT_LT((out2.coords() - cx.rho.coords()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Apply, RandomChannelMatchesKrausSum) {
  Rng rng(16);
  std::mt19937_64 orng(160);
  SystemRef a = quantum_system(2), b = quantum_system(3);
  std::vector<MatrixXcd> ks = linalg::random_channel_kraus(2, 3, 3, false, rng);
  TransfMap t = quantum().from_kraus(a, b, ks);
  for (int i = 0; i < 10; ++i) {
    MatrixXcd rho = oracle::random_density(2, orng);
    MatrixXcd out = quantum().density(apply(t, quantum().state(a, rho)));
    EXPECT_LT(oracle::max_abs(out - oracle::kraus_apply(ks, rho)), 1e-12);
  }
  EXPECT_THROW(apply(t, quantum().state(b, MatrixXcd::Identity(3, 3) / 3.0)), TypeMismatch);
}

TEST(Apply, DeterministicChannelsPreserveDeterministicEffect) {
  Rng rng(17);
  SystemRef a = quantum_system(3), b = quantum_system(2);
  TransfMap t = quantum().sample_channel(a, b, rng);
  EXPECT_TRUE(is_deterministic(t));
  EXPECT_FALSE(is_deterministic(quantum().sample_pure_transformation(a, b, rng)));
  TransfMap c = classical().sample_channel(classical_system(3), classical_system(2), rng);
  EXPECT_TRUE(is_deterministic(c));
}

// Backend invariants ----------------------------------------------------------------

TEST(Backend, InvariantStateFixedByReversibles) {
  Rng rng(18);
  for (const TheoryBackend* b : std::vector<const TheoryBackend*>{&quantum(), &classical(), &realqt()}) {
    for (int d = 2; d <= 4; ++d) {
      SystemRef a = SystemRef::atomic(b->id(), d);
      StateVec chi = b->invariant_state(a);
      for (int i = 0; i < 100; ++i) {
        StateVec out = b->apply(b->reversible_sample(a, rng), chi);
        ASSERT_LT((out.coords() - chi.coords()).cwiseAbs().maxCoeff(), 1e-12) << b->id() << " " << d;
      }
    }
  }
}

TEST(Backend, InvariantStateOfCompositeIsProduct) {
  for (const TheoryBackend* b : std::vector<const TheoryBackend*>{&quantum(), &classical()}) {
    SystemRef a = SystemRef::atomic(b->id(), 2), c = SystemRef::atomic(b->id(), 3);
    StateVec lhs = b->invariant_state(compose_systems(a, c));
    StateVec rhs = b->tensor(b->invariant_state(a), b->invariant_state(c));
    EXPECT_LT((lhs.coords() - rhs.coords()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Backend, DeterministicEffectUniqueness) {
  for (const TheoryBackend* b : std::vector<const TheoryBackend*>{&quantum(), &classical(), &realqt()}) {
    EXPECT_TRUE(b->causal()) << b->id();
    SystemRef a = SystemRef::atomic(b->id(), 3);
    Rng rng(19);
    DeterministicSlice slice = b->deterministic_slice(a, b->dims(a).D + 3, rng);
    EXPECT_EQ(slice.directions.cols(), 0);
    EXPECT_LT((slice.particular - b->deterministic_effect(a).coords()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Backend, QuantumPurityIsChoiRankOne) {
  Rng rng(20);
  SystemRef a = quantum_system(2), b = quantum_system(3);
  std::vector<MatrixXcd> ks = linalg::random_channel_kraus(2, 3, 2, false, rng);
  TransfMap t = quantum().from_kraus(a, b, ks);
  EXPECT_EQ(oracle::numerical_rank(oracle::choi_of_kraus(ks, 2)), 2);
  EXPECT_FALSE(quantum().is_pure_transformation(t));
  TransfMap p = quantum().from_kraus(a, b, {ks[0]});
  EXPECT_TRUE(quantum().is_pure_transformation(p));
  EXPECT_LT(oracle::max_abs(quantum().choi_matrix(t) - oracle::choi_of_kraus(ks, 2)), 1e-12);
}

TEST(Backend, ClassicalPurity) {
  SystemRef c = classical_system(3);
  EXPECT_TRUE(classical().is_pure_state(classical().vertex(c, 1)));
  EXPECT_FALSE(classical().is_pure_state(classical().invariant_state(c)));
  Rng rng(21);
  EXPECT_TRUE(classical().is_pure_transformation(classical().sample_pure_transformation(c, c, rng)));
  EXPECT_FALSE(classical().is_pure_transformation(classical().reversible_sample(c, rng)));
}

TEST(Backend, SwapOnTwoQubitBasisState) {
  SystemRef q = quantum_system(2);
  SystemRef qq = compose_systems(q, q);
  StateVec s01 = quantum().pure_state(qq, oracle::kron(oracle::ket(2, 0), oracle::ket(2, 1)));
  StateVec s10 = quantum().pure_state(qq, oracle::kron(oracle::ket(2, 1), oracle::ket(2, 0)));
  StateVec out = quantum().apply(quantum().swap(q, q), s01);
  EXPECT_LT((out.coords() - s10.coords()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Backend, MembershipOracles) {
  Rng rng(22);
  SystemRef q = quantum_system(2);
  EXPECT_TRUE(quantum().is_state(quantum().sample_state(q, rng)));
  EXPECT_FALSE(quantum().is_state(quantum().state(q, oracle::pauli_z())));
  EXPECT_TRUE(quantum().is_effect(quantum().sample_extremal_effect(q, rng)));
  EXPECT_FALSE(quantum().is_effect(quantum().effect(q, 2.0 * MatrixXcd::Identity(2, 2))));
  TransfMap transpose = quantum().make_transformation(
      q, q, linalg::superop_from_choi(linalg::permutation_unitary({2, 2}, {1, 0}), 2, 2));
  EXPECT_FALSE(quantum().is_transformation(transpose));
}

// Real counterexample ---------------------------------------------------------------------

TEST(RealCounterexample, Witnesses) {
  RealCounterexample cx = realqt_counterexample();
  EXPECT_LT(cx.difference_residual, 1e-15);
  EXPECT_LT(cx.local_statistics_gap, 1e-15);
  EXPECT_LT(cx.overlap, 1e-15);
  EXPECT_LT(cx.channel_gap_on_symmetric, 1e-15);
  EXPECT_LT(cx.channel_output_gap, 1e-15);
  EXPECT_LT(cx.choi_gap, 1e-15);
  // ρ − ρ′ is a multiple of Y⊗Y built from independent Pauli matrices.
  MatrixXcd yy = oracle::kron(oracle::pauli_y(), oracle::pauli_y());
  EXPECT_LT(oracle::max_abs(cx.difference.cast<cd>() + 0.5 * yy), 1e-15);
  EXPECT_GT((cx.rho.coords() - cx.rho_prime.coords()).norm(), 0.5);
}

}  // namespace
