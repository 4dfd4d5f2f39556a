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

#include "optforge/backends/hilbert.hpp"

namespace optforge {

/// Two locally indistinguishable but orthogonal two-rebit states, and two
/// rebit channels that agree on every rebit state but not on half of a
/// maximally entangled pair.
struct RealCounterexample {
  StateVec rho;
  StateVec rho_prime;
  TransfMap channel;        // M ↦ ½M + ½ Y M Y
  TransfMap channel_prime;  // M ↦ ½ Z M Z + ½ X M X
  Eigen::MatrixXd difference;  // ρ − ρ′

  double difference_residual = 0;       // ‖ρ − ρ′ − ½ J⊗J‖_max, J = [[0,-1],[1,0]]
  double local_statistics_gap = 0;      // max |Tr[(ρ−ρ′)(P⊗P′)]|, P, P′ symmetric basis
  double overlap = 0;                   // Tr[ρ ρ′]
  double channel_gap_on_symmetric = 0;  // max |C(τ) − C′(τ)| over a symmetric basis
  double channel_output_gap = 0;        // max |C(I/2) − I/2|, |C′(I/2) − I/2|
  double choi_gap = 0;                  // max of ‖(C⊗I)Φ+ − ρ‖, ‖(C′⊗I)Φ+ − ρ′‖
};

/// The antisymmetric real matrix [[0,-1],[1,0]] (= -iY).
inline Eigen::MatrixXcd real_antisymmetric_j() {
  Eigen::MatrixXcd j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}

inline RealCounterexample realqt_counterexample() {
  using linalg::cd;
  const HilbertBackend& rq = realqt();
  const SystemRef a = realqt_system(2);
  const SystemRef ab = compose_systems(a, a);
  const double s = 1.0 / std::sqrt(2.0);

  Eigen::VectorXcd phi_p(4), phi_m(4), psi_p(4), psi_m(4);
  phi_p << s, 0, 0, s;
  phi_m << s, 0, 0, -s;
  psi_p << 0, s, s, 0;
  psi_m << 0, s, -s, 0;
  const Eigen::MatrixXcd rho_m = 0.5 * phi_p * phi_p.adjoint() + 0.5 * psi_m * psi_m.adjoint();
  const Eigen::MatrixXcd rho_pm = 0.5 * phi_m * phi_m.adjoint() + 0.5 * psi_p * psi_p.adjoint();

  // Real Kraus forms: Y M Y = J M Jᵀ and X, Z are real already.
  const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
  const Eigen::MatrixXcd j = real_antisymmetric_j();
  Eigen::MatrixXcd x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;

  RealCounterexample out;
  out.rho = rq.state(ab, rho_m);
  out.rho_prime = rq.state(ab, rho_pm);
  out.channel = rq.from_kraus(a, a, {s * id2, s * j});
  out.channel_prime = rq.from_kraus(a, a, {s * z, s * x});
  const Eigen::MatrixXcd diff = rho_m - rho_pm;
  out.difference = diff.real();
  out.difference_residual = (diff - 0.5 * linalg::kron(j, j)).cwiseAbs().maxCoeff();

  const auto& basis = rq.basis(2);
  for (const auto& p : basis) {
    for (const auto& q : basis) {
      const Eigen::MatrixXcd pq = linalg::kron(linalg::dense(p, 2), linalg::dense(q, 2));
      out.local_statistics_gap = std::max(out.local_statistics_gap, std::abs((diff * pq).trace()));
    }
    const Eigen::MatrixXcd tau = linalg::dense(p, 2);
    const Eigen::MatrixXcd gap = rq.apply_operator(out.channel, tau) - rq.apply_operator(out.channel_prime, tau);
    out.channel_gap_on_symmetric = std::max(out.channel_gap_on_symmetric, gap.cwiseAbs().maxCoeff());
  }
  out.overlap = std::abs((rho_m * rho_pm).trace());

  const Eigen::MatrixXcd half_id = 0.5 * id2;
  out.channel_output_gap =
      std::max((rq.apply_operator(out.channel, half_id) - half_id).cwiseAbs().maxCoeff(),
               (rq.apply_operator(out.channel_prime, half_id) - half_id).cwiseAbs().maxCoeff());

  const Eigen::MatrixXcd bell = phi_p * phi_p.adjoint();
  const TransfMap c_ext = rq.tensor(out.channel, rq.identity(a));
  const TransfMap cp_ext = rq.tensor(out.channel_prime, rq.identity(a));
  out.choi_gap = std::max((rq.apply_operator(c_ext, bell) - rho_m).cwiseAbs().maxCoeff(),
                          (rq.apply_operator(cp_ext, bell) - rho_pm).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace optforge
