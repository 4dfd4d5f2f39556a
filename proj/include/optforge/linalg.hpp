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

// Dense linear-algebra helpers shared by the Hilbert-space backends and the
// feature constructions. Operators are Eigen::MatrixXcd; vectorization is
// row-major, vec(X)[i * d + j] = X(i, j).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <vector>

#include "optforge/system.hpp"

namespace optforge::linalg {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr cd kI{0.0, 1.0};

/// One element of the orthonormal Hermitian operator basis, stored sparsely.
struct BasisElement {
  struct Entry {
    int row;
    int col;
    cd value;
  };
  std::vector<Entry> entries;
};

/// Orthonormal (Hilbert-Schmidt) Hermitian basis of d×d operators:
/// diagonal units |i><i|, then for each i<j the symmetric element
/// (|i><j| + |j><i|)/√2 followed, unless `real_only`, by the antisymmetric
/// element i(|j><i| - |i><j|)/√2.
inline std::vector<BasisElement> hermitian_basis(int d, bool real_only) {
  std::vector<BasisElement> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) basis.push_back({{{i, i, 1.0}}});
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      basis.push_back({{{i, j, s}, {j, i, s}}});
      if (!real_only) basis.push_back({{{i, j, -kI * s}, {j, i, kI * s}}});
    }
  }
  return basis;
}

inline MatrixXcd dense(const BasisElement& b, int d) {
  MatrixXcd m = MatrixXcd::Zero(d, d);
  for (const auto& e : b.entries) m(e.row, e.col) = e.value;
  return m;
}

inline VectorXcd vec(const MatrixXcd& m) {
  VectorXcd v(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

inline MatrixXcd unvec(const VectorXcd& v, int d) {
  MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v(i * d + j);
  return m;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline bool is_hermitian(const MatrixXcd& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline VectorXd eigenvalues(const MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const MatrixXcd& h) {
  if (h.size() == 0) return 0.0;
  return eigenvalues(0.5 * (h + h.adjoint())).minCoeff();
}

inline double max_eigenvalue(const MatrixXcd& h) {
  if (h.size() == 0) return 0.0;
  return eigenvalues(0.5 * (h + h.adjoint())).maxCoeff();
}

inline int rank_of_psd(const MatrixXcd& h, double tol) {
  VectorXd ev = eigenvalues(0.5 * (h + h.adjoint()));
  int r = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > tol) ++r;
  return r;
}

/// Orthonormal basis of the range of a PSD operator (eigenvalue > tol),
/// with columns ordered by decreasing eigenvalue.
inline MatrixXcd support_basis(const MatrixXcd& h, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (h + h.adjoint()));
  std::vector<int> keep;
  for (int i = static_cast<int>(h.rows()) - 1; i >= 0; --i)
    if (es.eigenvalues()(i) > tol) keep.push_back(i);
  MatrixXcd out(h.rows(), static_cast<long>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<long>(k)) = es.eigenvectors().col(keep[k]);
  return out;
}

/// Orthonormal basis of the range of a PSD operator, first running
/// Gram-Schmidt over the computational basis vectors projected onto the
/// range. Coordinate-aligned supports come back as exact basis kets, in order.
inline MatrixXcd aligned_support_basis(const MatrixXcd& h, double tol) {
  MatrixXcd range = support_basis(h, tol);
  const int d = static_cast<int>(h.rows());
  const int r = static_cast<int>(range.cols());
  MatrixXcd projector = range * range.adjoint();
  MatrixXcd out(d, r);
  int found = 0;
  for (int i = 0; i < d && found < r; ++i) {
    VectorXcd v = projector.col(i);
    for (int k = 0; k < found; ++k) v -= out.col(k).dot(v) * out.col(k);
    double n = v.norm();
    if (n > 1e-7) out.col(found++) = v / n;
  }
  return out;
}

/// Projector onto the range of `h`.
inline MatrixXcd support_projector(const MatrixXcd& h, double tol) {
  MatrixXcd b = support_basis(h, tol);
  return b * b.adjoint();
}

/// Orthonormal basis of the null space of a (not necessarily square) matrix.
inline MatrixXcd null_space(const MatrixXcd& m, double tol) {
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

inline MatrixXd null_space(const MatrixXd& m, double tol) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

/// Orthonormal basis of the orthogonal complement of the columns of `v`,
/// kept real when `real_only`.
inline MatrixXcd orthonormal_complement(const MatrixXcd& v, bool real_only, double tol = 1e-10) {
  if (real_only) {
    MatrixXd vt = v.real().transpose();
    return null_space(vt, tol).cast<cd>();
  }
  return null_space(MatrixXcd(v.adjoint()), tol);
}

inline MatrixXcd psd_sqrt(const MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (h + h.adjoint()));
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

inline MatrixXcd pseudo_inverse(const MatrixXcd& m, double tol) {
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd s = svd.singularValues();
  VectorXd inv = VectorXd::Zero(s.size());
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

inline double operator_norm(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

// ----------------------------------------------------------------------------
// Random sampling.

inline MatrixXcd gaussian_matrix(int rows, int cols, bool real_only, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = n(rng);
      const double im = real_only ? 0.0 : n(rng);
      m(i, j) = cd(re, im);
    }
  return m;
}

/// Haar-distributed unitary (orthogonal if `real_only`) from the QR
/// decomposition of a Gaussian matrix, with the R-diagonal phases removed.
inline MatrixXcd random_unitary(int d, bool real_only, Rng& rng) {
  MatrixXcd g = gaussian_matrix(d, d, real_only, rng);
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const cd diag = r(i, i);
    const double a = std::abs(diag);
    if (a > 0) q.col(i) *= diag / a;
  }
  return q;
}

inline VectorXcd random_unit_vector(int d, bool real_only, Rng& rng) {
  VectorXcd v = gaussian_matrix(d, 1, real_only, rng).col(0);
  return v / v.norm();
}

/// Random density matrix of the given rank (Ginibre construction).
inline MatrixXcd random_density(int d, int rank, bool real_only, Rng& rng) {
  MatrixXcd g = gaussian_matrix(d, rank, real_only, rng);
  MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace().real();
}

/// Random Hermitian (real symmetric if `real_only`) matrix.
inline MatrixXcd random_hermitian(int d, bool real_only, Rng& rng) {
  MatrixXcd g = gaussian_matrix(d, d, real_only, rng);
  return 0.5 * (g + g.adjoint());
}

/// Random Kraus family {K_k} with Σ K_k† K_k = I (isometry slicing).
inline std::vector<MatrixXcd> random_channel_kraus(int d_in, int d_out, int count,
                                                   bool real_only, Rng& rng) {
  MatrixXcd g = gaussian_matrix(d_out * count, d_in, real_only, rng);
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd v = qr.householderQ() * MatrixXcd::Identity(d_out * count, d_in);
  std::vector<MatrixXcd> kraus;
  for (int k = 0; k < count; ++k) kraus.push_back(v.block(k * d_out, 0, d_out, d_in));
  return kraus;
}

// ----------------------------------------------------------------------------
// Multipartite index manipulation.

/// Partial trace of an operator on ⊗_k C^{dims[k]}, keeping the factors with
/// keep[k] == true (in their original order).
inline MatrixXcd partial_trace(const MatrixXcd& x, const std::vector<int>& dims,
                               const std::vector<bool>& keep) {
  const int n = static_cast<int>(dims.size());
  int dk = 1, dt = 1;
  for (int k = 0; k < n; ++k) (keep[static_cast<std::size_t>(k)] ? dk : dt) *= dims[static_cast<std::size_t>(k)];
  MatrixXcd out = MatrixXcd::Zero(dk, dk);
  const int total = dk * dt;
  std::vector<int> digits(static_cast<std::size_t>(n));
  // Precompute (kept index, traced index) for every full index.
  std::vector<int> kept_index(static_cast<std::size_t>(total)), traced_index(static_cast<std::size_t>(total));
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int k = n - 1; k >= 0; --k) {
      digits[static_cast<std::size_t>(k)] = rem % dims[static_cast<std::size_t>(k)];
      rem /= dims[static_cast<std::size_t>(k)];
    }
    int ki = 0, ti = 0;
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      if (keep[uk]) {
        ki = ki * dims[uk] + digits[uk];
      } else {
        ti = ti * dims[uk] + digits[uk];
      }
    }
    kept_index[static_cast<std::size_t>(idx)] = ki;
    traced_index[static_cast<std::size_t>(idx)] = ti;
  }
  for (int r = 0; r < total; ++r)
    for (int c = 0; c < total; ++c)
      if (traced_index[static_cast<std::size_t>(r)] == traced_index[static_cast<std::size_t>(c)])
        out(kept_index[static_cast<std::size_t>(r)], kept_index[static_cast<std::size_t>(c)]) += x(r, c);
  return out;
}

/// Unitary that permutes tensor factors: output factor k is input factor perm[k].
inline MatrixXcd permutation_unitary(const std::vector<int>& dims, const std::vector<int>& perm) {
  const int n = static_cast<int>(dims.size());
  int total = 1;
  for (int d : dims) total *= d;
  std::vector<int> out_dims(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out_dims[static_cast<std::size_t>(k)] = dims[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
  MatrixXcd p = MatrixXcd::Zero(total, total);
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int k = n - 1; k >= 0; --k) {
      digits[static_cast<std::size_t>(k)] = rem % dims[static_cast<std::size_t>(k)];
      rem /= dims[static_cast<std::size_t>(k)];
    }
    int out = 0;
    for (int k = 0; k < n; ++k) out = out * out_dims[static_cast<std::size_t>(k)] + digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    p(out, idx) = 1.0;
  }
  return p;
}

/// Superoperator (row-major vec convention) of X ↦ Σ_k K_k X K_k†.
inline MatrixXcd superop_from_kraus(const std::vector<MatrixXcd>& kraus) {
  const long rows = kraus.front().rows(), cols = kraus.front().cols();
  MatrixXcd s = MatrixXcd::Zero(rows * rows, cols * cols);
  for (const auto& k : kraus) s += kron(k, MatrixXcd(k.conjugate()));
  return s;
}

/// Choi operator J = Σ_ij T(|i><j|) ⊗ |i><j| (output factor first).
inline MatrixXcd choi_from_superop(const MatrixXcd& s, int d_in, int d_out) {
  MatrixXcd j = MatrixXcd::Zero(d_out * d_in, d_out * d_in);
  for (int a = 0; a < d_out; ++a)
    for (int b = 0; b < d_out; ++b)
      for (int i = 0; i < d_in; ++i)
        for (int k = 0; k < d_in; ++k) j(a * d_in + i, b * d_in + k) = s(a * d_out + b, i * d_in + k);
  return j;
}

inline MatrixXcd superop_from_choi(const MatrixXcd& j, int d_in, int d_out) {
  MatrixXcd s(d_out * d_out, d_in * d_in);
  for (int a = 0; a < d_out; ++a)
    for (int b = 0; b < d_out; ++b)
      for (int i = 0; i < d_in; ++i)
        for (int k = 0; k < d_in; ++k) s(a * d_out + b, i * d_in + k) = j(a * d_in + i, b * d_in + k);
  return s;
}

inline MatrixXcd apply_superop(const MatrixXcd& s, const MatrixXcd& x, int d_out) {
  return unvec(s * vec(x), d_out);
}

/// Kraus operators of a superoperator from the Choi eigendecomposition.
inline std::vector<MatrixXcd> kraus_from_superop(const MatrixXcd& s, int d_in, int d_out, double tol) {
  MatrixXcd j = choi_from_superop(s, d_in, d_out);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (j + j.adjoint()));
  std::vector<MatrixXcd> kraus;
  for (int i = static_cast<int>(j.rows()) - 1; i >= 0; --i) {
    const double ev = es.eigenvalues()(i);
    if (ev <= tol) continue;
    VectorXcd v = es.eigenvectors().col(i) * std::sqrt(ev);
    MatrixXcd k(d_out, d_in);
    for (int a = 0; a < d_out; ++a)
      for (int b = 0; b < d_in; ++b) k(a, b) = v(a * d_in + b);
    kraus.push_back(k);
  }
  return kraus;
}

}  // namespace optforge::linalg
