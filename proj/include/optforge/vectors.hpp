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

// Value types of the real-vector-space representation: states in St_R(A),
// effects in Eff_R(A), and linear maps Transf_R(A→B).

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <utility>

#include "optforge/system.hpp"

namespace optforge {

class StateVec {
 public:
  StateVec() = default;
  StateVec(SystemRef system, Eigen::VectorXd coords)
      : system_(std::move(system)), coords_(std::move(coords)) {}

  const SystemRef& system() const { return system_; }
  const Eigen::VectorXd& coords() const { return coords_; }

  friend StateVec operator+(const StateVec& a, const StateVec& b) {
    if (a.system_ != b.system_) throw TypeMismatch("adding states of different systems");
    return {a.system_, a.coords_ + b.coords_};
  }
  friend StateVec operator-(const StateVec& a, const StateVec& b) {
    if (a.system_ != b.system_) throw TypeMismatch("subtracting states of different systems");
    return {a.system_, a.coords_ - b.coords_};
  }
  friend StateVec operator*(double s, const StateVec& a) { return {a.system_, s * a.coords_}; }

 private:
  SystemRef system_;
  Eigen::VectorXd coords_;
};

class EffectVec {
 public:
  EffectVec() = default;
  EffectVec(SystemRef system, Eigen::VectorXd coords)
      : system_(std::move(system)), coords_(std::move(coords)) {}

  const SystemRef& system() const { return system_; }
  const Eigen::VectorXd& coords() const { return coords_; }

  friend EffectVec operator+(const EffectVec& a, const EffectVec& b) {
    if (a.system_ != b.system_) throw TypeMismatch("adding effects of different systems");
    return {a.system_, a.coords_ + b.coords_};
  }
  friend EffectVec operator-(const EffectVec& a, const EffectVec& b) {
    if (a.system_ != b.system_) throw TypeMismatch("subtracting effects of different systems");
    return {a.system_, a.coords_ - b.coords_};
  }
  friend EffectVec operator*(double s, const EffectVec& a) { return {a.system_, s * a.coords_}; }

 private:
  SystemRef system_;
  Eigen::VectorXd coords_;
};

/// A linear map St_R(A) → St_R(B).
///
/// `matrix()` acts on coordinates. `kernel()` is the backend's complete
/// operator-level description (a superoperator for Hilbert-space theories, a
/// substochastic matrix for classical theory); it is what the extension rule
/// uses to produce T⊗I_R, which the coordinate matrix alone cannot determine
/// in theories without local tomography.
class TransfMap {
 public:
  using ExtensionRule = std::function<Eigen::MatrixXd(const SystemRef& reference)>;

  TransfMap() = default;
  TransfMap(SystemRef input, SystemRef output, Eigen::MatrixXd matrix,
            Eigen::MatrixXcd kernel, ExtensionRule extension)
      : data_(std::make_shared<const Data>(Data{std::move(input), std::move(output),
                                                std::move(matrix), std::move(kernel),
                                                std::move(extension)})) {}

  const SystemRef& input() const { return data_->input; }
  const SystemRef& output() const { return data_->output; }
  const Eigen::MatrixXd& matrix() const { return data_->matrix; }
  const Eigen::MatrixXcd& kernel() const { return data_->kernel; }

  /// Coordinate matrix of T⊗I_R : A⊗R → B⊗R.
  Eigen::MatrixXd extended_matrix(const SystemRef& reference) const {
    if (reference.is_trivial()) return data_->matrix;
    return data_->extension(reference);
  }

 private:
  struct Data {
    SystemRef input;
    SystemRef output;
    Eigen::MatrixXd matrix;
    Eigen::MatrixXcd kernel;
    ExtensionRule extension;
  };
  std::shared_ptr<const Data> data_;
};

}  // namespace optforge
