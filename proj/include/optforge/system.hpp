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

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace optforge {

/// Absolute tolerance for probability-level equalities.
inline constexpr double kProbabilityTolerance = 1e-9;
/// Eigenvalue slack for cone membership.
inline constexpr double kConeTolerance = 1e-10;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Two systems, wires or backends that were required to agree do not.
class TypeMismatch : public Error {
 public:
  explicit TypeMismatch(const std::string& message) : Error(message) {}
};

/// A documented precondition of an operation does not hold.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error(message) {}
};

/// The backend cannot answer the query.
class Unsupported : public Error {
 public:
  explicit Unsupported(const std::string& message) : Error(message) {}
};

/// A system label: the owning theory plus an ordered, flat list of atomic
/// factors. An empty factor list is the trivial system I, which carries no
/// backend and composes with anything.
class SystemRef {
 public:
  SystemRef() = default;
  SystemRef(std::string backend_id, std::vector<int> factors)
      : backend_id_(std::move(backend_id)), factors_(std::move(factors)) {
    for (int f : factors_) {
      if (f < 1) throw DomainError("atomic system dimension must be positive");
    }
    if (factors_.empty()) backend_id_.clear();
  }

  static SystemRef trivial() { return SystemRef(); }
  static SystemRef atomic(std::string backend_id, int dim) {
    return SystemRef(std::move(backend_id), {dim});
  }

  const std::string& backend_id() const { return backend_id_; }
  const std::vector<int>& factors() const { return factors_; }
  bool is_trivial() const { return factors_.empty(); }

  /// Product of the atomic dimensions (Hilbert dimension / alphabet size).
  int hilbert_dim() const {
    return std::accumulate(factors_.begin(), factors_.end(), 1,
                           [](int a, int b) { return a * b; });
  }

  std::string to_string() const {
    if (is_trivial()) return "I";
    std::string out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) out += "*";
      out += backend_id_ + "(" + std::to_string(factors_[i]) + ")";
    }
    return out;
  }

  friend bool operator==(const SystemRef& a, const SystemRef& b) {
    return a.backend_id_ == b.backend_id_ && a.factors_ == b.factors_;
  }
  friend bool operator!=(const SystemRef& a, const SystemRef& b) {
    return !(a == b);
  }

 private:
  std::string backend_id_;
  std::vector<int> factors_;
};

/// A⊗B as a flat factor list; the trivial system is elided.
inline SystemRef compose_systems(const SystemRef& a, const SystemRef& b) {
  if (a.is_trivial()) return b;
  if (b.is_trivial()) return a;
  if (a.backend_id() != b.backend_id()) {
    throw TypeMismatch("cannot compose systems of different theories: " +
                       a.to_string() + " and " + b.to_string());
  }
  std::vector<int> factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  return SystemRef(a.backend_id(), std::move(factors));
}

/// Backend id shared by a set of systems, "" when all are trivial.
inline std::string common_backend(std::initializer_list<const SystemRef*> systems) {
  std::string id;
  for (const SystemRef* s : systems) {
    if (s->is_trivial()) continue;
    if (id.empty()) {
      id = s->backend_id();
    } else if (id != s->backend_id()) {
      throw TypeMismatch("backend mismatch: " + id + " vs " + s->backend_id());
    }
  }
  return id;
}

/// Splits `whole` as prefix⊗rest, where `prefix` must match the leading factors.
inline SystemRef strip_prefix(const SystemRef& whole, const SystemRef& prefix) {
  if (prefix.is_trivial()) return whole;
  const auto& wf = whole.factors();
  const auto& pf = prefix.factors();
  if (whole.backend_id() != prefix.backend_id() || pf.size() > wf.size() ||
      !std::equal(pf.begin(), pf.end(), wf.begin())) {
    throw TypeMismatch(prefix.to_string() + " is not a leading factor of " +
                       whole.to_string());
  }
  return SystemRef(whole.backend_id(),
                   std::vector<int>(wf.begin() + static_cast<long>(pf.size()), wf.end()));
}

/// Splits `whole` as rest⊗suffix, where `suffix` must match the trailing factors.
inline SystemRef strip_suffix(const SystemRef& whole, const SystemRef& suffix) {
  if (suffix.is_trivial()) return whole;
  const auto& wf = whole.factors();
  const auto& sf = suffix.factors();
  if (whole.backend_id() != suffix.backend_id() || sf.size() > wf.size() ||
      !std::equal(sf.begin(), sf.end(), wf.end() - static_cast<long>(sf.size()))) {
    throw TypeMismatch(suffix.to_string() + " is not a trailing factor of " +
                       whole.to_string());
  }
  return SystemRef(whole.backend_id(),
                   std::vector<int>(wf.begin(), wf.end() - static_cast<long>(sf.size())));
}

}  // namespace optforge
