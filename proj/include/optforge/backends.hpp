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

#include "optforge/backend.hpp"
#include "optforge/backends/classical.hpp"
#include "optforge/backends/hilbert.hpp"
#include "optforge/backends/realqt.hpp"

namespace optforge {

/// Backend owning the given systems. All-trivial inputs resolve to the
/// quantum backend, whose scalar algebra is the same as every other theory's.
inline const TheoryBackend& backend_of(std::initializer_list<const SystemRef*> systems) {
  const std::string id = common_backend(systems);
  return id.empty() ? static_cast<const TheoryBackend&>(quantum()) : backend_for_id(id);
}

inline const TheoryBackend& backend_of(const SystemRef& a) { return backend_of({&a}); }

/// Atomic system of the named theory ("classical", "quantum", "realqt"),
/// validated against the backend caps.
inline SystemRef make_system(const std::string& theory, int dim) {
  SystemRef s = SystemRef::atomic(theory, dim);
  backend_for_id(theory).dims(s);
  return s;
}

}  // namespace optforge
