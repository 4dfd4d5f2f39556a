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

#define OPTFORGE_VERSION "0.1.0"

#include "optforge/axioms.hpp"
#include "optforge/backends.hpp"
#include "optforge/certificates.hpp"
#include "optforge/core.hpp"
#include "optforge/dsl.hpp"
#include "optforge/features.hpp"
#include "optforge/linrep.hpp"
#include "optforge/reconstruct.hpp"
#include "optforge/report.hpp"
