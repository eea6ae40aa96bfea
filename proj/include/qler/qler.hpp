// Copyright 2026 The qler Authors
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

// Umbrella header: logical-error-rate estimation for stabilizer circuits via
// stratified fixed-weight fault injection, S-curve extrapolation, and a
// baseline i.i.d. sampler.

#pragma once

#include "qler/bitvec.hpp"      // IWYU pragma: export
#include "qler/circuit.hpp"     // IWYU pragma: export
#include "qler/codes.hpp"       // IWYU pragma: export
#include "qler/decoder.hpp"     // IWYU pragma: export
#include "qler/digest.hpp"      // IWYU pragma: export
#include "qler/error.hpp"       // IWYU pragma: export
#include "qler/parallel.hpp"    // IWYU pragma: export
#include "qler/pipeline.hpp"    // IWYU pragma: export
#include "qler/propagation.hpp" // IWYU pragma: export
#include "qler/rng.hpp"         // IWYU pragma: export
#include "qler/sampling.hpp"    // IWYU pragma: export
#include "qler/scurve.hpp"      // IWYU pragma: export
#include "qler/svg.hpp"         // IWYU pragma: export
#include "qler/version.hpp"     // IWYU pragma: export

