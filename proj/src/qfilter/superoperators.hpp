// Copyright 2026 The qfilter Authors
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

#include "qfilter/operator_algebra.hpp"
#include "qfilter/slh_network.hpp"

namespace qfilter {

// Generators of a single-channel model G = (S, L, H). S does not enter
// either generator; it only appears in the single-photon cross terms.

/// Heisenberg-side generator: -i[X, H] + D_L X.
Operator lindbladian(const SlhModel& g, const Operator& x);

/// Schroedinger-side generator: -i[H, rho] + D*_L rho. This is the adjoint of
/// lindbladian() under the trace pairing Tr[rho L X] = Tr[X L* rho].
Operator liouvillian(const SlhModel& g, const Operator& rho);

}  // namespace qfilter
