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

#include "qfilter/superoperators.hpp"

#include <stdexcept>
#include <string>

namespace qfilter {

namespace {

const SlhModel& require_single(const SlhModel& g, const char* op) {
  if (g.n_channels() != 1) {
    throw std::invalid_argument(std::string(op) + ": single-channel model required");
  }
  return g;
}

}  // namespace

Operator lindbladian(const SlhModel& g, const Operator& x) {
  require_single(g, "lindbladian");
  return Complex(0.0, -1.0) * commutator(x, g.h()) + dissipator(g.l(0), x);
}

Operator liouvillian(const SlhModel& g, const Operator& rho) {
  require_single(g, "liouvillian");
  return Complex(0.0, -1.0) * commutator(g.h(), rho) + dissipator_star(g.l(0), rho);
}

}  // namespace qfilter
