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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qfilter {

/// Raised when a quantity that the filter equations guarantee (real gains,
/// non-negative jump intensity, bounded jump count) is violated numerically.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A detector click was requested while the jump intensity is below the
/// conditioning guard, so the jump map would divide by ~0.
class IllConditionedJump : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

/// Wraps a failure inside a trajectory with the step at which it happened.
class TrajectoryAborted : public InvariantViolation {
 public:
  TrajectoryAborted(const std::string& what, std::size_t step, double time, std::string snapshot)
      : InvariantViolation(what), step_(step), time_(time), snapshot_(std::move(snapshot)) {}

  std::size_t step() const { return step_; }
  double time() const { return time_; }
  const std::string& snapshot() const { return snapshot_; }

 private:
  std::size_t step_;
  double time_;
  std::string snapshot_;
};

}  // namespace qfilter
