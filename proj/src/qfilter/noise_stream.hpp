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

#include <array>
#include <cstddef>
#include <cstdint>

namespace qfilter {

/// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Per-trajectory measurement noise addressed by (channel, step).
///
/// Every draw is a pure function of (channel seed, trajectory index,
/// channel, step), so a trajectory's noise does not depend on thread count,
/// evaluation order or measurement scheme. Each channel can be re-keyed on
/// its own, which is how tests swap one detector's noise while keeping the
/// other's.
class NoiseStream {
 public:
  enum class Channel : std::uint32_t {
    Homodyne1 = 0,  // dW1
    Homodyne2 = 1,  // dW2 (HdHd)
    Counting = 2,   // click uniforms (HdPc)
  };

  NoiseStream(std::uint64_t seed, std::uint32_t trajectory_index);

  std::uint64_t seed() const { return seed_; }
  std::uint32_t trajectory_index() const { return index_; }

  void set_channel_seed(Channel c, std::uint64_t seed);
  std::uint64_t channel_seed(Channel c) const { return channel_seeds_[static_cast<std::size_t>(c)]; }

  /// Uniform on the open interval (0, 1).
  double uniform(Channel c, std::uint64_t step) const;
  /// Standard normal (Box-Muller on one Philox block).
  double gaussian(Channel c, std::uint64_t step) const;

 private:
  PhiloxCounter block(Channel c, std::uint64_t step) const;

  std::uint64_t seed_;
  std::uint32_t index_;
  std::array<std::uint64_t, 3> channel_seeds_;
};

}  // namespace qfilter
