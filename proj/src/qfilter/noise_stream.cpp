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

#include "qfilter/noise_stream.hpp"

#include <cmath>
#include <numbers>

namespace qfilter {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53 random bits -> (0, 1), never exactly 0 or 1.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint32_t trajectory_index)
    : seed_(seed), index_(trajectory_index), channel_seeds_{seed, seed, seed} {}

void NoiseStream::set_channel_seed(Channel c, std::uint64_t seed) {
  channel_seeds_[static_cast<std::size_t>(c)] = seed;
}

PhiloxCounter NoiseStream::block(Channel c, std::uint64_t step) const {
  const std::uint64_t key = channel_seeds_[static_cast<std::size_t>(c)];
  const PhiloxCounter ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), index_,
                          static_cast<std::uint32_t>(c)};
  return philox4x32_10(ctr, {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
}

double NoiseStream::uniform(Channel c, std::uint64_t step) const {
  const PhiloxCounter b = block(c, step);
  return to_open_unit(b[0], b[1]);
}

double NoiseStream::gaussian(Channel c, std::uint64_t step) const {
  const PhiloxCounter b = block(c, step);
  const double u1 = to_open_unit(b[0], b[1]);
  const double u2 = to_open_unit(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qfilter
