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

#include "qfilter/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfilter {

WavePacket::WavePacket(AmplitudeFn xi, TailFn w, double epsilon_w, std::optional<GaussianPulse> g)
    : xi_(std::move(xi)), w_(std::move(w)), epsilon_w_(epsilon_w), gaussian_(g) {
  if (!xi_ || !w_) {
    throw std::invalid_argument("WavePacket: amplitude and tail functions are required");
  }
  if (!(epsilon_w_ > 0.0)) {
    throw std::invalid_argument("WavePacket: epsilon_w must be positive");
  }
}

WavePacket WavePacket::gaussian(double omega, double t0, double epsilon_w) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("WavePacket: omega must be positive and finite");
  }
  if (!std::isfinite(t0)) {
    throw std::invalid_argument("WavePacket: t0 must be finite");
  }
  const double amplitude = std::pow(omega * omega / (2.0 * std::numbers::pi), 0.25);
  auto xi = [=](double t) {
    const double u = t - t0;
    return Complex(amplitude * std::exp(-0.25 * omega * omega * u * u), 0.0);
  };
  auto w = [=](double t) { return 0.5 * std::erfc(omega * (t - t0) / std::numbers::sqrt2); };
  return WavePacket(xi, w, epsilon_w, GaussianPulse{omega, t0});
}

WavePacket WavePacket::custom(AmplitudeFn xi, TailFn w, double epsilon_w) {
  return WavePacket(std::move(xi), std::move(w), epsilon_w, std::nullopt);
}

WavePacket WavePacket::vacuum() {
  return WavePacket([](double) { return Complex(0.0, 0.0); }, [](double) { return 0.0; },
                    kDefaultTailCutoff, std::nullopt);
}

double WavePacket::lambda_coupling(double t) const {
  const double w = w_(t);
  if (w < epsilon_w_) return 0.0;
  const Complex x = xi_(t);
  if (std::abs(x.imag()) > 1e-14 * std::max(1.0, std::abs(x))) {
    throw std::domain_error("WavePacket::lambda_coupling: pulse amplitude is not real");
  }
  return x.real() / std::sqrt(w);
}

}  // namespace qfilter
