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

#include <functional>
#include <optional>

#include "qfilter/operator_algebra.hpp"

namespace qfilter {

struct GaussianPulse {
  double omega = 1.46;  // bandwidth, units of kappa
  double t0 = 4.0;      // peak arrival time, units of 1/kappa
};

/// Temporal amplitude xi(t) of the single input photon together with its
/// remaining tail mass w(t) = int_t^inf |xi(s)|^2 ds.
///
/// The built-in family is the Gaussian
///   xi(t) = (omega^2 / 2 pi)^(1/4) exp(-omega^2 (t - t0)^2 / 4)
/// whose tail has the closed form w(t) = erfc(omega (t - t0) / sqrt 2) / 2.
/// Any other pulse can be supplied as an (xi, w) pair.
class WavePacket {
 public:
  using AmplitudeFn = std::function<Complex(double)>;
  using TailFn = std::function<double(double)>;

  static constexpr double kDefaultTailCutoff = 1e-12;

  static WavePacket gaussian(double omega, double t0, double epsilon_w = kDefaultTailCutoff);
  static WavePacket gaussian(const GaussianPulse& p, double epsilon_w = kDefaultTailCutoff) {
    return gaussian(p.omega, p.t0, epsilon_w);
  }
  static WavePacket custom(AmplitudeFn xi, TailFn w, double epsilon_w = kDefaultTailCutoff);
  /// xi == 0 everywhere: the input field is vacuum.
  static WavePacket vacuum();

  Complex xi(double t) const { return xi_(t); }
  double w_tail(double t) const { return w_(t); }

  /// lambda(t) = xi(t) / sqrt(w(t)), the ancilla coupling that emits this
  /// pulse; 0 once w(t) < epsilon_w (the source is exhausted). Defined for
  /// real-valued pulses only; throws std::domain_error otherwise.
  double lambda_coupling(double t) const;

  double epsilon_w() const { return epsilon_w_; }
  const std::optional<GaussianPulse>& gaussian_params() const { return gaussian_; }

 private:
  WavePacket(AmplitudeFn xi, TailFn w, double epsilon_w, std::optional<GaussianPulse> g);

  AmplitudeFn xi_;
  TailFn w_;
  double epsilon_w_;
  std::optional<GaussianPulse> gaussian_;
};

}  // namespace qfilter
