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

#include <span>
#include <string>
#include <string_view>

#include "qfilter/operator_algebra.hpp"
#include "qfilter/slh_network.hpp"
#include "qfilter/wavepacket.hpp"

namespace qfilter {

/// Measurement layout behind the beam splitter.
enum class Scheme {
  HdPc,  // homodyne on output 1, photon counting on output 2
  HdHd,  // homodyne on both outputs
};

std::string_view to_string(Scheme s);
/// Accepts "hd-pc" / "hd-hd". Throws std::invalid_argument otherwise.
Scheme parse_scheme(std::string_view s);

/// The four conditional matrices rho^{jk}, j,k in {0,1}. rho11 is the
/// physical conditional state; the others carry the photon's coherence with
/// the vacuum branch. Conditional expectations read pi^{jk}(X) = Tr[(rho^{jk})^dag X].
struct HierarchyState {
  Operator rho00;
  Operator rho01;
  Operator rho10;
  Operator rho11;

  /// rho11 = rho00 = |eta><eta|, rho01 = rho10 = 0. eta must be normalized to 1e-10.
  static HierarchyState initial(std::span<const Complex> eta);

  std::size_t dim() const { return rho11.dim(); }

  HierarchyState& operator+=(const HierarchyState& o);
  HierarchyState& operator*=(Complex s);
  friend HierarchyState operator+(HierarchyState a, const HierarchyState& b) { return a += b; }
  friend HierarchyState operator*(Complex s, HierarchyState a) { return a *= s; }
};

/// Largest of |Tr rho11 - 1|, the Hermiticity defects of rho11 and rho00,
/// and ||rho10 - rho01^dag||.
struct HierarchyDefects {
  double trace = 0.0;
  double hermiticity = 0.0;
  double coherence = 0.0;
};
HierarchyDefects measure_defects(const HierarchyState& st);

/// Hermitize rho11 and rho00, clip any negative eigenvalues of either to
/// zero, reset rho10 := rho01^dag and rescale all four matrices by
/// 1 / Tr rho11. Returns true when an eigenvalue had to be clipped.
///
/// The clipping matters when the conditional state comes close to a pure
/// state: the Euler step can then land just outside the state space, and
/// from there the nonlinear gain pushes it further out.
bool apply_hygiene(HierarchyState& st);

/// Per-step measurement noise. For HdPc, dw1 drives the homodyne channel
/// and `jump` marks a detector click in the step; for HdHd dw1/dw2 drive the
/// two homodyne channels.
struct NoiseIncrement {
  double dw1 = 0.0;
  double dw2 = 0.0;
  bool jump = false;
};

/// Everything the coefficient maps need: the single-channel system, the
/// input pulse, the beam splitter and the measurement scheme.
///
/// `discard_channel2` builds the single-measurement filter that ignores the
/// second detector (its update term is dropped; the first channel keeps its
/// reduced sqrt(1 - r^2) efficiency). Used to compare against the joint filter.
class FilterContext {
 public:
  static constexpr double kNuGuard = 1e-12;       // epsilon_nu
  static constexpr double kParityTolerance = 1e-8;  // |Im K|, |Re K2|, |Im nu|
  /// nu is a squared amplitude that touches zero when the atom's emission
  /// cancels the pulse in the reflected port. The Euler step overshoots it
  /// by O(sqrt(dt)); values in (-kNuNegativeTolerance, 0) are read as 0 and
  /// anything lower is treated as a broken state.
  static constexpr double kNuNegativeTolerance = 0.25;

  FilterContext(SlhModel system, WavePacket wp, BeamSplitterParams bs, Scheme scheme,
                bool discard_channel2 = false);

  const SlhModel& system() const { return system_; }
  const WavePacket& wavepacket() const { return wp_; }
  const BeamSplitterParams& beam_splitter() const { return bs_; }
  Scheme scheme() const { return scheme_; }
  bool discard_channel2() const { return discard_channel2_; }
  std::size_t dim() const { return system_.dim(); }

  /// Channel weights: sqrt(1 - r^2) for output 1, r for output 2.
  double transmission() const { return transmission_; }
  double reflection() const { return bs_.r; }

  // Cached operator products used on every step.
  struct Cache {
    Matrix s, s_dag, l, l_dag, l_dag_l, l_dag_s, s_dag_l, h;
    Complex phase;  // e^{i theta}
  };
  const Cache& cache() const { return cache_; }

 private:
  SlhModel system_;
  WavePacket wp_;
  BeamSplitterParams bs_;
  Scheme scheme_;
  bool discard_channel2_;
  double transmission_;
  Cache cache_;
};

/// Homodyne gain K_t (channel 1 for both schemes). Real when the hierarchy
/// invariants hold; throws InvariantViolation if |Im K| > 1e-8.
double k_gain(const FilterContext& ctx, const HierarchyState& st, double t);

/// Photon-counting intensity nu_t; output 2 clicks at rate r^2 nu_t.
/// Values in [-1e-8, 0) are clamped to 0; below -1e-8 throws InvariantViolation.
double nu_intensity(const FilterContext& ctx, const HierarchyState& st, double t);
/// The same value before clamping at zero (still rejects gross negativity).
double nu_intensity_raw(const FilterContext& ctx, const HierarchyState& st, double t);

/// Gains of the two homodyne channels. K1 is real; K2 is purely imaginary
/// so that i r K2 (the mean of the second record increment) is real.
struct HomodyneGains {
  double k1 = 0.0;
  Complex k2;
};
HomodyneGains k1_k2_gains(const FilterContext& ctx, const HierarchyState& st, double t);

/// Increment d rho^{jk} of the homodyne + photon-counting filter over
/// [t, t + dt]. The click term uses the compensated dN = jump - r^2 nu dt.
/// Throws IllConditionedJump for a click while nu < kNuGuard.
HierarchyState hdpc_delta(const FilterContext& ctx, const HierarchyState& st, double t, double dt, double dw,
                          bool jump);
HierarchyState hdpc_increment(const FilterContext& ctx, const HierarchyState& st, double t, double dt,
                              double dw, bool jump);

/// Increment d rho^{jk} of the two-homodyne filter over [t, t + dt].
HierarchyState hdhd_delta(const FilterContext& ctx, const HierarchyState& st, double t, double dt, double dw1,
                          double dw2);
HierarchyState hdhd_increment(const FilterContext& ctx, const HierarchyState& st, double t, double dt,
                              double dw1, double dw2);

/// Dispatches on ctx.scheme().
HierarchyState filter_delta(const FilterContext& ctx, const HierarchyState& st, double t, double dt,
                            const NoiseIncrement& noise);

/// The dt-coefficient shared by both schemes: the noise-averaged (master)
/// hierarchy generator.
HierarchyState master_drift(const FilterContext& ctx, const HierarchyState& st, double t);

/// Tr[rho11 X] restricted to its real part; for Hermitian X this is the
/// conditional expectation.
double expectation(const HierarchyState& st, const Operator& x);

std::string describe(const HierarchyState& st);

}  // namespace qfilter
