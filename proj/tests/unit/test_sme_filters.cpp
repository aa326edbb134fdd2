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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "heisenberg_oracle.hpp"
#include "qfilter/errors.hpp"
#include "qfilter/noise_stream.hpp"
#include "qfilter/sme_filters.hpp"
#include "test_support.hpp"

using namespace qfilter;
using namespace qfilter::testing;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double state_diff(const HierarchyState& a, const HierarchyState& b) {
  return std::max({max_abs_diff(a.rho00, b.rho00), max_abs_diff(a.rho01, b.rho01), max_abs_diff(a.rho10, b.rho10),
                   max_abs_diff(a.rho11, b.rho11)});
}

HierarchyState single_state(const Operator& rho) { return HierarchyState{rho, Operator::zero(rho.dim()), Operator::zero(rho.dim()), rho}; }

// Straight transcription of the two filters, one product at a time.
struct Transcription {
  Operator s, l, h, sd, ld;
  Complex xi, e;
  double r, eta;

  Transcription(const FilterContext& ctx, double t)
      : s(ctx.system().s(0, 0)),
        l(ctx.system().l(0)),
        h(ctx.system().h()),
        sd(s.adjoint()),
        ld(l.adjoint()),
        xi(ctx.wavepacket().xi(t)),
        e(std::exp(Complex(0.0, ctx.beam_splitter().theta))),
        r(ctx.beam_splitter().r),
        eta(std::sqrt(1.0 - r * r)) {}

  Operator lstar(const Operator& rho) const {
    return Complex(0.0, -1.0) * commutator(h, rho) + l * rho * ld -
           Complex(0.5) * (ld * l * rho + rho * ld * l);
  }

  HierarchyState drift(const HierarchyState& p) const {
    const Complex xc = std::conj(xi);
    HierarchyState d = p;
    d.rho11 = lstar(p.rho11) + xi * commutator(s * p.rho01, ld) + xc * commutator(l, p.rho10 * sd) +
              std::norm(xi) * (s * p.rho00 * sd - p.rho00);
    d.rho10 = lstar(p.rho10) + xi * commutator(s * p.rho00, ld);
    d.rho01 = lstar(p.rho01) + xc * commutator(l, p.rho00 * sd);
    d.rho00 = lstar(p.rho00);
    return d;
  }

  Complex k1(const HierarchyState& p) const {
    return std::conj(e) * (ld * p.rho11).trace() + e * (l * p.rho11).trace() + e * xi * (s * p.rho01).trace() +
           std::conj(e) * std::conj(xi) * (sd * p.rho10).trace();
  }
  Complex k2(const HierarchyState& p) const {
    return e * (l * p.rho11).trace() - std::conj(e) * (ld * p.rho11).trace() + e * xi * (s * p.rho01).trace() -
           std::conj(e) * std::conj(xi) * (sd * p.rho10).trace();
  }
  Complex nu(const HierarchyState& p) const {
    return (ld * l * p.rho11).trace() + xi * (ld * s * p.rho01).trace() +
           std::conj(xi) * (sd * l * p.rho10).trace() + std::norm(xi) * p.rho00.trace();
  }

  HierarchyState channel1(const HierarchyState& p) const {
    const Complex ec = std::conj(e), xc = std::conj(xi);
    const Complex k = k1(p);
    HierarchyState c = p;
    c.rho11 = ec * p.rho11 * ld + e * l * p.rho11 + e * xi * s * p.rho01 + ec * xc * p.rho10 * sd - k * p.rho11;
    c.rho10 = ec * p.rho10 * ld + e * l * p.rho10 + e * xi * s * p.rho00 - k * p.rho10;
    c.rho01 = ec * p.rho01 * ld + e * l * p.rho01 + ec * xc * p.rho00 * sd - k * p.rho01;
    c.rho00 = ec * p.rho00 * ld + e * l * p.rho00 - k * p.rho00;
    return c;
  }

  HierarchyState channel2(const HierarchyState& p) const {
    const Complex ec = std::conj(e), xc = std::conj(xi);
    const Complex k = k2(p);
    HierarchyState c = p;
    c.rho11 = ec * p.rho11 * ld - e * l * p.rho11 - e * xi * s * p.rho01 + ec * xc * p.rho10 * sd + k * p.rho11;
    c.rho10 = ec * p.rho10 * ld - e * l * p.rho10 - e * xi * s * p.rho00 + k * p.rho10;
    c.rho01 = ec * p.rho01 * ld - e * l * p.rho01 + ec * xc * p.rho00 * sd + k * p.rho01;
    c.rho00 = ec * p.rho00 * ld - e * l * p.rho00 + k * p.rho00;
    return c;
  }

  HierarchyState jump_map(const HierarchyState& p) const {
    const Complex xc = std::conj(xi);
    HierarchyState j = p;
    j.rho11 = l * p.rho11 * ld + xi * s * p.rho01 * ld + xc * l * p.rho10 * sd + std::norm(xi) * s * p.rho00 * sd;
    j.rho10 = l * p.rho10 * ld + xi * s * p.rho00 * ld;
    j.rho01 = l * p.rho01 * ld + xc * l * p.rho00 * sd;
    j.rho00 = l * p.rho00 * ld;
    return j;
  }

  HierarchyState hdhd(const HierarchyState& p, double dt, double dw1, double dw2) const {
    HierarchyState out = Complex(dt) * drift(p);
    out += Complex(eta * dw1) * channel1(p);
    out += Complex(0.0, -r * dw2) * channel2(p);
    return out;
  }

  HierarchyState hdpc(const HierarchyState& p, double dt, double dw1, bool click) const {
    HierarchyState out = Complex(dt) * drift(p);
    out += Complex(eta * dw1) * channel1(p);
    const Complex n = nu(p);
    HierarchyState jump_minus = Complex(1.0) / n * jump_map(p);
    jump_minus += Complex(-1.0) * p;
    const Complex dn = (click ? 1.0 : 0.0) - r * r * n * dt;
    out += dn * jump_minus;
    return out;
  }
};

FilterContext atom_context(Scheme scheme, double r, double theta, WavePacket wp = WavePacket::vacuum()) {
  return FilterContext(two_level_atom(), std::move(wp), {r, theta}, scheme);
}

}  // namespace

TEST_CASE("scheme names") {
  CHECK(parse_scheme("hd-pc") == Scheme::HdPc);
  CHECK(parse_scheme("hd-hd") == Scheme::HdHd);
  CHECK(to_string(Scheme::HdHd) == "hd-hd");
  CHECK_THROWS_AS(parse_scheme("pc-pc"), std::invalid_argument);
}

TEST_CASE("initial hierarchy") {
  const auto st = HierarchyState::initial(ground_state());
  CHECK(max_abs_diff(st.rho11, qubit::ground_projector()) == 0.0);
  CHECK(max_abs_diff(st.rho00, qubit::ground_projector()) == 0.0);
  CHECK(st.rho01.max_abs() == 0.0);
  const std::vector<Complex> bad{1.0, 1.0};
  CHECK_THROWS_AS(HierarchyState::initial(bad), std::invalid_argument);
}

TEST_CASE("homodyne gain examples") {
  const double s = std::sqrt(0.5);
  const auto plus = single_state(Operator::projector(std::vector<Complex>{s, s}));
  const auto plus_i = single_state(Operator::projector(std::vector<Complex>{s, Complex(0.0, s)}));
  SUBCASE("energy eigenstates give no signal") {
    const auto ctx = atom_context(Scheme::HdHd, 0.5, 0.0);
    CHECK(k_gain(ctx, HierarchyState::initial(excited_state()), 0.0) == 0.0);
    CHECK(k_gain(ctx, HierarchyState::initial(ground_state()), 0.0) == 0.0);
  }
  SUBCASE("equal superposition, in-phase local oscillator") {
    const auto ctx = atom_context(Scheme::HdHd, 0.5, 0.0);
    CHECK(k_gain(ctx, plus, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    const auto g = k1_k2_gains(ctx, plus, 0.0);
    CHECK(std::abs(g.k2) <= 1e-15);
  }
  SUBCASE("quadrature local oscillator moves the signal to K2") {
    const auto ctx = atom_context(Scheme::HdHd, 0.5, kHalfPi);
    const auto g = k1_k2_gains(ctx, plus, 0.0);
    CHECK(std::abs(g.k1) <= 1e-15);
    CHECK(std::abs(g.k2 - Complex(0.0, 1.0)) <= 1e-15);
  }
  SUBCASE("phased superposition") {
    const auto ctx = atom_context(Scheme::HdHd, 0.5, 0.0);
    const auto g = k1_k2_gains(ctx, plus_i, 0.0);
    CHECK(std::abs(g.k1) <= 1e-15);
    CHECK(std::abs(g.k2 - Complex(0.0, -1.0)) <= 1e-15);
  }
}

TEST_CASE("click intensity examples") {
  SUBCASE("excited atom, vacuum input") {
    const auto ctx = atom_context(Scheme::HdPc, 0.5, 0.0);
    CHECK(nu_intensity(ctx, HierarchyState::initial(excited_state()), 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("ground atom sees only the incoming photon flux") {
    const auto ctx = atom_context(Scheme::HdPc, 0.5, 0.0, constant_pulse(Complex(0.3, 0.4)));
    CHECK(nu_intensity(ctx, HierarchyState::initial(ground_state()), 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("a small overshoot below zero is clamped") {
    auto st = HierarchyState::initial(ground_state());
    st.rho11 = st.rho11 + Complex(-0.01) * qubit::excited_projector();
    const auto ctx = atom_context(Scheme::HdPc, 0.5, 0.0);
    CHECK(nu_intensity_raw(ctx, st, 0.0) == doctest::Approx(-0.01));
    CHECK(nu_intensity(ctx, st, 0.0) == 0.0);
  }
  SUBCASE("rejects a grossly negative intensity") {
    auto st = HierarchyState::initial(excited_state());
    st.rho11 = Complex(-1.0) * st.rho11;
    const auto ctx = atom_context(Scheme::HdPc, 0.5, 0.0);
    CHECK_THROWS_AS(nu_intensity(ctx, st, 0.0), InvariantViolation);
  }
}

TEST_CASE("one step matches a direct transcription") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const std::size_t d = 2 + static_cast<std::size_t>(i % 3);
    const BeamSplitterParams bs{u(rng), 2.0 * std::numbers::pi * u(rng)};
    const Complex xi(u(rng) - 0.5, u(rng) - 0.5);
    const SlhModel g = random_single_channel(rng, d);
    const HierarchyState st = random_hierarchy(rng, d);
    const double dt = 1e-3;
    const double dw1 = 0.01, dw2 = -0.013;

    const FilterContext hd(g, constant_pulse(xi), bs, Scheme::HdHd);
    const Transcription tr(hd, 0.3);
    CHECK(state_diff(hdhd_delta(hd, st, 0.3, dt, dw1, dw2), tr.hdhd(st, dt, dw1, dw2)) <= 1e-12);

    const FilterContext pc(g, constant_pulse(xi), bs, Scheme::HdPc);
    CHECK(state_diff(hdpc_delta(pc, st, 0.3, dt, dw1, false), tr.hdpc(st, dt, dw1, false)) <= 1e-12);
    CHECK(state_diff(hdpc_delta(pc, st, 0.3, dt, dw1, true), tr.hdpc(st, dt, dw1, true)) <= 1e-11);

    CHECK(std::abs(k_gain(hd, st, 0.3) - tr.k1(st).real()) <= 1e-12);
    CHECK(std::abs(k1_k2_gains(hd, st, 0.3).k2 - tr.k2(st)) <= 1e-12);
    CHECK(std::abs(nu_intensity(pc, st, 0.3) - tr.nu(st).real()) <= 1e-12);
  }
}

TEST_CASE("Schrodinger and Heisenberg pictures agree") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Scheme scheme : {Scheme::HdPc, Scheme::HdHd}) {
    for (int i = 0; i < 100; ++i) {
      const std::size_t d = 2 + static_cast<std::size_t>(i % 3);
      const BeamSplitterParams bs{u(rng), 2.0 * std::numbers::pi * u(rng)};
      const Complex xi(u(rng) - 0.5, u(rng) - 0.5);
      const FilterContext ctx(random_single_channel(rng, d), constant_pulse(xi), bs, scheme);
      const HierarchyState st = random_hierarchy(rng, d);
      const Operator x = random_operator(rng, d);
      const double dt = 1e-3;
      NoiseIncrement inc{std::sqrt(dt) * n(rng), std::sqrt(dt) * n(rng), scheme == Scheme::HdPc && (i % 2 == 1)};

      const HierarchyState delta = filter_delta(ctx, st, 0.7, dt, inc);
      const ExpectationIncrements ref = heisenberg_increment_oracle(ctx, st, x, 0.7, dt, inc);
      const double scale = 1e-10 * std::max(1.0, x.max_abs());
      CHECK(std::abs(trace_product(delta.rho11.adjoint(), x) - ref.d11) <= scale);
      CHECK(std::abs(trace_product(delta.rho10.adjoint(), x) - ref.d10) <= scale);
      CHECK(std::abs(trace_product(delta.rho01.adjoint(), x) - ref.d01) <= scale);
      CHECK(std::abs(trace_product(delta.rho00.adjoint(), x) - ref.d00) <= scale);
    }
  }
}

TEST_CASE("vacuum input keeps the hierarchy degenerate") {
  for (Scheme scheme : {Scheme::HdPc, Scheme::HdHd}) {
    const FilterContext ctx = atom_context(scheme, std::sqrt(0.5), 0.3);
    const double s = std::sqrt(0.5);
    HierarchyState st = HierarchyState::initial(std::vector<Complex>{s, s});
    const NoiseStream noise(3, 0);
    const double dt = 1e-3;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      NoiseIncrement inc;
      inc.dw1 = std::sqrt(dt) * noise.gaussian(NoiseStream::Channel::Homodyne1, k);
      inc.dw2 = std::sqrt(dt) * noise.gaussian(NoiseStream::Channel::Homodyne2, k);
      inc.jump = scheme == Scheme::HdPc && k == 400;
      st += filter_delta(ctx, st, 0.0, dt, inc);
    }
    CHECK(st.rho01.max_abs() == 0.0);
    CHECK(st.rho10.max_abs() == 0.0);
    CHECK(max_abs_diff(st.rho11, st.rho00) <= 1e-12);
  }
}

TEST_CASE("unused outputs leave no trace in the update") {
  std::mt19937_64 rng(23);
  const HierarchyState st = random_hierarchy(rng, 2);
  const WavePacket wp = constant_pulse(Complex(0.2, -0.1));
  SUBCASE("fully transmitting splitter ignores channel 2") {
    const FilterContext hd(two_level_atom(), wp, {0.0, 0.4}, Scheme::HdHd);
    CHECK(state_diff(hdhd_delta(hd, st, 0.0, 1e-3, 0.02, 0.5), hdhd_delta(hd, st, 0.0, 1e-3, 0.02, -0.9)) == 0.0);
    const FilterContext pc(two_level_atom(), wp, {0.0, 0.4}, Scheme::HdPc);
    CHECK(state_diff(hdpc_delta(pc, st, 0.0, 1e-3, 0.02, false), hdhd_delta(hd, st, 0.0, 1e-3, 0.02, 0.0)) == 0.0);
    CHECK_THROWS_AS(hdpc_delta(pc, st, 0.0, 1e-3, 0.02, true), IllConditionedJump);
  }
  SUBCASE("fully reflecting splitter ignores channel 1") {
    const FilterContext hd(two_level_atom(), wp, {1.0, 0.4}, Scheme::HdHd);
    CHECK(state_diff(hdhd_delta(hd, st, 0.0, 1e-3, 0.3, 0.02), hdhd_delta(hd, st, 0.0, 1e-3, -0.7, 0.02)) == 0.0);
    const FilterContext pc(two_level_atom(), wp, {1.0, 0.4}, Scheme::HdPc);
    CHECK(state_diff(hdpc_delta(pc, st, 0.0, 1e-3, 0.3, true), hdpc_delta(pc, st, 0.0, 1e-3, -0.7, true)) == 0.0);
  }
}

TEST_CASE("a click with no intensity is refused") {
  const FilterContext ctx = atom_context(Scheme::HdPc, 0.5, 0.0);
  CHECK_THROWS_AS(hdpc_delta(ctx, HierarchyState::initial(ground_state()), 0.0, 1e-3, 0.0, true),
                  IllConditionedJump);
}

TEST_CASE("trace of rho11 is conserved without hygiene") {
  const WavePacket wp = WavePacket::gaussian(1.46, 4.0);
  for (Scheme scheme : {Scheme::HdPc, Scheme::HdHd}) {
    const FilterContext ctx(two_level_atom(), wp, {std::sqrt(0.5), 0.0}, scheme);
    HierarchyState st = HierarchyState::initial(ground_state());
    const NoiseStream noise(7, 1);
    const double dt = 1e-3;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 10000; ++k) {
      const double t = static_cast<double>(k) * dt;
      NoiseIncrement inc;
      inc.dw1 = std::sqrt(dt) * noise.gaussian(NoiseStream::Channel::Homodyne1, k);
      inc.dw2 = std::sqrt(dt) * noise.gaussian(NoiseStream::Channel::Homodyne2, k);
      if (scheme == Scheme::HdPc) {
        const double p = 0.5 * nu_intensity(ctx, st, t) * dt;
        inc.jump = noise.uniform(NoiseStream::Channel::Counting, k) < p;
      }
      st += filter_delta(ctx, st, t, dt, inc);
      worst = std::max(worst, std::abs(st.rho11.trace().real() - 1.0));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("hygiene restores the structural invariants") {
  std::mt19937_64 rng(24);
  HierarchyState st = random_hierarchy(rng, 3);
  st.rho11 += Complex(1e-6) * random_operator(rng, 3);
  st.rho10 += Complex(1e-6) * random_operator(rng, 3);
  apply_hygiene(st);
  const HierarchyDefects d = measure_defects(st);
  CHECK(d.trace <= 1e-15);
  CHECK(d.hermiticity == 0.0);
  CHECK(d.coherence == 0.0);
}

TEST_CASE("hygiene projects a state that left the positive cone") {
  HierarchyState st = HierarchyState::initial(excited_state());
  st.rho11 = Operator{{1.05, 0.1}, {0.1, -0.05}};
  CHECK(apply_hygiene(st));
  Eigen::SelfAdjointEigenSolver<Matrix> es(st.rho11.matrix());
  CHECK(es.eigenvalues().minCoeff() >= -1e-15);
  CHECK(std::abs(st.rho11.trace() - 1.0) <= 1e-15);
  CHECK(st.rho11(0, 0).real() <= 1.0 + 1e-15);
  CHECK_FALSE(apply_hygiene(st));
}
