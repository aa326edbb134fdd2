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

// Test oracle: the filter increment of Tr[(rho^{jk})^dag X] computed from the
// Heisenberg-picture equations for the conditional expectations. It shares
// no code with the Schrodinger-picture filter, so agreement of the two is a
// check on both.

#pragma once

#include <cmath>

#include "qfilter/sme_filters.hpp"
#include "qfilter/superoperators.hpp"

namespace qfilter::testing {

struct ExpectationIncrements {
  Complex d11;
  Complex d10;
  Complex d01;
  Complex d00;
};

namespace detail {

struct Pi {
  const HierarchyState& st;
  Complex p11(const Operator& y) const { return trace_product(st.rho11.adjoint(), y); }
  Complex p10(const Operator& y) const { return trace_product(st.rho10.adjoint(), y); }
  Complex p01(const Operator& y) const { return trace_product(st.rho01.adjoint(), y); }
  Complex p00(const Operator& y) const { return trace_product(st.rho00.adjoint(), y); }
};

}  // namespace detail

inline ExpectationIncrements heisenberg_increment_oracle(const FilterContext& ctx, const HierarchyState& pi_weights,
                                                         const Operator& x, double t, double dt,
                                                         const NoiseIncrement& noise) {
  const detail::Pi pi{pi_weights};
  const SlhModel& g = ctx.system();
  const Operator& s = g.s(0, 0);
  const Operator& l = g.l(0);
  const Operator sd = s.adjoint();
  const Operator ld = l.adjoint();
  const Operator id = Operator::identity(ctx.dim());

  const Complex xi = ctx.wavepacket().xi(t);
  const Complex xic = std::conj(xi);
  const double xi2 = std::norm(xi);
  const Complex e = std::exp(kI * ctx.beam_splitter().theta);
  const Complex ec = std::conj(e);
  const double r = ctx.reflection();
  const double eta = std::sqrt(1.0 - r * r);
  const bool use_second = !ctx.discard_channel2();

  const Operator lgx = lindbladian(g, x);
  const Operator x_l = x * l;
  const Operator ld_x = ld * x;
  const Operator sd_x = sd * x;
  const Operator x_s = x * s;
  const Operator sd_comm = sd * commutator(x, l);   // S^dag [X, L]
  const Operator comm_s = commutator(ld, x) * s;    // [L^dag, X] S
  const Operator scatter = sd * x * s - x;           // S^dag X S - X

  const Complex k1 = e * pi.p11(l) + ec * pi.p11(ld) + ec * pi.p01(sd) * xic + e * pi.p10(s) * xi;

  ExpectationIncrements d;
  d.d11 = (pi.p11(lgx) + pi.p01(sd_comm) * xic + pi.p10(comm_s) * xi + pi.p00(scatter) * xi2) * dt;
  d.d10 = (pi.p10(lgx) + pi.p00(sd_comm) * xic) * dt;
  d.d01 = (pi.p01(lgx) + pi.p00(comm_s) * xi) * dt;
  d.d00 = pi.p00(lgx) * dt;

  const Complex w1 = eta * noise.dw1;
  d.d11 += w1 * (e * pi.p11(x_l) + ec * pi.p11(ld_x) + ec * pi.p01(sd_x) * xic + e * pi.p10(x_s) * xi -
                 pi.p11(x) * k1);
  d.d10 += w1 * (e * pi.p10(x_l) + ec * pi.p10(ld_x) + ec * pi.p00(sd_x) * xic - pi.p10(x) * k1);
  d.d01 += w1 * (e * pi.p01(x_l) + ec * pi.p01(ld_x) + e * pi.p00(x_s) * xi - pi.p01(x) * k1);
  d.d00 += w1 * (e * pi.p00(x_l) + ec * pi.p00(ld_x) - pi.p00(x) * k1);

  if (!use_second || r == 0.0) return d;

  if (ctx.scheme() == Scheme::HdHd) {
    const Complex k2 = e * pi.p11(l) - ec * pi.p11(ld) - ec * pi.p01(sd) * xic + e * pi.p10(s) * xi;
    const Complex w2 = kI * r * noise.dw2;
    d.d11 += w2 * (e * pi.p11(x_l) - ec * pi.p11(ld_x) - ec * pi.p01(sd_x) * xic + e * pi.p10(x_s) * xi -
                   pi.p11(x) * k2);
    d.d10 += w2 * (e * pi.p10(x_l) - ec * pi.p10(ld_x) - ec * pi.p00(sd_x) * xic - pi.p10(x) * k2);
    d.d01 += w2 * (e * pi.p01(x_l) - ec * pi.p01(ld_x) + e * pi.p00(x_s) * xi - pi.p01(x) * k2);
    d.d00 += w2 * (e * pi.p00(x_l) - ec * pi.p00(ld_x) - pi.p00(x) * k2);
    return d;
  }

  const Complex nu = pi.p11(ld * l) + pi.p01(sd * l) * xic + pi.p10(ld * s) * xi + pi.p00(id) * xi2;
  const Complex dn = (noise.jump ? 1.0 : 0.0) - r * r * nu * dt;
  const Complex inv_nu = 1.0 / nu;
  const Operator ld_x_l = ld * x * l;
  const Operator sd_x_l = sd * x * l;
  const Operator ld_x_s = ld * x * s;
  const Operator sd_x_s = sd * x * s;
  d.d11 += (inv_nu * (pi.p11(ld_x_l) + pi.p01(sd_x_l) * xic + pi.p10(ld_x_s) * xi + pi.p00(sd_x_s) * xi2) -
            pi.p11(x)) *
           dn;
  d.d10 += (inv_nu * (pi.p10(ld_x_l) + pi.p00(sd_x_l) * xic) - pi.p10(x)) * dn;
  d.d01 += (inv_nu * (pi.p01(ld_x_l) + pi.p00(ld_x_s) * xi) - pi.p01(x)) * dn;
  d.d00 += (inv_nu * pi.p00(ld_x_l) - pi.p00(x)) * dn;
  return d;
}

}  // namespace qfilter::testing
