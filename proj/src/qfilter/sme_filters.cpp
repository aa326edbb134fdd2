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

#include "qfilter/sme_filters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qfilter/errors.hpp"

namespace qfilter {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::HdPc:
      return "hd-pc";
    case Scheme::HdHd:
      return "hd-hd";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "hd-pc") return Scheme::HdPc;
  if (s == "hd-hd") return Scheme::HdHd;
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "' (expected hd-pc or hd-hd)");
}

HierarchyState HierarchyState::initial(std::span<const Complex> eta) {
  if (eta.empty()) {
    throw std::invalid_argument("initial state: eta must not be empty");
  }
  double norm2 = 0.0;
  for (const auto& c : eta) norm2 += std::norm(c);
  if (std::abs(norm2 - 1.0) > 1e-10) {
    throw std::invalid_argument("initial state: eta is not normalized (|eta|^2 = " + std::to_string(norm2) + ")");
  }
  const Operator p = Operator::projector(eta);
  const Operator z = Operator::zero(eta.size());
  return HierarchyState{p, z, z, p};
}

HierarchyState& HierarchyState::operator+=(const HierarchyState& o) {
  rho00 += o.rho00;
  rho01 += o.rho01;
  rho10 += o.rho10;
  rho11 += o.rho11;
  return *this;
}

HierarchyState& HierarchyState::operator*=(Complex s) {
  rho00 *= s;
  rho01 *= s;
  rho10 *= s;
  rho11 *= s;
  return *this;
}

HierarchyDefects measure_defects(const HierarchyState& st) {
  HierarchyDefects d;
  d.trace = std::abs(st.rho11.trace() - 1.0);
  d.hermiticity = std::max(max_abs_diff(st.rho11, st.rho11.adjoint()), max_abs_diff(st.rho00, st.rho00.adjoint()));
  d.coherence = max_abs_diff(st.rho10, st.rho01.adjoint());
  return d;
}

namespace {

// Replaces a Hermitian matrix by its projection onto the positive cone when
// it has an eigenvalue below rounding level.
bool clip_negative(Operator& rho) {
  constexpr double kRounding = 1e-13;
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() >= -kRounding * std::max(1.0, ev.cwiseAbs().maxCoeff())) return false;
  const Eigen::VectorXd kept = ev.cwiseMax(0.0);
  rho = Operator(Matrix(es.eigenvectors() * kept.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint()));
  return true;
}

}  // namespace

bool apply_hygiene(HierarchyState& st) {
  st.rho11 = Complex(0.5) * (st.rho11 + st.rho11.adjoint());
  st.rho00 = Complex(0.5) * (st.rho00 + st.rho00.adjoint());
  const bool clipped_11 = clip_negative(st.rho11);
  const bool clipped_00 = clip_negative(st.rho00);
  st.rho10 = st.rho01.adjoint();
  const double tr = st.rho11.trace().real();
  if (tr > 0.0 && std::isfinite(tr)) {
    st *= Complex(1.0 / tr);
  }
  return clipped_11 || clipped_00;
}

FilterContext::FilterContext(SlhModel system, WavePacket wp, BeamSplitterParams bs, Scheme scheme,
                             bool discard_channel2)
    : system_(std::move(system)),
      wp_(std::move(wp)),
      bs_(bs),
      scheme_(scheme),
      discard_channel2_(discard_channel2),
      transmission_(0.0) {
  if (system_.n_channels() != 1) {
    throw std::invalid_argument("FilterContext: the system must have a single channel");
  }
  validate(bs_);
  transmission_ = std::sqrt(1.0 - bs_.r * bs_.r);
  const Matrix& s = system_.s(0, 0).matrix();
  const Matrix& l = system_.l(0).matrix();
  cache_.s = s;
  cache_.s_dag = s.adjoint();
  cache_.l = l;
  cache_.l_dag = l.adjoint();
  cache_.l_dag_l = cache_.l_dag * l;
  cache_.l_dag_s = cache_.l_dag * s;
  cache_.s_dag_l = cache_.s_dag * l;
  cache_.h = system_.h().matrix();
  cache_.phase = std::exp(kI * bs_.theta);
}

namespace {

Complex tr_prod(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b.transpose()).sum(); }

struct Traces {
  Complex tr_l_rho11;       // Tr[L rho11]
  Complex tr_ldag_rho11;    // Tr[L^dag rho11]
  Complex tr_s_rho01;       // Tr[S rho01]
  Complex tr_sdag_rho10;    // Tr[S^dag rho10]
};

Traces gain_traces(const FilterContext::Cache& c, const HierarchyState& st) {
  return {tr_prod(c.l, st.rho11.matrix()), tr_prod(c.l_dag, st.rho11.matrix()), tr_prod(c.s, st.rho01.matrix()),
          tr_prod(c.s_dag, st.rho10.matrix())};
}

// Both homodyne gains from the same four traces:
//   K  = e^{-i th} Tr[L^dag r11] + e^{i th} Tr[L r11] + e^{i th} xi Tr[S r01] + e^{-i th} xi* Tr[S^dag r10]
//   K2 = e^{i th} Tr[L r11] - e^{-i th} Tr[L^dag r11] + e^{i th} xi Tr[S r01] - e^{-i th} xi* Tr[S^dag r10]
struct RawGains {
  Complex k1;
  Complex k2;
};

RawGains raw_gains(const FilterContext& ctx, const HierarchyState& st, Complex xi) {
  const auto& c = ctx.cache();
  const Traces tr = gain_traces(c, st);
  const Complex e = c.phase;
  const Complex ec = std::conj(e);
  const Complex a = e * tr.tr_l_rho11;
  const Complex b = ec * tr.tr_ldag_rho11;
  const Complex p = e * xi * tr.tr_s_rho01;
  const Complex q = ec * std::conj(xi) * tr.tr_sdag_rho10;
  return {b + a + p + q, a - b + p - q};
}

double checked_k1(Complex k1, double t) {
  if (!std::isfinite(k1.real()) || !std::isfinite(k1.imag())) {
    throw InvariantViolation("homodyne gain K is not finite at t=" + std::to_string(t));
  }
  if (std::abs(k1.imag()) > FilterContext::kParityTolerance) {
    throw InvariantViolation("homodyne gain K has imaginary part " + std::to_string(k1.imag()) +
                             " at t=" + std::to_string(t));
  }
  return k1.real();
}

Complex checked_k2(Complex k2, double t) {
  if (!std::isfinite(k2.real()) || !std::isfinite(k2.imag())) {
    throw InvariantViolation("homodyne gain K2 is not finite at t=" + std::to_string(t));
  }
  if (std::abs(k2.real()) > FilterContext::kParityTolerance) {
    throw InvariantViolation("homodyne gain K2 has real part " + std::to_string(k2.real()) +
                             " at t=" + std::to_string(t));
  }
  return Complex(0.0, k2.imag());
}

double checked_nu_raw(const FilterContext& ctx, const HierarchyState& st, Complex xi, double t) {
  const auto& c = ctx.cache();
  const Complex nu = tr_prod(c.l_dag_l, st.rho11.matrix()) + xi * tr_prod(c.l_dag_s, st.rho01.matrix()) +
                     std::conj(xi) * tr_prod(c.s_dag_l, st.rho10.matrix()) + std::norm(xi) * st.rho00.trace();
  if (!std::isfinite(nu.real())) {
    throw InvariantViolation("jump intensity nu is not finite at t=" + std::to_string(t));
  }
  if (std::abs(nu.imag()) > FilterContext::kParityTolerance) {
    throw InvariantViolation("jump intensity nu has imaginary part " + std::to_string(nu.imag()) +
                             " at t=" + std::to_string(t));
  }
  if (nu.real() < -FilterContext::kNuNegativeTolerance) {
    throw InvariantViolation("jump intensity nu is negative (" + std::to_string(nu.real()) +
                             ") at t=" + std::to_string(t));
  }
  return nu.real();
}

double checked_nu(const FilterContext& ctx, const HierarchyState& st, Complex xi, double t) {
  return std::max(checked_nu_raw(ctx, st, xi, t), 0.0);
}

// Products of each hierarchy matrix with L and S that every coefficient
// below is assembled from.
struct Products {
  Matrix l_r11, r11_ldag, s_r01, r10_sdag;  // rho11 row
  Matrix l_r10, r10_ldag, s_r00;            // rho10 row
  Matrix l_r01, r01_ldag, r00_sdag;         // rho01 row
  Matrix l_r00, r00_ldag;                   // rho00 row
};

Products products(const FilterContext::Cache& c, const HierarchyState& st) {
  const Matrix& r00 = st.rho00.matrix();
  const Matrix& r01 = st.rho01.matrix();
  const Matrix& r10 = st.rho10.matrix();
  const Matrix& r11 = st.rho11.matrix();
  Products p;
  p.l_r11.noalias() = c.l * r11;
  p.r11_ldag.noalias() = r11 * c.l_dag;
  p.s_r01.noalias() = c.s * r01;
  p.r10_sdag.noalias() = r10 * c.s_dag;
  p.l_r10.noalias() = c.l * r10;
  p.r10_ldag.noalias() = r10 * c.l_dag;
  p.s_r00.noalias() = c.s * r00;
  p.l_r01.noalias() = c.l * r01;
  p.r01_ldag.noalias() = r01 * c.l_dag;
  p.r00_sdag.noalias() = r00 * c.s_dag;
  p.l_r00.noalias() = c.l * r00;
  p.r00_ldag.noalias() = r00 * c.l_dag;
  return p;
}

// -i[H, rho] + L rho L^dag - (L^dag L rho + rho L^dag L) / 2, reusing L rho.
Matrix liouvillian_term(const FilterContext::Cache& c, const Matrix& rho, const Matrix& l_rho) {
  Matrix out = Complex(0.0, -1.0) * (c.h * rho - rho * c.h);
  out.noalias() += l_rho * c.l_dag;
  out.noalias() -= 0.5 * (c.l_dag_l * rho);
  out.noalias() -= 0.5 * (rho * c.l_dag_l);
  return out;
}

struct MatrixQuad {
  Matrix m00, m01, m10, m11;
};

MatrixQuad drift_terms(const FilterContext::Cache& c, const HierarchyState& st, const Products& p, Complex xi) {
  const Complex xic = std::conj(xi);
  const Matrix& r00 = st.rho00.matrix();
  MatrixQuad d;
  d.m11 = liouvillian_term(c, st.rho11.matrix(), p.l_r11);
  // [S r01, L^dag] xi + [L, r10 S^dag] xi* + (S r00 S^dag - r00) |xi|^2
  d.m11.noalias() += xi * (p.s_r01 * c.l_dag - c.l_dag * p.s_r01);
  d.m11.noalias() += xic * (c.l * p.r10_sdag - p.r10_sdag * c.l);
  d.m11.noalias() += std::norm(xi) * (p.s_r00 * c.s_dag - r00);
  // [S r00, L^dag] xi
  d.m10 = liouvillian_term(c, st.rho10.matrix(), p.l_r10);
  d.m10.noalias() += xi * (p.s_r00 * c.l_dag - c.l_dag * p.s_r00);
  // [L, r00 S^dag] xi*
  d.m01 = liouvillian_term(c, st.rho01.matrix(), p.l_r01);
  d.m01.noalias() += xic * (c.l * p.r00_sdag - p.r00_sdag * c.l);
  d.m00 = liouvillian_term(c, r00, p.l_r00);
  return d;
}

HierarchyState to_state(MatrixQuad&& q) {
  return HierarchyState{Operator(std::move(q.m00)), Operator(std::move(q.m01)), Operator(std::move(q.m10)),
                        Operator(std::move(q.m11))};
}

// Channel-1 homodyne coefficient (multiplies sqrt(1 - r^2) dW1):
//   e^{-i th} r L^dag + e^{i th} L r + cross terms - K r
// Channel-2 homodyne coefficient (multiplies -i r dW2):
//   e^{-i th} r L^dag - e^{i th} L r + cross terms + K2 r
// The cross terms of rho11 are e^{i th} xi S r01 and e^{-i th} xi* r10 S^dag;
// rho10 carries e^{i th} xi S r00 and rho01 carries e^{-i th} xi* r00 S^dag.
void add_homodyne(MatrixQuad& acc, const HierarchyState& st, const Products& p, Complex phase, Complex xi,
                  Complex gain, bool second_channel, Complex weight) {
  const Complex ec = std::conj(phase);
  const Complex sign = second_channel ? Complex(-1.0) : Complex(1.0);
  const Complex g = second_channel ? gain : -gain;
  const Complex xp = phase * xi;
  const Complex xm = ec * std::conj(xi);

  acc.m11.noalias() += weight * (ec * p.r11_ldag + sign * phase * p.l_r11 + sign * xp * p.s_r01 + xm * p.r10_sdag +
                                 g * st.rho11.matrix());
  acc.m10.noalias() +=
      weight * (ec * p.r10_ldag + sign * phase * p.l_r10 + sign * xp * p.s_r00 + g * st.rho10.matrix());
  acc.m01.noalias() += weight * (ec * p.r01_ldag + sign * phase * p.l_r01 + xm * p.r00_sdag + g * st.rho01.matrix());
  acc.m00.noalias() += weight * (ec * p.r00_ldag + sign * phase * p.l_r00 + g * st.rho00.matrix());
}

// Unnormalized post-click states J^{jk} (the jump map is J / nu).
MatrixQuad jump_terms(const FilterContext::Cache& c, const Products& p, Complex xi) {
  const Complex xic = std::conj(xi);
  MatrixQuad j;
  j.m11 = p.l_r11 * c.l_dag;
  j.m11.noalias() += xi * (p.s_r01 * c.l_dag);
  j.m11.noalias() += xic * (c.l * p.r10_sdag);
  j.m11.noalias() += std::norm(xi) * (p.s_r00 * c.s_dag);
  j.m10 = p.l_r10 * c.l_dag;
  j.m10.noalias() += xi * (p.s_r00 * c.l_dag);
  j.m01 = p.l_r01 * c.l_dag;
  j.m01.noalias() += xic * (c.l * p.r00_sdag);
  j.m00 = p.l_r00 * c.l_dag;
  return j;
}

void scale_add(MatrixQuad& acc, const MatrixQuad& src, Complex w) {
  acc.m00.noalias() += w * src.m00;
  acc.m01.noalias() += w * src.m01;
  acc.m10.noalias() += w * src.m10;
  acc.m11.noalias() += w * src.m11;
}

void scale_add(MatrixQuad& acc, const HierarchyState& st, Complex w) {
  acc.m00.noalias() += w * st.rho00.matrix();
  acc.m01.noalias() += w * st.rho01.matrix();
  acc.m10.noalias() += w * st.rho10.matrix();
  acc.m11.noalias() += w * st.rho11.matrix();
}

void require_dims(const FilterContext& ctx, const HierarchyState& st) {
  const std::size_t d = ctx.dim();
  if (st.rho00.dim() != d || st.rho01.dim() != d || st.rho10.dim() != d || st.rho11.dim() != d) {
    throw std::invalid_argument("hierarchy state dimension does not match the system");
  }
}

}  // namespace

double k_gain(const FilterContext& ctx, const HierarchyState& st, double t) {
  require_dims(ctx, st);
  return checked_k1(raw_gains(ctx, st, ctx.wavepacket().xi(t)).k1, t);
}

double nu_intensity(const FilterContext& ctx, const HierarchyState& st, double t) {
  require_dims(ctx, st);
  return checked_nu(ctx, st, ctx.wavepacket().xi(t), t);
}

double nu_intensity_raw(const FilterContext& ctx, const HierarchyState& st, double t) {
  require_dims(ctx, st);
  return checked_nu_raw(ctx, st, ctx.wavepacket().xi(t), t);
}

HomodyneGains k1_k2_gains(const FilterContext& ctx, const HierarchyState& st, double t) {
  require_dims(ctx, st);
  const RawGains g = raw_gains(ctx, st, ctx.wavepacket().xi(t));
  return {checked_k1(g.k1, t), checked_k2(g.k2, t)};
}

HierarchyState master_drift(const FilterContext& ctx, const HierarchyState& st, double t) {
  require_dims(ctx, st);
  const Complex xi = ctx.wavepacket().xi(t);
  const Products p = products(ctx.cache(), st);
  return to_state(drift_terms(ctx.cache(), st, p, xi));
}

HierarchyState hdpc_delta(const FilterContext& ctx, const HierarchyState& st, double t, double dt, double dw,
                          bool jump) {
  require_dims(ctx, st);
  if (!(dt > 0.0)) throw std::invalid_argument("hdpc_delta: dt must be positive");
  const auto& c = ctx.cache();
  const Complex xi = ctx.wavepacket().xi(t);
  const Products p = products(c, st);

  MatrixQuad acc = drift_terms(c, st, p, xi);
  for (Matrix* m : {&acc.m00, &acc.m01, &acc.m10, &acc.m11}) *m *= dt;

  const double eta = ctx.transmission();
  if (eta != 0.0) {
    const double k = checked_k1(raw_gains(ctx, st, xi).k1, t);
    add_homodyne(acc, st, p, c.phase, xi, Complex(k), false, Complex(eta * dw));
  }

  const double r = ctx.reflection();
  if (r != 0.0 && !ctx.discard_channel2()) {
    // Unclamped: the no-click term then keeps Tr rho11 fixed exactly.
    const double nu = checked_nu_raw(ctx, st, xi, t);
    const double rate = r * r * nu;
    const MatrixQuad j = jump_terms(c, p, xi);
    if (jump) {
      if (nu < FilterContext::kNuGuard) {
        throw IllConditionedJump("detector click with jump intensity " + std::to_string(nu) +
                                 " below guard at t=" + std::to_string(t));
      }
      // (J / nu - rho) (1 - r^2 nu dt)
      const double dn = 1.0 - rate * dt;
      scale_add(acc, j, Complex(dn / nu));
      scale_add(acc, st, Complex(-dn));
    } else {
      // (J / nu - rho)(-r^2 nu dt) = -r^2 dt (J - nu rho); no division by nu.
      scale_add(acc, j, Complex(-r * r * dt));
      scale_add(acc, st, Complex(rate * dt));
    }
  } else if (jump && !ctx.discard_channel2()) {
    throw IllConditionedJump("detector click requested with r = 0 at t=" + std::to_string(t));
  }
  return to_state(std::move(acc));
}

HierarchyState hdpc_increment(const FilterContext& ctx, const HierarchyState& st, double t, double dt, double dw,
                              bool jump) {
  return st + hdpc_delta(ctx, st, t, dt, dw, jump);
}

HierarchyState hdhd_delta(const FilterContext& ctx, const HierarchyState& st, double t, double dt, double dw1,
                          double dw2) {
  require_dims(ctx, st);
  if (!(dt > 0.0)) throw std::invalid_argument("hdhd_delta: dt must be positive");
  const auto& c = ctx.cache();
  const Complex xi = ctx.wavepacket().xi(t);
  const Products p = products(c, st);

  MatrixQuad acc = drift_terms(c, st, p, xi);
  for (Matrix* m : {&acc.m00, &acc.m01, &acc.m10, &acc.m11}) *m *= dt;

  const RawGains g = raw_gains(ctx, st, xi);
  const double eta = ctx.transmission();
  if (eta != 0.0) {
    add_homodyne(acc, st, p, c.phase, xi, Complex(checked_k1(g.k1, t)), false, Complex(eta * dw1));
  }
  const double r = ctx.reflection();
  if (r != 0.0 && !ctx.discard_channel2()) {
    add_homodyne(acc, st, p, c.phase, xi, checked_k2(g.k2, t), true, Complex(0.0, -r * dw2));
  }
  return to_state(std::move(acc));
}

HierarchyState hdhd_increment(const FilterContext& ctx, const HierarchyState& st, double t, double dt,
                              double dw1, double dw2) {
  return st + hdhd_delta(ctx, st, t, dt, dw1, dw2);
}

HierarchyState filter_delta(const FilterContext& ctx, const HierarchyState& st, double t, double dt,
                            const NoiseIncrement& noise) {
  switch (ctx.scheme()) {
    case Scheme::HdPc:
      return hdpc_delta(ctx, st, t, dt, noise.dw1, noise.jump);
    case Scheme::HdHd:
      return hdhd_delta(ctx, st, t, dt, noise.dw1, noise.dw2);
  }
  throw std::logic_error("filter_delta: unhandled scheme");
}

double expectation(const HierarchyState& st, const Operator& x) { return trace_product(st.rho11, x).real(); }

std::string describe(const HierarchyState& st) {
  std::ostringstream os;
  os.precision(12);
  auto dump = [&](const char* name, const Operator& op) {
    os << name << "=[";
    for (std::size_t r = 0; r < op.dim(); ++r) {
      os << (r ? "; " : "");
      for (std::size_t c = 0; c < op.dim(); ++c) os << (c ? ", " : "") << op(r, c);
    }
    os << "] ";
  };
  dump("rho11", st.rho11);
  dump("rho10", st.rho10);
  dump("rho01", st.rho01);
  dump("rho00", st.rho00);
  return os.str();
}

}  // namespace qfilter
