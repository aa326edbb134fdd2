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

#include "qfilter/slh_network.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qfilter {

SlhModel::SlhModel(std::size_t n_channels, std::vector<Operator> s, std::vector<Operator> l, Operator h)
    : n_(n_channels), s_(std::move(s)), l_(std::move(l)), h_(std::move(h)) {
  if (n_ == 0) {
    throw std::invalid_argument("SlhModel: at least one channel is required");
  }
  if (s_.size() != n_ * n_ || l_.size() != n_) {
    throw std::invalid_argument("SlhModel: S must have n*n blocks and L n entries");
  }
  const std::size_t d = h_.dim();
  for (const auto& op : s_) {
    if (op.dim() != d) throw std::invalid_argument("SlhModel: S block dimension differs from H");
  }
  for (const auto& op : l_) {
    if (op.dim() != d) throw std::invalid_argument("SlhModel: L entry dimension differs from H");
  }
  if (!h_.is_hermitian(kModelTolerance)) {
    throw std::invalid_argument("SlhModel: H is not Hermitian");
  }
  if (!Operator(s_joint()).is_unitary(kModelTolerance)) {
    throw std::invalid_argument("SlhModel: S is not unitary");
  }
}

SlhModel SlhModel::single(Operator s, Operator l, Operator h) {
  return SlhModel(1, {std::move(s)}, {std::move(l)}, std::move(h));
}

SlhModel SlhModel::identity(std::size_t n_channels, std::size_t dim) {
  std::vector<Operator> s;
  s.reserve(n_channels * n_channels);
  for (std::size_t r = 0; r < n_channels; ++r) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      s.push_back(r == c ? Operator::identity(dim) : Operator::zero(dim));
    }
  }
  return SlhModel(n_channels, std::move(s), std::vector<Operator>(n_channels, Operator::zero(dim)),
                  Operator::zero(dim));
}

Matrix SlhModel::s_joint() const {
  const auto d = static_cast<Eigen::Index>(dim());
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix out(n * d, n * d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out.block(r * d, c * d, d, d) = s_[static_cast<std::size_t>(r * n + c)].matrix();
    }
  }
  return out;
}

SlhModel SlhModel::lifted(std::size_t dim) const {
  if (this->dim() == dim) return *this;
  if (this->dim() != 1) {
    throw std::invalid_argument("SlhModel::lifted: only scalar (dim 1) models can be lifted");
  }
  const Operator id = Operator::identity(dim);
  auto lift = [&](const Operator& scalar) { return scalar(0, 0) * id; };
  std::vector<Operator> s;
  std::vector<Operator> l;
  for (const auto& op : s_) s.push_back(lift(op));
  for (const auto& op : l_) l.push_back(lift(op));
  return SlhModel(n_, std::move(s), std::move(l), lift(h_));
}

double max_abs_diff(const SlhModel& a, const SlhModel& b) {
  if (a.n_channels() != b.n_channels() || a.dim() != b.dim()) {
    throw std::invalid_argument("max_abs_diff: models differ in shape");
  }
  double m = max_abs_diff(a.h(), b.h());
  for (std::size_t i = 0; i < a.s_blocks().size(); ++i) {
    m = std::max(m, max_abs_diff(a.s_blocks()[i], b.s_blocks()[i]));
  }
  for (std::size_t i = 0; i < a.n_channels(); ++i) {
    m = std::max(m, max_abs_diff(a.l(i), b.l(i)));
  }
  return m;
}

void validate(const BeamSplitterParams& p) {
  if (!std::isfinite(p.r) || !std::isfinite(p.theta)) {
    throw std::invalid_argument("beam splitter: r and theta must be finite");
  }
  if (p.r < 0.0 || p.r > 1.0) {
    throw std::invalid_argument("beam splitter: r must lie in [0, 1], got " + std::to_string(p.r));
  }
}

namespace {

// Brings a pair of models onto the same space, lifting a scalar partner.
std::pair<SlhModel, SlhModel> align(const SlhModel& a, const SlhModel& b) {
  if (a.dim() == b.dim()) return {a, b};
  if (a.dim() == 1) return {a.lifted(b.dim()), b};
  if (b.dim() == 1) return {a, b.lifted(a.dim())};
  throw std::invalid_argument("SLH composition: system dimensions differ (" + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

SlhModel concat(const SlhModel& g1_in, const SlhModel& g2_in) {
  const auto [g1, g2] = align(g1_in, g2_in);
  const std::size_t n1 = g1.n_channels();
  const std::size_t n2 = g2.n_channels();
  const std::size_t n = n1 + n2;
  const std::size_t d = g1.dim();

  std::vector<Operator> s(n * n, Operator::zero(d));
  for (std::size_t r = 0; r < n1; ++r) {
    for (std::size_t c = 0; c < n1; ++c) s[r * n + c] = g1.s(r, c);
  }
  for (std::size_t r = 0; r < n2; ++r) {
    for (std::size_t c = 0; c < n2; ++c) s[(n1 + r) * n + (n1 + c)] = g2.s(r, c);
  }
  std::vector<Operator> l = g1.l_vector();
  l.insert(l.end(), g2.l_vector().begin(), g2.l_vector().end());
  return SlhModel(n, std::move(s), std::move(l), g1.h() + g2.h());
}

Operator imag_part(const Operator& a) { return (a - a.adjoint()) * Complex(0.0, -0.5); }

SlhModel series(const SlhModel& g2_in, const SlhModel& g1_in) {
  if (g1_in.n_channels() != g2_in.n_channels()) {
    throw std::invalid_argument("series: channel counts differ (" + std::to_string(g2_in.n_channels()) +
                                " vs " + std::to_string(g1_in.n_channels()) + ")");
  }
  const auto [g2, g1] = align(g2_in, g1_in);
  const std::size_t n = g1.n_channels();
  const std::size_t d = g1.dim();

  std::vector<Operator> s(n * n, Operator::zero(d));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t k = 0; k < n; ++k) s[r * n + c] += g2.s(r, k) * g1.s(k, c);
    }
  }

  // S2 L1, reused for L and for the Hamiltonian correction.
  std::vector<Operator> s2l1(n, Operator::zero(d));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) s2l1[r] += g2.s(r, k) * g1.l(k);
  }
  std::vector<Operator> l;
  l.reserve(n);
  Operator coupling = Operator::zero(d);
  for (std::size_t r = 0; r < n; ++r) {
    l.push_back(g2.l(r) + s2l1[r]);
    coupling += g2.l(r).adjoint() * s2l1[r];
  }
  return SlhModel(n, std::move(s), std::move(l), g1.h() + g2.h() + imag_part(coupling));
}

Matrix beam_splitter_matrix(const BeamSplitterParams& p) {
  validate(p);
  const double t = std::sqrt(1.0 - p.r * p.r);
  const Complex through = t * std::exp(kI * p.theta);
  const Complex cross = p.r * std::exp(kI * (p.theta + std::numbers::pi / 2.0));
  Matrix sb(2, 2);
  sb << through, cross, cross, through;
  return sb;
}

SlhModel beam_splitter(const BeamSplitterParams& p, std::size_t dim) {
  const Matrix sb = beam_splitter_matrix(p);
  const Operator id = Operator::identity(dim);
  std::vector<Operator> s{sb(0, 0) * id, sb(0, 1) * id, sb(1, 0) * id, sb(1, 1) * id};
  return SlhModel(2, std::move(s), {Operator::zero(dim), Operator::zero(dim)}, Operator::zero(dim));
}

SlhModel extended_system(const SlhModel& g, double lambda) {
  if (g.n_channels() != 1) {
    throw std::invalid_argument("extended_system: the system must have a single channel");
  }
  const Operator id2 = Operator::identity(2);
  const std::size_t d = g.dim();
  const SlhModel system = SlhModel::single(kron(id2, g.s(0, 0)), kron(id2, g.l(0)), kron(id2, g.h()));
  const std::size_t da = 2 * d;
  const SlhModel ancilla = SlhModel::single(Operator::identity(da),
                                            Complex(lambda, 0.0) * kron(qubit::sigma_minus(), Operator::identity(d)),
                                            Operator::zero(da));
  return series(system, ancilla);
}

SlhModel whole_system(const SlhModel& g, double lambda, const BeamSplitterParams& p) {
  const SlhModel extended = extended_system(g, lambda);
  const SlhModel with_noise = concat(extended, SlhModel::identity(1, 1));
  return series(beam_splitter(p), with_noise);
}

}  // namespace qfilter
