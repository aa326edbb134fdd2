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
#include <vector>

#include "qfilter/operator_algebra.hpp"

namespace qfilter {

/// Open-system description (S, L, H) with n field channels.
///
/// S is an n x n block matrix of operators stored row-major, L a column of n
/// operators and H the Hamiltonian. Construction validates that S is unitary
/// on the joint space and H is Hermitian (both to kModelTolerance). A model
/// of dimension 1 is a purely scalar network (beam splitter, identity wire);
/// concat() and series() lift such models to identity multiples when paired
/// with an operator-valued model.
class SlhModel {
 public:
  static constexpr double kModelTolerance = 1e-10;

  SlhModel(std::size_t n_channels, std::vector<Operator> s, std::vector<Operator> l, Operator h);

  /// Single-channel (S, L, H).
  static SlhModel single(Operator s, Operator l, Operator h);
  /// (I, 0, 0) with n channels on a `dim`-dimensional space.
  static SlhModel identity(std::size_t n_channels, std::size_t dim);

  std::size_t n_channels() const { return n_; }
  std::size_t dim() const { return h_.dim(); }

  const Operator& s(std::size_t row, std::size_t col) const { return s_.at(row * n_ + col); }
  const Operator& l(std::size_t channel) const { return l_.at(channel); }
  const Operator& h() const { return h_; }
  const std::vector<Operator>& s_blocks() const { return s_; }
  const std::vector<Operator>& l_vector() const { return l_; }

  /// The S block matrix as one (n*dim) x (n*dim) matrix.
  Matrix s_joint() const;

  /// Re-express a scalar (dim 1) model on a `dim`-dimensional space.
  SlhModel lifted(std::size_t dim) const;

 private:
  std::size_t n_;
  std::vector<Operator> s_;
  std::vector<Operator> l_;
  Operator h_;
};

/// Max absolute entry difference over S, L and H. Models must share shape.
double max_abs_diff(const SlhModel& a, const SlhModel& b);

struct BeamSplitterParams {
  double r = 0.0;      // reflectivity, 0 <= r <= 1
  double theta = 0.0;  // phase (radians)
};

/// Throws std::invalid_argument unless 0 <= r <= 1 and both are finite.
void validate(const BeamSplitterParams& p);

/// G1 [+] G2: block-diagonal S, stacked L, H1 + H2.
SlhModel concat(const SlhModel& g1, const SlhModel& g2);

/// G2 <| G1 (output of g1 feeds g2): (S2 S1, L2 + S2 L1, H1 + H2 + Im{L2^dag S2 L1}).
SlhModel series(const SlhModel& g2, const SlhModel& g1);

/// The 2x2 scattering matrix of the beam splitter.
Matrix beam_splitter_matrix(const BeamSplitterParams& p);

/// Two-channel (S_b, 0, 0) on a `dim`-dimensional space (scalar by default).
SlhModel beam_splitter(const BeamSplitterParams& p, std::size_t dim = 1);

/// Im{A} = (A - A^dag) / 2i. Always Hermitian.
Operator imag_part(const Operator& a);

/// The measured network B <| [(G <| M) [+] (1, 0, 0)] at one instant, with
/// M = (I, lambda sigma_-, 0) the single-photon source ancilla. The returned
/// model acts on ancilla (x) system (ancilla is the leading 2-level factor).
SlhModel whole_system(const SlhModel& g, double lambda, const BeamSplitterParams& p);

/// G <| M on ancilla (x) system: the ancilla-cascaded (extended) system.
SlhModel extended_system(const SlhModel& g, double lambda);

}  // namespace qfilter
