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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>

#include <Eigen/Dense>

namespace qfilter {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Dense complex square matrix on the (truncated) system space.
///
/// Every operator symbol of the filter equations (S, L, H, the conditional
/// matrices, observables) is an Operator. Values are immutable in spirit:
/// all algebra returns new operators and never mutates its arguments.
class Operator {
 public:
  /// Zero operator of dimension `dim` (dim >= 1).
  explicit Operator(std::size_t dim);
  /// Takes ownership of a square Eigen matrix. Throws std::invalid_argument
  /// for an empty or non-square matrix.
  explicit Operator(Matrix m);
  /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
  Operator(std::initializer_list<std::initializer_list<Complex>> rows);

  static Operator identity(std::size_t dim);
  static Operator zero(std::size_t dim) { return Operator(dim); }
  /// |v><v| for a (not necessarily normalized) column vector.
  static Operator projector(std::span<const Complex> v);
  /// |i><j| in the computational basis.
  static Operator basis_outer(std::size_t dim, std::size_t i, std::size_t j);
  /// Row-major dim*dim complex entries.
  static Operator from_row_major(std::size_t dim, std::span<const Complex> entries);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  Operator adjoint() const { return Operator(Matrix(m_.adjoint()), Unchecked{}); }
  Complex trace() const { return m_.trace(); }
  /// Max absolute entry.
  double max_abs() const;

  bool is_hermitian(double tol) const;
  bool is_unitary(double tol) const;

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(Complex s) {
    m_ *= s;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator-(const Operator& a) { return Operator(Matrix(-a.m_), Unchecked{}); }
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, Complex s) { return a *= s; }

 private:
  struct Unchecked {};
  Operator(Matrix m, Unchecked) : m_(std::move(m)) {}

  Matrix m_;
};

/// Max absolute entry of a - b. Throws on dimension mismatch.
double max_abs_diff(const Operator& a, const Operator& b);

/// Tr[a b] without forming the product.
Complex trace_product(const Operator& a, const Operator& b);

/// Kronecker product a (x) b; `a` acts on the leading factor.
Operator kron(const Operator& a, const Operator& b);

/// [a, b] = ab - ba
Operator commutator(const Operator& a, const Operator& b);

/// D_A B = A^dag B A - (A^dag A B + B A^dag A) / 2  (Heisenberg side)
Operator dissipator(const Operator& a, const Operator& b);

/// D*_A rho = A rho A^dag - (A^dag A rho + rho A^dag A) / 2  (Schroedinger side)
Operator dissipator_star(const Operator& a, const Operator& rho);

/// Two-level conventions used across the project: |e> is basis index 0,
/// |g> is basis index 1.
namespace qubit {
Operator sigma_minus();  // |g><e|
Operator sigma_plus();   // |e><g|
Operator excited_projector();
Operator ground_projector();
}  // namespace qubit

}  // namespace qfilter
