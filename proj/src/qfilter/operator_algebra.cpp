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

#include "qfilter/operator_algebra.hpp"

#include <stdexcept>
#include <string>

namespace qfilter {

namespace {

void require_same_dim(const Operator& a, const Operator& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

Operator::Operator(std::size_t dim) {
  if (dim == 0) {
    throw std::invalid_argument("Operator: dimension must be >= 1");
  }
  m_ = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw std::invalid_argument("Operator: matrix must be square and non-empty");
  }
}

Operator::Operator(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) {
    throw std::invalid_argument("Operator: empty initializer");
  }
  m_.resize(n, n);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw std::invalid_argument("Operator: initializer rows must form a square matrix");
    }
    Eigen::Index c = 0;
    for (const auto& v : row) {
      m_(r, c++) = v;
    }
    ++r;
  }
}

Operator Operator::identity(std::size_t dim) {
  Operator out(dim);
  out.m_.setIdentity();
  return out;
}

Operator Operator::projector(std::span<const Complex> v) {
  Operator out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      out.m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i] * std::conj(v[j]);
    }
  }
  return out;
}

Operator Operator::basis_outer(std::size_t dim, std::size_t i, std::size_t j) {
  if (i >= dim || j >= dim) {
    throw std::out_of_range("Operator::basis_outer: index out of range");
  }
  Operator out(dim);
  out.m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return out;
}

Operator Operator::from_row_major(std::size_t dim, std::span<const Complex> entries) {
  if (entries.size() != dim * dim) {
    throw std::invalid_argument("Operator::from_row_major: expected " + std::to_string(dim * dim) +
                                " entries, got " + std::to_string(entries.size()));
  }
  Operator out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      out.m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entries[r * dim + c];
    }
  }
  return out;
}

double Operator::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

bool Operator::is_hermitian(double tol) const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol; }

bool Operator::is_unitary(double tol) const {
  const Matrix id = Matrix::Identity(m_.rows(), m_.cols());
  return (m_.adjoint() * m_ - id).cwiseAbs().maxCoeff() <= tol &&
         (m_ * m_.adjoint() - id).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& o) {
  require_same_dim(*this, o, "operator+");
  m_ += o.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  require_same_dim(*this, o, "operator-");
  m_ -= o.m_;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator*");
  return Operator(Matrix(a.m_ * b.m_), Operator::Unchecked{});
}

double max_abs_diff(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "max_abs_diff");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

Complex trace_product(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "trace_product");
  // Tr[AB] = sum_ij A_ij B_ji
  return a.matrix().cwiseProduct(b.matrix().transpose()).sum();
}

Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index na = a.matrix().rows();
  const Eigen::Index nb = b.matrix().rows();
  Matrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
    }
  }
  return Operator(std::move(out));
}

Operator commutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

Operator dissipator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "dissipator");
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  const Matrix ada = am.adjoint() * am;
  return Operator(Matrix(am.adjoint() * bm * am - 0.5 * (ada * bm + bm * ada)));
}

Operator dissipator_star(const Operator& a, const Operator& rho) {
  require_same_dim(a, rho, "dissipator_star");
  const Matrix& am = a.matrix();
  const Matrix& rm = rho.matrix();
  const Matrix ada = am.adjoint() * am;
  return Operator(Matrix(am * rm * am.adjoint() - 0.5 * (ada * rm + rm * ada)));
}

namespace qubit {

Operator sigma_minus() { return Operator{{0.0, 0.0}, {1.0, 0.0}}; }
Operator sigma_plus() { return Operator{{0.0, 1.0}, {0.0, 0.0}}; }
Operator excited_projector() { return Operator{{1.0, 0.0}, {0.0, 0.0}}; }
Operator ground_projector() { return Operator{{0.0, 0.0}, {0.0, 1.0}}; }

}  // namespace qubit

}  // namespace qfilter
