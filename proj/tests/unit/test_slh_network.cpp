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

#include "qfilter/slh_network.hpp"
#include "test_support.hpp"

using namespace qfilter;
using namespace qfilter::testing;

namespace {

// The closed form of the network built from a system (S, L, H), its ancilla
// source with coupling lambda and the beam splitter, written out with
// explicit Kronecker products rather than the composition rules.
SlhModel closed_form_network(const SlhModel& g, double lambda, const BeamSplitterParams& p) {
  const std::size_t d = g.dim();
  const Operator i2 = Operator::identity(2);
  const Operator id = Operator::identity(2 * d);
  const Operator sm = qubit::sigma_minus();
  const Operator s_ext = kron(i2, g.s(0, 0));
  const Operator l_ext = kron(i2, g.l(0)) + Complex(lambda) * kron(sm, g.s(0, 0));
  const Operator lsa = Complex(lambda) * kron(sm, g.l(0).adjoint() * g.s(0, 0));
  const Operator h = kron(i2, g.h()) + Complex(0.0, -0.5) * (lsa - lsa.adjoint());

  const double eta = std::sqrt(1.0 - p.r * p.r);
  const Complex a = eta * std::exp(Complex(0.0, p.theta));
  const Complex b = Complex(0.0, p.r) * std::exp(Complex(0.0, p.theta));
  std::vector<Operator> s{a * s_ext, b * id, b * s_ext, a * id};
  std::vector<Operator> l{a * l_ext, b * l_ext};
  return SlhModel(2, std::move(s), std::move(l), h);
}

}  // namespace

TEST_CASE("model validation") {
  SUBCASE("non-unitary scattering") {
    CHECK_THROWS_AS(SlhModel::single(Complex(2.0) * Operator::identity(2), Operator::zero(2), Operator::zero(2)),
                    std::invalid_argument);
  }
  SUBCASE("non-Hermitian Hamiltonian") {
    CHECK_THROWS_AS(SlhModel::single(Operator::identity(2), Operator::zero(2), qubit::sigma_minus()),
                    std::invalid_argument);
  }
  SUBCASE("block dimensions must agree") {
    CHECK_THROWS_AS(SlhModel::single(Operator::identity(2), Operator::zero(3), Operator::zero(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("concatenation") {
  SUBCASE("of two identities") {
    const SlhModel c = concat(SlhModel::identity(1, 2), SlhModel::identity(1, 2));
    CHECK(max_abs_diff(c, SlhModel::identity(2, 2)) == 0.0);
  }
  SUBCASE("stacks the couplings and adds Hamiltonians") {
    std::mt19937_64 rng(11);
    const SlhModel g1 = random_single_channel(rng, 3);
    const SlhModel g2 = random_single_channel(rng, 3);
    const SlhModel c = concat(g1, g2);
    REQUIRE(c.n_channels() == 2);
    CHECK(max_abs_diff(c.s(0, 0), g1.s(0, 0)) == 0.0);
    CHECK(max_abs_diff(c.s(1, 1), g2.s(0, 0)) == 0.0);
    CHECK(c.s(0, 1).max_abs() == 0.0);
    CHECK(max_abs_diff(c.l(1), g2.l(0)) == 0.0);
    CHECK(max_abs_diff(c.h(), g1.h() + g2.h()) <= 1e-15);
  }
}

TEST_CASE("series product") {
  SUBCASE("hand-computed single channel") {
    // (I, sigma-, 0) feeding (I, sigma-, 0): L = 2 sigma-, H = Im(sigma+ sigma-) = 0.
    const SlhModel g = two_level_atom();
    const SlhModel s = series(g, g);
    CHECK(max_abs_diff(s.l(0), Complex(2.0) * qubit::sigma_minus()) <= 1e-15);
    CHECK(s.h().max_abs() <= 1e-15);
  }
  SUBCASE("a phase shifter rotates the coupling") {
    const Complex ph = std::exp(Complex(0.0, 0.3));
    const SlhModel shifter = SlhModel::single(ph * Operator::identity(2), Operator::zero(2), Operator::zero(2));
    const SlhModel s = series(shifter, two_level_atom());
    CHECK(max_abs_diff(s.l(0), ph * qubit::sigma_minus()) <= 1e-15);
  }
  SUBCASE("identity is neutral") {
    std::mt19937_64 rng(12);
    const SlhModel g = random_model(rng, 2, 3);
    CHECK(max_abs_diff(series(SlhModel::identity(2, 3), g), g) <= 1e-12);
    CHECK(max_abs_diff(series(g, SlhModel::identity(2, 3)), g) <= 1e-12);
  }
  SUBCASE("associativity") {
    std::mt19937_64 rng(13);
    for (std::size_t n = 1; n <= 2; ++n) {
      for (int i = 0; i < 20; ++i) {
        const SlhModel a = random_model(rng, n, 3);
        const SlhModel b = random_model(rng, n, 3);
        const SlhModel c = random_model(rng, n, 3);
        CHECK(max_abs_diff(series(c, series(b, a)), series(series(c, b), a)) <= 1e-10);
      }
    }
  }
  SUBCASE("channel count mismatch") {
    CHECK_THROWS_AS(series(SlhModel::identity(2, 2), SlhModel::identity(1, 2)), std::invalid_argument);
  }
}

TEST_CASE("beam splitter") {
  SUBCASE("r = 0 with no phase is the identity") {
    CHECK((beam_splitter_matrix({0.0, 0.0}) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("r = 1, theta = -pi/2 swaps the ports") {
    Matrix swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    CHECK((beam_splitter_matrix({1.0, -std::numbers::pi / 2.0}) - swap).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("unitary on a parameter grid") {
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 16; ++j) {
        const BeamSplitterParams p{i / 20.0, -std::numbers::pi + j * std::numbers::pi / 8.0};
        const Matrix sb = beam_splitter_matrix(p);
        CHECK((sb.adjoint() * sb - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
  SUBCASE("invalid reflectivity") {
    CHECK_THROWS_AS(beam_splitter_matrix({1.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter_matrix({-0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter_matrix({std::nan(""), 0.0}), std::invalid_argument);
  }
}

TEST_CASE("whole network") {
  SUBCASE("two-level atom at the working point") {
    const BeamSplitterParams p{std::sqrt(0.5), 0.4};
    const SlhModel net = whole_system(two_level_atom(), 0.8, p);
    CHECK(max_abs_diff(net, closed_form_network(two_level_atom(), 0.8, p)) <= 1e-12);
    CHECK(net.h().is_hermitian(1e-12));
  }
  SUBCASE("random systems and parameters") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      const SlhModel g = random_single_channel(rng, 3);
      const double lambda = 2.0 * u(rng);
      const BeamSplitterParams p{u(rng), 2.0 * std::numbers::pi * u(rng)};
      const SlhModel net = whole_system(g, lambda, p);
      CHECK(max_abs_diff(net, closed_form_network(g, lambda, p)) <= 1e-12);
      CHECK(net.h().is_hermitian(1e-12));
      CHECK(Operator(net.s_joint()).is_unitary(1e-12));
    }
  }
  SUBCASE("a silent source leaves the system couplings untouched") {
    const SlhModel net = whole_system(two_level_atom(), 0.0, {0.0, 0.0});
    CHECK(max_abs_diff(net.l(0), kron(Operator::identity(2), qubit::sigma_minus())) <= 1e-15);
    CHECK(net.l(1).max_abs() == 0.0);
    CHECK(net.h().max_abs() == 0.0);
  }
}
