// Copyright 2026 The sqgrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "sqgrav/errors.hpp"
#include "sqgrav/expm.hpp"
#include "sqgrav/gauss_hermite.hpp"
#include "sqgrav/ode.hpp"
#include "sqgrav/quadrature.hpp"
#include "sqgrav/rng.hpp"

using namespace sqgrav;
constexpr double kPi = std::numbers::pi;

TEST_CASE("adaptive quadrature: polynomial and oscillatory integrands") {
  auto cubic = [](double x) { return x * x * x - 2 * x; };
  const auto r = integrate_adaptive(cubic, 0.0, 2.0, QuadratureOptions<double>{});
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-14));

  auto osc = [](double x) { return std::sin(50 * x); };
  const auto o = integrate_adaptive(osc, 0.0, 1.0, QuadratureOptions<double>{});
  CHECK(std::abs(o.value - (1 - std::cos(50.0)) / 50) < 1e-12);
}

TEST_CASE("piecewise quadrature handles kinks at breakpoints") {
  auto tent = [](double x) { return x < 1 ? x : 2 - x; };
  const auto r = integrate_piecewise(tent, std::vector<double>{0, 1, 2}, QuadratureOptions<double>{});
  CHECK(std::abs(r.value - 1.0) < 1e-14);
  CHECK(r.intervals <= 4);
}

TEST_CASE("dopri5 follows exp decay and harmonic motion") {
  using V = Eigen::Vector2d;
  auto rhs = [](double, const V& y) { return V(y(1), -y(0)); };
  const auto res = integrate_dopri5(rhs, V(1, 0), 0.0, 10.0);
  CHECK(std::abs(res.state(0) - std::cos(10.0)) < 1e-8);
  CHECK(std::abs(res.state(1) + std::sin(10.0)) < 1e-8);

  using S = Eigen::Matrix<double, 1, 1>;
  auto decay = [](double, const S& y) -> S { return -3 * y; };
  const auto d = integrate_dopri5(decay, S(2.0), 0.0, 1.0);
  CHECK(std::abs(d.state(0) - 2 * std::exp(-3.0)) < 1e-9);
}

TEST_CASE("dopri5 reports step exhaustion") {
  using S = Eigen::Matrix<double, 1, 1>;
  auto rhs = [](double, const S& y) -> S { return -1e4 * y; };
  OdeOptions opts;
  opts.max_steps = 5;
  CHECK_THROWS_AS(integrate_dopri5(rhs, S(1.0), 0.0, 100.0, opts), NumericalError);
}

TEST_CASE("expm matches eigendecomposition for Hermitian generators") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Random(30, 30);
  h = (h + h.transpose()).eval();
  for (double scale : {1e-3, 0.7, 25.0}) {
    const Eigen::MatrixXcd a = std::complex<double>(0, -scale) * h.cast<std::complex<double>>();
    const Eigen::MatrixXcd u = expm(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXcd phases(30);
    for (int i = 0; i < 30; ++i) phases(i) = std::exp(std::complex<double>(0, -scale * es.eigenvalues()(i)));
    const Eigen::MatrixXcd v = es.eigenvectors().cast<std::complex<double>>();
    const Eigen::MatrixXcd ref = v * phases.asDiagonal() * v.adjoint();
    CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("expm of a nilpotent and a diagonal matrix") {
  Eigen::Matrix2d n;
  n << 0, 3, 0, 0;
  const Eigen::Matrix2d e = expm(n);
  CHECK(e(0, 1) == doctest::Approx(3.0));
  CHECK(e(0, 0) == doctest::Approx(1.0));
  Eigen::Matrix3d d = Eigen::Vector3d(1, -2, 0.5).asDiagonal();
  const Eigen::Matrix3d ed = expm(d);
  CHECK(ed(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("Gauss-Hermite rule integrates normal moments") {
  const auto rule = gauss_hermite_normal<double>(32);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0, cosine = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    m0 += w;
    m2 += w * x * x;
    m4 += w * std::pow(x, 4);
    m6 += w * std::pow(x, 6);
    cosine += w * std::cos(x);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(cosine == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_hermite_normal<double>(0), DomainError);
}

TEST_CASE("counter RNG streams are reproducible and independent") {
  RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
  CHECK(a.counter() == 100);
}

TEST_CASE("RNG normal draws have unit moments") {
  RngStream s(11, 0);
  const int n = 200000;
  double sum = 0, sum2 = 0, u_min = 1, u_max = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sum2 += x * x;
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(sum2 / n - 1.0) < 0.015);
  CHECK(u_min >= 0.0);
  CHECK(u_max < 1.0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 600; ++i) seen.insert(s.below(6));
  CHECK(seen.size() == 6);
  CHECK(*seen.rbegin() == 5);
  (void)kPi;
}
