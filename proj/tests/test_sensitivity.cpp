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
#include <numbers>

#include "doctest.h"
#include "sqgrav/errors.hpp"
#include "sqgrav/quadrature.hpp"
#include "sqgrav/rng.hpp"
#include "sqgrav/sensitivity.hpp"

using namespace sqgrav;

namespace {

// Closed form for the Blackman-edged trapezoid pair: each lobe has area
// tau + T_R and the two lobe centroids are tau + T_R + T apart.
double analytic_scale(const SequenceTiming& s, double k) {
  return k * (s.tau_bm + s.t_sep) * (2 * s.tau_bm + s.t_sep + s.big_t);
}

SequenceTiming random_timing(RngStream& rng) {
  SequenceTiming s;
  s.tau_bm = 5e-6 + 100e-6 * rng.uniform();
  s.t_sep = 1e-6 + 200e-6 * rng.uniform();
  s.big_t = 1e-6 + 2e-3 * rng.uniform();
  s.t0 = -1e-3 + 2e-3 * rng.uniform();
  return s;
}

}  // namespace

TEST_CASE("breakpoints of the default sequence") {
  const SequenceTiming s;
  const auto b = s.breakpoints();
  CHECK(b[0] == 0.0);
  CHECK(b[1] == doctest::Approx(60e-6));
  CHECK(b[2] == doctest::Approx(137e-6));
  CHECK(b[3] == doctest::Approx(197e-6));
  CHECK(b[4] == doctest::Approx(652e-6));
  CHECK(b[7] == doctest::Approx(849e-6));
  CHECK(s.end() == b[7]);
}

TEST_CASE("timing validation") {
  SequenceTiming s;
  s.tau_bm = -1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = SequenceTiming{};
  s.big_t = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  PhysicalConstants c;
  c.k_eff = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(PhysicalConstants{}.k_eff == doctest::Approx(1.61057e7).epsilon(1e-5));
}

TEST_CASE("g_grav examples") {
  const SequenceTiming s;
  CHECK(g_grav(s, 0.0) == 0.0);
  CHECK(g_grav(s, 60e-6 + 38.5e-6) == 1.0);
  CHECK(g_grav(s, 3 * 60e-6 + 1.5 * 77e-6 + 455e-6) == -1.0);
  CHECK(g_grav(s, s.end()) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g_grav(s, -1e-6) == 0.0);
  CHECK(g_grav(s, s.end() + 1e-6) == 0.0);
}

TEST_CASE("g_grav is continuous and bounded") {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_timing(rng);
    for (double b : s.breakpoints()) {
      const double eps = 1e-12;
      CHECK(std::abs(g_grav(s, b - eps) - g_grav(s, b + eps)) < 1e-6);
    }
    for (int k = 0; k <= 500; ++k) {
      const double t = s.t0 + s.end() * k / 500.0 - s.t0 * k / 500.0;
      CHECK(std::abs(g_grav(s, t)) <= 1.0);
    }
  }
}

TEST_CASE("profile object mirrors g_grav") {
  const SequenceTiming s;
  const SensitivityProfile p(s);
  CHECK(p(100e-6) == g_grav(s, 100e-6));
  CHECK(p.breakpoints() == s.breakpoints());
}

TEST_CASE("net area vanishes for random timings") {
  RngStream rng(17, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_timing(rng);
    CHECK(std::abs(net_area(s)) < 1e-9 * (s.tau_bm + s.t_sep));
  }
}

TEST_CASE("positive lobe area equals tau + T_R") {
  const SequenceTiming s;
  CHECK(positive_lobe_area(s) == doctest::Approx(137e-6).epsilon(1e-10));
  RngStream rng(3, 9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = random_timing(rng);
    // independent quadrature of the first lobe
    const auto b = r.breakpoints();
    auto g = [&](double t) { return g_grav(r, t); };
    const auto q = integrate_piecewise(g, std::vector<double>{b[0], b[1], b[2], b[3]}, QuadratureOptions<double>{1e-18, 1e-12, 2000});
    CHECK(q.value == doctest::Approx(r.tau_bm + r.t_sep).epsilon(1e-10));
    CHECK(positive_lobe_area(r) == doctest::Approx(r.tau_bm + r.t_sep).epsilon(1e-10));
  }
}

TEST_CASE("scale factor matches the lobe-centroid closed form") {
  const PhysicalConstants c;
  SequenceTiming s;
  CHECK(scale_factor(s, c) == doctest::Approx(analytic_scale(s, c.k_eff)).epsilon(1e-10));
  CHECK(scale_factor(s, c) == doctest::Approx(1.43863).epsilon(1e-5));
  s.big_t = 155e-6;
  CHECK(scale_factor(s, c) == doctest::Approx(0.776684).epsilon(1e-5));
  RngStream rng(23, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = random_timing(rng);
    CHECK(scale_factor(r, c) == doctest::Approx(analytic_scale(r, c.k_eff)).epsilon(1e-9));
  }
}

TEST_CASE("scale factor difference is linear in T") {
  const PhysicalConstants c;
  for (auto [t1, t2] : {std::pair{455e-6, 155e-6}, std::pair{1.3e-3, 0.21e-3}}) {
    const SequenceTiming a = SequenceTiming{}.with_big_t(t1);
    const SequenceTiming b = SequenceTiming{}.with_big_t(t2);
    const double expect = c.k_eff * (a.tau_bm + a.t_sep) * (t1 - t2);
    CHECK((scale_factor(a, c) - scale_factor(b, c)) == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("scale factor does not depend on the sequence origin") {
  const PhysicalConstants c;
  SequenceTiming s;
  const double base = scale_factor(s, c);
  s.t0 = 0.37;
  CHECK(scale_factor(s, c) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("phase signal examples") {
  const PhysicalConstants c;
  CHECK(phase_signal(9.81, 9.81 * c.k_eff, 1.4, c) == doctest::Approx(0.0).epsilon(1e-12));
  const double phi = phase_signal(9.812637, 9.8126 * c.k_eff, 1.4290, c);
  CHECK(phi == doctest::Approx(5.29e-5).epsilon(2e-3));
  CHECK(phase_signal(9.812637, 9.8126 * c.k_eff, 2 * 1.4290, c) == doctest::Approx(2 * phi));
}
