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
#include <vector>

#include "doctest.h"
#include "sqgrav/errors.hpp"
#include "sqgrav/pulse.hpp"
#include "sqgrav/rng.hpp"

using namespace sqgrav;
constexpr double kPi = std::numbers::pi;

namespace {

// Fixed-step RK4 on the two-level Schroedinger equation in lab time.
double rk4_transfer(double tau, double area, double detuning, int steps = 20000) {
  using C = std::complex<double>;
  const C i(0, 1);
  auto rabi = [&](double t) {
    const double x = t / tau;
    return area / (0.42 * tau) * (0.42 - 0.5 * std::cos(2 * kPi * x) + 0.08 * std::cos(4 * kPi * x));
  };
  auto f = [&](double t, C a, C b, C& da, C& db) {
    const double om = rabi(t);
    da = -i * (-detuning / 2 * a + om / 2 * b);
    db = -i * (om / 2 * a + detuning / 2 * b);
  };
  C a = 1, b = 0;
  const double h = tau / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    C ka1, kb1, ka2, kb2, ka3, kb3, ka4, kb4;
    f(t, a, b, ka1, kb1);
    f(t + h / 2, a + h / 2 * ka1, b + h / 2 * kb1, ka2, kb2);
    f(t + h / 2, a + h / 2 * ka2, b + h / 2 * kb2, ka3, kb3);
    f(t + h, a + h * ka3, b + h * kb3, ka4, kb4);
    a += h / 6 * (ka1 + 2. * ka2 + 2. * ka3 + ka4);
    b += h / 6 * (kb1 + 2. * kb2 + 2. * kb3 + kb4);
  }
  return std::norm(b);
}

// Monte-Carlo average of the RK4 oracle, interpolated on a detuning grid.
std::pair<double, double> monte_carlo_average(double tau, double mean, double sigma, int samples) {
  const int grid = 241;
  const double lo = mean - 6 * sigma, hi = mean + 6 * sigma;
  std::vector<double> table(grid);
  for (int k = 0; k < grid; ++k) table[k] = rk4_transfer(tau, kPi, lo + (hi - lo) * k / (grid - 1), 4000);
  RngStream rng(2024, 0);
  double s = 0, s2 = 0;
  for (int n = 0; n < samples; ++n) {
    const double d = std::clamp(rng.normal(mean, sigma), lo, hi);
    const double u = (d - lo) / (hi - lo) * (grid - 1);
    const int k = std::min(grid - 2, int(u));
    const double p = table[k] + (u - k) * (table[k + 1] - table[k]);
    s += p;
    s2 += p * p;
  }
  const double m = s / samples;
  return {m, std::sqrt(s2 / samples - m * m)};
}

}  // namespace

TEST_CASE("envelope examples") {
  const auto bm = PulseShape::blackman(60e-6);
  CHECK(envelope(bm, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(envelope(bm, 30e-6) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(envelope(bm, 60e-6) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(envelope(PulseShape::square(60e-6), 20e-6) == 1.0);
  CHECK(mean_envelope(PulseKind::Blackman) == doctest::Approx(0.42));
  CHECK(mean_envelope(PulseKind::Square) == 1.0);
  CHECK_THROWS_AS(envelope(bm, -1e-9), DomainError);
  CHECK_THROWS_AS(envelope(bm, 61e-6), DomainError);
}

TEST_CASE("envelope is symmetric about the pulse center") {
  const auto bm = PulseShape::blackman(64.8e-6);
  for (double x : {0.05, 0.13, 0.31, 0.44}) {
    CHECK(envelope(bm, x * 64.8e-6) == doctest::Approx(envelope(bm, (1 - x) * 64.8e-6)).epsilon(1e-13));
  }
}

TEST_CASE("accumulated area examples") {
  const auto bm = PulseShape::blackman(60e-6);
  CHECK(accumulated_area(bm, 0.0) == 0.0);
  CHECK(accumulated_area(bm, 60e-6) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(accumulated_area(bm, 30e-6) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(accumulated_area(bm, 60e-6, kPi) == doctest::Approx(kPi).epsilon(1e-15));
  const auto sq = PulseShape::square(60e-6);
  CHECK(accumulated_area(sq, 15e-6) == doctest::Approx(kPi / 8));
}

TEST_CASE("accumulated area matches numerical integration of the Rabi rate") {
  const auto bm = PulseShape::blackman(60e-6);
  const double t = 23e-6;
  const int n = 20000;
  double sum = 0;
  for (int k = 0; k < n; ++k) sum += rabi_rate(bm, (k + 0.5) * t / n);
  CHECK(sum * t / n == doctest::Approx(accumulated_area(bm, t, bm.target_area)).epsilon(1e-8));
}

TEST_CASE("sensitivity g_bm examples") {
  const auto bm = PulseShape::blackman(60e-6);
  CHECK(sensitivity_gbm(bm, 0.0) == 0.0);
  CHECK(sensitivity_gbm(bm, 60e-6) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sensitivity_gbm(bm, 30e-6) == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-14));
  const auto wide = PulseShape::blackman(60e-6, kPi, 2.0);
  CHECK_THROWS_AS(sensitivity_gbm(wide, 10e-6), ConfigError);
}

TEST_CASE("pulse shape validation") {
  CHECK_THROWS_AS(PulseShape::blackman(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(PulseShape::blackman(1e-6, -1.0).validate(), ConfigError);
  CHECK_NOTHROW(PulseShape::square(1e-6).validate());
}

TEST_CASE("resonant pi pulse transfers fully") {
  CHECK(transfer_probability(PulseShape::blackman(64.8e-6), 0.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(transfer_probability(PulseShape::square(20e-6), 0.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("square pulse ODE agrees with the Rabi formula") {
  const double tau = 20e-6;
  for (double hz : {0.0, 3e3, 17e3, 55e3, 120e3}) {
    const double d = 2 * kPi * hz;
    CHECK(std::abs(transfer_probability(PulseShape::square(tau), d) - square_pulse_transfer(tau, kPi, d)) <
          1e-6);
  }
}

TEST_CASE("Blackman transfer matches fixed-step RK4 oracle") {
  const auto bm = PulseShape::blackman(64.8e-6);
  const double d = 2 * kPi * 2.5e3;
  const double oracle = rk4_transfer(64.8e-6, kPi, d);
  const double p = transfer_probability(bm, d);
  CHECK(std::abs(p - oracle) < 1e-6);
  // frozen oracle value
  CHECK(p == doctest::Approx(0.97047).epsilon(2e-5));
}

TEST_CASE("transfer is converged in the integrator tolerance") {
  const auto bm = PulseShape::blackman(64.8e-6);
  const double d = 2 * kPi * 7e3;
  OdeOptions tight;
  tight.rel_tol = 1e-11;
  tight.abs_tol = 1e-14;
  OdeOptions half;
  half.rel_tol = 0.5e-9;
  half.abs_tol = 0.5e-12;
  const double p_tight = transfer_probability(bm, d, tight);
  CHECK(std::abs(transfer_probability(bm, d) - p_tight) < 1e-6);
  CHECK(std::abs(transfer_probability(bm, d, half) - p_tight) < 1e-6);
}

TEST_CASE("far-detuned Blackman pulse is suppressed") {
  const auto bm = PulseShape::blackman(64.8e-6);
  const double far = transfer_probability(bm, 2 * kPi * 50e3);
  CHECK(far < 0.5);
  CHECK(std::abs(far - rk4_transfer(64.8e-6, kPi, 2 * kPi * 50e3)) < 1e-6);
  // transfer falls off monotonically over the main lobe
  double prev = 1.0;
  for (double hz = 2e3; hz <= 20e3; hz += 2e3) {
    const double p = transfer_probability(bm, 2 * kPi * hz);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("averaged transfer with zero spread is the point value") {
  const auto bm = PulseShape::blackman(64.8e-6);
  const auto s = averaged_transfer(bm, 2 * kPi * 2.5e3, 0.0);
  CHECK(s.mean == doctest::Approx(transfer_probability(bm, 2 * kPi * 2.5e3)).epsilon(1e-12));
  CHECK(s.stddev == 0.0);
}

TEST_CASE("averaged transfer around resonance sits between the endpoints") {
  const auto bm = PulseShape::blackman(64.8e-6);
  const double sigma = 2 * kPi * 0.5e3;
  const auto s = averaged_transfer(bm, 0.0, sigma);
  CHECK(s.mean < 1.0);
  CHECK(s.mean > transfer_probability(bm, sigma));
  const auto [mc_mean, mc_std] = monte_carlo_average(64.8e-6, 0.0, sigma, 100000);
  CHECK(std::abs(s.mean - mc_mean) < 2e-4);
  CHECK(std::abs(s.stddev - mc_std) < 2e-4);
}

TEST_CASE("averaged transfer at the AC-Stark detuning agrees with Monte-Carlo") {
  const auto bm = PulseShape::blackman(64.8e-6);
  const auto s = averaged_transfer(bm, 2 * kPi * 2.5e3, 2 * kPi * 0.5e3);
  const auto [mc_mean, mc_std] = monte_carlo_average(64.8e-6, 2 * kPi * 2.5e3, 2 * kPi * 0.5e3, 100000);
  CHECK(std::abs(s.mean - mc_mean) < 3e-4);
  CHECK(std::abs(s.stddev - mc_std) < 3e-4);
  // frozen oracle values
  CHECK(s.mean == doctest::Approx(0.96937).epsilon(5e-5));
  CHECK(s.stddev == doctest::Approx(0.01172).epsilon(2e-3));
}

TEST_CASE("transfer is symmetric in the detuning sign") {
  const auto bm = PulseShape::blackman(64.8e-6);
  for (double hz : {1.3e3, 9e3, 31e3}) {
    CHECK(transfer_probability(bm, 2 * kPi * hz) ==
          doctest::Approx(transfer_probability(bm, -2 * kPi * hz)).epsilon(1e-8));
  }
}

TEST_CASE("g_bm is monotone and bounded for pulse lengths from 1 us to 1 ms") {
  for (double tau : {1e-6, 60e-6, 1e-3}) {
    const auto bm = PulseShape::blackman(tau);
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double g = sensitivity_gbm(bm, tau * k / 200.0);
      CHECK(g >= prev);
      CHECK(g <= 1.0);
      prev = g;
    }
    CHECK(accumulated_area(bm, tau) == doctest::Approx(kPi / 2).epsilon(1e-15));
  }
}
