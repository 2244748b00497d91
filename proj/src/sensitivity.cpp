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

#include "sqgrav/sensitivity.hpp"

#include <algorithm>
#include <sstream>

#include "sqgrav/errors.hpp"
#include "sqgrav/quadrature.hpp"

namespace sqgrav {

namespace {

// Absolute quadrature tolerance is 1e-12 s on time integrals; the time-weighted
// integrand carries an extra factor of order 1e-3 s.
QuadratureOptions<double> area_options() { return {1e-15, 1e-13, 4000}; }

double gbm_at(const PulseShape& pulse, double t_in_pulse) {
  return sensitivity_gbm(pulse, std::clamp(t_in_pulse, 0.0, pulse.duration));
}

}  // namespace

void SequenceTiming::validate() const {
  if (!(tau_bm > 0.0)) throw ConfigError("tau_bm_s must be > 0");
  if (!(t_sep > 0.0)) throw ConfigError("t_sep_s must be > 0");
  if (!(big_t > 0.0)) throw ConfigError("big_t_s must be > 0");
  const auto b = breakpoints();
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (!(b[i] > b[i - 1])) throw ConfigError("sequence breakpoints are not strictly increasing");
  }
}

std::array<double, 8> SequenceTiming::breakpoints() const {
  const double tau = tau_bm;
  return {t0,
          t0 + tau,
          t0 + tau + t_sep,
          t0 + 2 * tau + t_sep,
          t0 + 2 * tau + t_sep + big_t,
          t0 + 3 * tau + t_sep + big_t,
          t0 + 3 * tau + 2 * t_sep + big_t,
          t0 + 4 * tau + 2 * t_sep + big_t};
}

SequenceTiming SequenceTiming::with_big_t(double t) const {
  SequenceTiming copy = *this;
  copy.big_t = t;
  return copy;
}

void PhysicalConstants::validate() const {
  if (!(k_eff > 0.0)) throw ConfigError("k_eff_per_m must be > 0");
}

double g_grav(const SequenceTiming& timing, double t) {
  const auto b = timing.breakpoints();
  if (t <= b[0] || t >= b[7]) return 0.0;
  const PulseShape pulse{PulseKind::Blackman, timing.tau_bm, std::numbers::pi,
                         std::numbers::pi / 2};
  if (t < b[1]) return gbm_at(pulse, t - b[0]);
  if (t <= b[2]) return 1.0;
  if (t < b[3]) return 1.0 - gbm_at(pulse, t - b[2]);
  if (t <= b[4]) return 0.0;
  if (t < b[5]) return -gbm_at(pulse, t - b[4]);
  if (t <= b[6]) return -1.0;
  return -1.0 + gbm_at(pulse, t - b[6]);
}

SensitivityProfile::SensitivityProfile(const SequenceTiming& timing)
    : timing_(timing), breakpoints_(timing.breakpoints()) {
  timing_.validate();
}

double net_area(const SequenceTiming& timing) {
  timing.validate();
  const auto b = timing.breakpoints();
  const std::vector<double> cuts(b.begin(), b.end());
  return integrate_piecewise([&](double t) { return g_grav(timing, t); }, cuts, area_options())
      .value;
}

double positive_lobe_area(const SequenceTiming& timing) {
  timing.validate();
  const auto b = timing.breakpoints();
  const std::vector<double> cuts(b.begin(), b.begin() + 4);
  return integrate_piecewise([&](double t) { return g_grav(timing, t); }, cuts, area_options())
      .value;
}

double scale_factor(const SequenceTiming& timing, const PhysicalConstants& constants) {
  timing.validate();
  constants.validate();
  const auto b = timing.breakpoints();
  const std::vector<double> cuts(b.begin(), b.end());
  const double weighted = integrate_piecewise(
                              [&](double t) { return g_grav(timing, t) * (t - timing.t0); },
                              cuts, area_options())
                              .value;
  return -constants.k_eff * weighted;
}

double phase_signal(double g, double alpha, double scale, const PhysicalConstants& constants) {
  return (g - alpha / constants.k_eff) * scale;
}

}  // namespace sqgrav
