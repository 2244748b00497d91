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

#pragma once

// Raman pulse mathematics: envelopes, accumulated pulse area, the single-pulse
// sensitivity function and two-level transfer efficiency.

#include <complex>
#include <numbers>

#include <Eigen/Core>

#include "sqgrav/ode.hpp"

namespace sqgrav {

enum class PulseKind { Blackman, Square };

/// A single pulse. The physical rotation angle (`target_area`) and the area
/// used inside the sensitivity function (`sensitivity_area`) are kept apart:
/// the gravimeter profile needs g_bm to end at 1, which fixes the latter to pi/2
/// while the Raman pulses themselves are pi pulses.
struct PulseShape {
  PulseKind kind = PulseKind::Blackman;
  double duration = 60e-6;  // s
  double target_area = std::numbers::pi;
  double sensitivity_area = std::numbers::pi / 2;

  static PulseShape blackman(double duration, double target_area = std::numbers::pi,
                             double sensitivity_area = std::numbers::pi / 2);
  static PulseShape square(double duration, double target_area = std::numbers::pi,
                           double sensitivity_area = std::numbers::pi / 2);

  /// Throws ConfigError unless all durations and areas are positive.
  void validate() const;
};

/// Two-level amplitudes (ground, excited).
using TwoLevelState = Eigen::Vector2cd;

/// Peak-normalized envelope at time t in [0, duration].
double envelope(const PulseShape& shape, double t);

/// Mean of the peak-normalized envelope over the pulse (0.42 for Blackman).
double mean_envelope(PulseKind kind);

/// Rabi rate Omega(t) in rad/s scaled so the pulse area equals target_area.
double rabi_rate(const PulseShape& shape, double t);

/// Integral of the envelope from 0 to t, scaled so the value at t = duration is
/// exactly `area`. Closed form.
double accumulated_area(const PulseShape& shape, double t, double area);

/// accumulated_area with the sensitivity area.
double accumulated_area(const PulseShape& shape, double t);

/// g_bm(t) = sin(accumulated sensitivity area). Requires sensitivity_area <= pi/2.
double sensitivity_gbm(const PulseShape& shape, double t);

/// Integrates the two-level Schroedinger equation through the pulse with
/// constant detuning (rad/s) from the ground state.
TwoLevelState propagate_pulse(const PulseShape& shape, double detuning,
                              const OdeOptions& options = {});

/// Excited-state population after the pulse.
double transfer_probability(const PulseShape& shape, double detuning,
                            const OdeOptions& options = {});

/// Closed-form Rabi transfer for a square pulse of the given area.
double square_pulse_transfer(double duration, double area, double detuning);

struct TransferStatistics {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Transfer probability averaged over a Gaussian detuning distribution with
/// Gauss-Hermite quadrature.
TransferStatistics averaged_transfer(const PulseShape& shape, double detuning_mean,
                                     double detuning_sigma, int nodes = 32,
                                     const OdeOptions& options = {});

}  // namespace sqgrav
