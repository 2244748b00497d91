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

// Gravimeter sensitivity function and scale factor.

#include <array>
#include <numbers>
#include <vector>

#include "sqgrav/pulse.hpp"

namespace sqgrav {

/// Epochs of the four-Raman-pulse sequence. All times in seconds.
struct SequenceTiming {
  double tau_bm = 60e-6;   // Raman pulse duration
  double t_sep = 77e-6;    // momentum-separation time between the pulses of a pair
  double big_t = 455e-6;   // free evolution between the two pulse pairs
  double t0 = 0.0;

  /// Throws ConfigError unless all durations are > 0 and breakpoints ascend.
  void validate() const;

  /// {t0, t0+tau, t0+tau+T_R, t0+2tau+T_R, ..., t0+4tau+2T_R+T}.
  std::array<double, 8> breakpoints() const;
  double end() const { return breakpoints().back(); }

  /// Same sequence with a different free-evolution time.
  SequenceTiming with_big_t(double t) const;
};

struct PhysicalConstants {
  /// Two counter-propagating photons on the Rb D2 line (780.241 nm).
  double k_eff = 4.0 * std::numbers::pi / 780.241e-9;  // 1/m

  void validate() const;
};

/// g_grav(t): zero outside the sequence, rises to +1 over the first pulse,
/// falls back to 0 over the second, to -1 over the third and back over the fourth.
double g_grav(const SequenceTiming& timing, double t);

/// Immutable evaluator bound to one timing.
class SensitivityProfile {
 public:
  explicit SensitivityProfile(const SequenceTiming& timing);

  double operator()(double t) const { return g_grav(timing_, t); }
  const SequenceTiming& timing() const { return timing_; }
  const std::array<double, 8>& breakpoints() const { return breakpoints_; }

 private:
  SequenceTiming timing_;
  std::array<double, 8> breakpoints_;
};

/// Integral of g_grav over the whole sequence (zero up to quadrature error).
double net_area(const SequenceTiming& timing);

/// Integral of g_grav over the positive lobe [t0, t0 + 2 tau + T_R].
double positive_lobe_area(const SequenceTiming& timing);

/// S(T) = -k_eff * integral of g_grav(t) (t - t0) dt, in s^2/m.
/// The sign is fixed so the result is positive for every valid timing.
double scale_factor(const SequenceTiming& timing, const PhysicalConstants& constants);

/// phi_sig = (g - alpha / k_eff) * S.
double phase_signal(double g, double alpha, double scale, const PhysicalConstants& constants);

}  // namespace sqgrav
