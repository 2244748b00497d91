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

// Monte-Carlo shot generation for the alternating two-T gravimeter protocol.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sqgrav/rng.hpp"
#include "sqgrav/sensitivity.hpp"
#include "sqgrav/squeezing.hpp"

namespace sqgrav {

/// Per-shot noise budget.
struct NoiseConfig {
  SqueezingModel squeezing;          // r = 0 for coherent input
  double contrast = 0.98;
  double raman_efficiency = 0.981;
  bool apply_raman_efficiency = false;  // C_eff = C * eps^4 when set
  double sigma_ac = 0.0;            // rad, differential AC-Stark phase
  double sigma_raman_phase = 0.0;   // rad
  double atom_number_mean = 6000;
  double atom_number_sigma = 0.0;
  double sigma_accel = 0.0;         // m/s^2, common vibration noise

  void validate() const;
  double effective_contrast() const;

  /// Calibrated squeezed-input budget (see config/defaults.yaml).
  static NoiseConfig squeezed_default();
  /// Same technical noise, squeezing generation omitted.
  static NoiseConfig coherent_default();
};

/// Phase-noise level (rad) that places a coherent-input campaign at the target
/// metrological squeezing above the two-measurement SQL, given the other channels.
/// Inverts predicted_metrological_squeezing for sigma_ac.
double calibrate_sigma_ac(const NoiseConfig& coherent, double target_db);

/// Expected xi_M^2 (linear) of a mid-fringe campaign under this budget.
double predicted_metrological_squeezing(const NoiseConfig& noise, double scale_t1 = 0.0,
                                        double scale_t2 = 0.0);

struct ShotRecord {
  std::int64_t index = 0;
  double big_t = 0.0;     // s
  double alpha = 0.0;     // rad/s^2
  double g_true = 0.0;    // m/s^2
  std::int64_t count_f1 = 0;
  std::int64_t count_f2 = 0;
  double jz = 0.0;        // (count_f2 - count_f1) / 2
  std::uint64_t stream_id = 0;
  double wall_time = 0.0;  // s

  std::int64_t atoms() const { return count_f1 + count_f2; }
  /// Normalized F = 2 population.
  double p() const { return double(count_f2) / double(atoms()); }

  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

struct CampaignConfig {
  double t1 = 455e-6;
  double t2 = 155e-6;
  double alpha = 9.8126 * PhysicalConstants{}.k_eff;  // rad/s^2
  double g_true = 9.812637196;                        // m/s^2
  std::int64_t n_pairs = 5000;
  double cycle_time = 52.0;  // s
  std::uint64_t seed = 7;

  void validate() const;
};

/// Geometry of one interferometer configuration with its precomputed scale factor.
struct ShotGeometry {
  SequenceTiming timing;
  double scale = 0.0;  // s^2/m

  static ShotGeometry from(const SequenceTiming& timing, const PhysicalConstants& constants);
};

/// One mid-fringe shot. `index` and `wall_time` are left at zero for the caller.
ShotRecord simulate_shot(const ShotGeometry& geometry, const PhysicalConstants& constants,
                         const NoiseConfig& noise, double g_true, double alpha, RngStream& stream);

ShotRecord simulate_shot(const SequenceTiming& timing, const PhysicalConstants& constants,
                         const NoiseConfig& noise, double g_true, double alpha, RngStream& stream);

/// 2 n_pairs shots alternating T1, T2. Shot i uses stream (seed, i); the result is
/// identical for any thread count.
std::vector<ShotRecord> run_campaign(const CampaignConfig& config, const SequenceTiming& timing,
                                     const PhysicalConstants& constants, const NoiseConfig& noise,
                                     unsigned threads = 1);

/// Net phase of a constant detuning over an echo sequence: +delta before the
/// echo pulse, -delta after.
double echo_cancellation_check(double detuning, double first_half, double second_half);

/// JSON-lines shot log, one object per line.
void write_shots_jsonl(std::ostream& out, const std::vector<ShotRecord>& shots);
std::vector<ShotRecord> read_shots_jsonl(std::istream& in);

}  // namespace sqgrav
