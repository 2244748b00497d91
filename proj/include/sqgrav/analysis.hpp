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

// Estimation chain from shot records to gravity, metrological squeezing and
// Allan deviations.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sqgrav/errors.hpp"
#include "sqgrav/sensitivity.hpp"
#include "sqgrav/shots.hpp"

namespace sqgrav {

struct FringePoint {
  double alpha = 0.0;  // rad/s^2
  double p = 0.0;
};

/// p(alpha) = offset + amplitude * cos(scale * alpha / k_eff + phase0).
/// Canonical form: amplitude >= 0, scale <= 0, phase0 in (-pi, pi].
/// For the mid-fringe shot model, scale = -S(T).
struct FringeFit {
  double offset = 0.0;
  double amplitude = 0.0;
  double scale = 0.0;   // s^2/m
  double phase0 = 0.0;  // rad
  double residual_rms = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // (offset, amplitude, scale, phase0)
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  int iterations = 0;

  double contrast() const { return 2.0 * amplitude; }
  double scale_sigma() const;
  double operator()(double alpha, const PhysicalConstants& constants) const;
};

class FitError : public NumericalError {
 public:
  FitError(const std::string& what, FringeFit best) : NumericalError(what), best_(best) {}
  const FringeFit& best_so_far() const { return best_; }

 private:
  FringeFit best_;
};

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;
};

/// Least-squares fringe fit: frequency scan for initialization, then damped
/// Gauss-Newton (Levenberg-Marquardt) refinement.
FringeFit fit_fringe(std::span<const FringePoint> points, const PhysicalConstants& constants,
                     const FitOptions& options = {});

struct FringeCrossing {
  double alpha = 0.0;        // rad/s^2
  double sigma_alpha = 0.0;  // rad/s^2, zero when the fits carry no covariance
  double acceleration = 0.0; // alpha / k_eff
};

/// Common mid-fringe crossing of two or more fringes.
FringeCrossing fringe_intersection(std::span<const FringeFit> fits,
                                   const PhysicalConstants& constants);

/// Consecutive (T1, T2) pairs in acquisition order.
struct PairedShots {
  std::vector<std::pair<ShotRecord, ShotRecord>> pairs;
  double t1 = 0.0;
  double t2 = 0.0;
  std::size_t dropped_odd = 0;    // trailing unpaired shot
  std::size_t skipped_empty = 0;  // pairs dropped for a zero-atom shot
};

/// Throws DomainError when the records do not alternate T1, T2 starting with T1.
PairedShots pair_shots(std::span<const ShotRecord> shots);

struct DeltaPSample {
  double wall_time = 0.0;
  double delta_p = 0.0;
};

struct DeltaPSeries {
  std::vector<DeltaPSample> samples;
  std::size_t dropped_odd = 0;
  std::size_t skipped_empty = 0;

  std::vector<double> values() const;
  double mean() const;
  double standard_error() const;
};

/// delta_p = p(T1) - p(T2) per consecutive pair.
DeltaPSeries delta_p(std::span<const ShotRecord> shots);

struct GravityEstimate {
  double g_exp = 0.0;
  double sigma_g = 0.0;
  double delta_p_mean = 0.0;
  std::int64_t n_pairs = 0;
};

/// Uncertainties of contrast and scale factors for full propagation.
struct GravityInputUncertainty {
  double contrast = 0.0;
  double scale_t1 = 0.0;
  double scale_t2 = 0.0;
};

/// g_exp = (2/C) delta_p / (S1 - S2) + alpha / k_eff, with signed scale factors.
GravityEstimate estimate_g(double delta_p_mean, double delta_p_stderr, std::int64_t n_pairs,
                           double contrast, double s1, double s2, double alpha,
                           const PhysicalConstants& constants,
                           const std::optional<GravityInputUncertainty>& full = std::nullopt);

GravityEstimate estimate_g(const DeltaPSeries& series, double contrast, double s1, double s2,
                           double alpha, const PhysicalConstants& constants,
                           const std::optional<GravityInputUncertainty>& full = std::nullopt);

struct MetrologicalOptions {
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t seed = 1;
  double confidence = 0.95;
  /// Normalize each pair difference by its own atom sum instead of the campaign means.
  bool per_pair_atoms = false;
};

struct MetrologicalSqueezing {
  double linear = 0.0;
  double db = 0.0;
  double ci_low_db = 0.0;
  double ci_high_db = 0.0;
  double var_difference = 0.0;  // Var(Jz(T1) - Jz(T2))
  double mean_atoms_t1 = 0.0;
  double mean_atoms_t2 = 0.0;
  std::size_t n_pairs = 0;
};

/// xi_M^2 = (4/C^2) Var(Jz(T1) - Jz(T2)) / (N(T1) + N(T2)) with a percentile
/// bootstrap interval over pairs.
MetrologicalSqueezing metrological_squeezing(std::span<const ShotRecord> shots, double contrast,
                                             const MetrologicalOptions& options = {});

struct AllanSeries {
  std::vector<double> tau;
  std::vector<double> adev;
  std::vector<double> err;
  std::vector<std::int64_t> m;
  std::int64_t n_samples = 0;
  double tau0 = 0.0;
};

/// Overlapping Allan deviation at octave-spaced m = 1, 2, 4, ... <= M/3.
AllanSeries allan_deviation(std::span<const double> series, double tau0);

/// h in adev(tau) = h / sqrt(tau), weighted fit over tau <= tau_max.
double white_noise_coefficient(const AllanSeries& series, double tau_max);

/// Ratio of averaging times the two series need to reach a common instability
/// in the white-noise regime: (h_slow / h_fast)^2.
double time_to_instability_ratio(const AllanSeries& slow, const AllanSeries& fast,
                                 double tau_max);

struct PhaseNoiseBudget {
  double delta_jz = 0.0;
  std::optional<double> db_vs_sql;  // empty when sigma_phi = 0 (negligible)

  bool negligible() const { return !db_vs_sql.has_value(); }
};

/// Delta J_z = (N/2) sigma_phi and its level relative to the SQL variance N/4.
PhaseNoiseBudget phase_noise_budget(double sigma_phi, double atoms);

/// Everything the `analyze` command reports for one campaign.
struct CampaignAnalysis {
  DeltaPSeries delta_p;
  GravityEstimate gravity;
  MetrologicalSqueezing squeezing;
  double scale_t1 = 0.0;
  double scale_t2 = 0.0;
};

CampaignAnalysis analyze_campaign(std::span<const ShotRecord> shots, double contrast,
                                  const SequenceTiming& timing,
                                  const PhysicalConstants& constants,
                                  const MetrologicalOptions& options = {});

}  // namespace sqgrav
