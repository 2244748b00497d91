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

#include "sqgrav/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "sqgrav/rng.hpp"
#include "sqgrav/squeezing.hpp"

namespace sqgrav {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_phase(double phi) {
  phi = std::remainder(phi, 2.0 * kPi);
  return phi <= -kPi ? phi + 2.0 * kPi : phi;
}

struct FitProblem {
  Eigen::VectorXd u;  // centered alpha / k_eff
  Eigen::VectorXd p;

  // params: offset, amplitude, scale, centered phase
  Eigen::VectorXd residual(const Eigen::Vector4d& q) const {
    return p - (q[0] + q[1] * (q[2] * u.array() + q[3]).cos()).matrix();
  }
  Eigen::MatrixXd jacobian(const Eigen::Vector4d& q) const {
    Eigen::MatrixXd j(u.size(), 4);
    const Eigen::ArrayXd arg = q[2] * u.array() + q[3];
    j.col(0).setOnes();
    j.col(1) = arg.cos().matrix();
    j.col(2) = (-q[1] * u.array() * arg.sin()).matrix();
    j.col(3) = (-q[1] * arg.sin()).matrix();
    return j;
  }
};

// Best linear fit of offset + a cos(s u) + b sin(s u) at fixed s.
std::pair<double, Eigen::Vector4d> scan_candidate(const FitProblem& prob, double s) {
  Eigen::MatrixXd design(prob.u.size(), 3);
  design.col(0).setOnes();
  design.col(1) = (s * prob.u.array()).cos().matrix();
  design.col(2) = (s * prob.u.array()).sin().matrix();
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(prob.p);
  const double cost = (prob.p - design * coef).squaredNorm();
  // a cos + b sin = A cos(s u + phi) with A cos phi = a, -A sin phi = b.
  Eigen::Vector4d q(coef[0], std::hypot(coef[1], coef[2]), s, std::atan2(-coef[2], coef[1]));
  return {cost, q};
}

}  // namespace

double FringeFit::scale_sigma() const { return std::sqrt(std::max(0.0, covariance(2, 2))); }

double FringeFit::operator()(double alpha, const PhysicalConstants& constants) const {
  return offset + amplitude * std::cos(scale * alpha / constants.k_eff + phase0);
}

FringeFit fit_fringe(std::span<const FringePoint> points, const PhysicalConstants& constants,
                     const FitOptions& options) {
  constants.validate();
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 8) throw DomainError("fit_fringe: need at least 8 points");

  std::vector<double> xs(points.size());
  FitProblem prob{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    xs[i] = points[i].alpha / constants.k_eff;
    prob.p[i] = points[i].p;
  }
  const auto [min_it, max_it] = std::minmax_element(xs.begin(), xs.end());
  const double x_min = *min_it;
  const double x_max = *max_it;
  const double span = x_max - x_min;
  if (!(span > 0.0)) throw DomainError("fit_fringe: chirp rates span a zero range");
  const double center = 0.5 * (x_min + x_max);
  for (Eigen::Index i = 0; i < n; ++i) prob.u[i] = xs[i] - center;

  FringeFit result;
  result.alpha_min = x_min * constants.k_eff;
  result.alpha_max = x_max * constants.k_eff;

  // Frequency scan from one period over the span up to the Nyquist limit of
  // the mean sample spacing.
  const double s_min = 2.0 * kPi / span;
  const double s_max = std::max(s_min, kPi * double(n - 1) / span);
  const double ds = kPi / (8.0 * span);
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Vector4d q = Eigen::Vector4d::Zero();
  for (double s = s_min; s <= s_max + 0.5 * ds; s += ds) {
    const auto [cost, cand] = scan_candidate(prob, s);
    if (cost < best_cost) {
      best_cost = cost;
      q = cand;
    }
  }
  const double p_scale = std::max(1.0, prob.p.cwiseAbs().maxCoeff());
  if (!(q[1] > 1e-9 * p_scale)) {
    result.offset = q[0];
    throw FitError("fit_fringe: degenerate data (no oscillating component)", result);
  }

  // Levenberg-Marquardt refinement.
  double cost = prob.residual(q).squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    const Eigen::MatrixXd j = prob.jacobian(q);
    const Eigen::VectorXd r = prob.residual(q);
    const Eigen::Matrix4d jtj = j.transpose() * j;
    const Eigen::Vector4d g = j.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix4d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::Vector4d step = damped.ldlt().solve(g);
      const Eigen::Vector4d trial = q + step;
      const double trial_cost = prob.residual(trial).squaredNorm();
      if (trial_cost <= cost) {
        q = trial;
        const double previous = cost;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (step.norm() < options.step_tolerance ||
            previous - trial_cost <= 1e-15 * std::max(previous, 1e-300)) {
          converged = true;
        }
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) {
          // No descent direction left: at a minimum to machine precision.
          converged = true;
          accepted = true;
        }
      }
    }
  }

  // Canonical form: amplitude >= 0, scale <= 0.
  if (q[1] < 0.0) {
    q[1] = -q[1];
    q[3] += kPi;
  }
  if (q[2] > 0.0) {
    q[2] = -q[2];
    q[3] = -q[3];
  }
  q[3] = wrap_phase(q[3]);

  const Eigen::VectorXd r = prob.residual(q);
  result.offset = q[0];
  result.amplitude = q[1];
  result.scale = q[2];
  result.phase0 = wrap_phase(q[3] - q[2] * center);
  result.residual_rms = std::sqrt(r.squaredNorm() / double(n));
  result.iterations = iter;

  const Eigen::MatrixXd j = prob.jacobian(q);
  const double dof = double(n - 4);
  const double sigma2 = dof > 0 ? r.squaredNorm() / dof : 0.0;
  Eigen::Matrix4d info = j.transpose() * j;
  Eigen::Matrix4d centered_cov = sigma2 * info.ldlt().solve(Eigen::Matrix4d::Identity());
  // phase0 = phi_c - scale * center.
  Eigen::Matrix4d transform = Eigen::Matrix4d::Identity();
  transform(3, 2) = -center;
  result.covariance = transform * centered_cov * transform.transpose();

  if (!converged) {
    std::ostringstream msg;
    msg << "fit_fringe: no convergence after " << options.max_iterations
        << " iterations (rms residual " << result.residual_rms << ")";
    throw FitError(msg.str(), result);
  }
  return result;
}

FringeCrossing fringe_intersection(std::span<const FringeFit> fits,
                                   const PhysicalConstants& constants) {
  if (fits.size() < 2) throw DomainError("fringe_intersection: need at least two fits");
  bool distinct = false;
  for (const auto& f : fits) {
    if (std::abs(f.scale - fits[0].scale) > 1e-9 * std::abs(fits[0].scale)) distinct = true;
    if (f.scale == 0.0) throw DomainError("fringe_intersection: zero scale");
  }
  if (!distinct) throw DomainError("fringe_intersection: parallel fringes (equal scales)");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& f : fits) {
    lo = std::min(lo, f.alpha_min / constants.k_eff);
    hi = std::max(hi, f.alpha_max / constants.k_eff);
  }
  const auto ref = std::min_element(fits.begin(), fits.end(), [](const auto& a, const auto& b) {
    return std::abs(a.scale) < std::abs(b.scale);
  });

  // Mid-fringe roots: scale x + phase0 = pi/2 + n pi; slope sign -A s (-1)^n.
  auto root = [](const FringeFit& f, long k) { return (kPi / 2 + kPi * double(k) - f.phase0) / f.scale; };
  auto slope_sign = [](const FringeFit& f, long k) {
    return -f.amplitude * f.scale * ((k % 2 == 0) ? 1.0 : -1.0) > 0 ? 1 : -1;
  };

  const long k_a = std::lround((ref->scale * lo + ref->phase0 - kPi / 2) / kPi);
  const long k_b = std::lround((ref->scale * hi + ref->phase0 - kPi / 2) / kPi);
  double best_cost = std::numeric_limits<double>::infinity();
  FringeCrossing best;
  bool found = false;
  for (long k = std::min(k_a, k_b) - 1; k <= std::max(k_a, k_b) + 1; ++k) {
    const double x_ref = root(*ref, k);
    if (x_ref < lo || x_ref > hi) continue;
    const int sign = slope_sign(*ref, k);
    std::vector<double> roots;
    std::vector<double> weights;
    bool have_cov = true;
    for (const auto& f : fits) {
      long m = std::lround((f.scale * x_ref + f.phase0 - kPi / 2) / kPi);
      if (slope_sign(f, m) != sign) {
        m = std::abs(root(f, m - 1) - x_ref) < std::abs(root(f, m + 1) - x_ref) ? m - 1 : m + 1;
      }
      const double x = root(f, m);
      roots.push_back(x);
      // var(x) from (scale, phase0): dx/ds = -x/s, dx/dphi = -1/s.
      const double ds = -x / f.scale;
      const double dp = -1.0 / f.scale;
      const double var = ds * ds * f.covariance(2, 2) + 2 * ds * dp * f.covariance(2, 3) +
                         dp * dp * f.covariance(3, 3);
      if (!(var > 0.0)) have_cov = false;
      weights.push_back(var);
    }
    for (std::size_t i = 0; i < fits.size(); ++i) {
      weights[i] = have_cov ? 1.0 / weights[i] : fits[i].scale * fits[i].scale;
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    double x_star = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) x_star += weights[i] * roots[i];
    x_star /= wsum;
    // Candidates are ranked by phase mismatch so selection does not depend on noise weights.
    double cost = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      cost += std::pow(fits[i].scale * (roots[i] - x_star), 2);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best.acceleration = x_star;
      best.alpha = x_star * constants.k_eff;
      best.sigma_alpha = have_cov ? constants.k_eff / std::sqrt(wsum) : 0.0;
      found = true;
    }
  }
  if (!found) throw DomainError("fringe_intersection: no mid-fringe crossing inside the scan");
  return best;
}

PairedShots pair_shots(std::span<const ShotRecord> shots) {
  PairedShots out;
  if (shots.size() < 2) {
    out.dropped_odd = shots.size();
    return out;
  }
  out.t1 = shots[0].big_t;
  out.t2 = shots[1].big_t;
  if (out.t1 == out.t2) throw DomainError("pair_shots: first two shots share the same T");
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const double expected = i % 2 == 0 ? out.t1 : out.t2;
    if (shots[i].big_t != expected) {
      std::ostringstream msg;
      msg << "pair_shots: shot " << shots[i].index << " at position " << i
          << " breaks the T1/T2 alternation";
      throw DomainError(msg.str());
    }
  }
  for (std::size_t i = 0; i + 1 < shots.size(); i += 2) {
    if (shots[i].atoms() == 0 || shots[i + 1].atoms() == 0) {
      ++out.skipped_empty;
      continue;
    }
    out.pairs.emplace_back(shots[i], shots[i + 1]);
  }
  out.dropped_odd = shots.size() % 2;
  return out;
}

std::vector<double> DeltaPSeries::values() const {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.delta_p);
  return v;
}

double DeltaPSeries::mean() const {
  if (samples.empty()) throw DomainError("delta_p series is empty");
  double sum = 0.0;
  for (const auto& s : samples) sum += s.delta_p;
  return sum / double(samples.size());
}

double DeltaPSeries::standard_error() const {
  if (samples.size() < 2) throw DomainError("delta_p standard error needs >= 2 pairs");
  const double m = mean();
  double ss = 0.0;
  for (const auto& s : samples) ss += (s.delta_p - m) * (s.delta_p - m);
  return std::sqrt(ss / double(samples.size() - 1) / double(samples.size()));
}

DeltaPSeries delta_p(std::span<const ShotRecord> shots) {
  const PairedShots paired = pair_shots(shots);
  DeltaPSeries series;
  series.dropped_odd = paired.dropped_odd;
  series.skipped_empty = paired.skipped_empty;
  series.samples.reserve(paired.pairs.size());
  for (const auto& [a, b] : paired.pairs) series.samples.push_back({a.wall_time, a.p() - b.p()});
  return series;
}

GravityEstimate estimate_g(double delta_p_mean, double delta_p_stderr, std::int64_t n_pairs,
                           double contrast, double s1, double s2, double alpha,
                           const PhysicalConstants& constants,
                           const std::optional<GravityInputUncertainty>& full) {
  if (s1 == s2) throw DomainError("estimate_g: S1 equals S2");
  if (!(contrast > 0.0 && contrast <= 1.0)) throw DomainError("estimate_g: contrast outside (0, 1]");
  const double ds = s1 - s2;
  const double residual = 2.0 / contrast * delta_p_mean / ds;
  double var = std::pow(2.0 / contrast / ds * delta_p_stderr, 2);
  if (full) {
    var += std::pow(residual / contrast * full->contrast, 2) +
           std::pow(residual / ds * full->scale_t1, 2) + std::pow(residual / ds * full->scale_t2, 2);
  }
  return {residual + alpha / constants.k_eff, std::sqrt(var), delta_p_mean, n_pairs};
}

GravityEstimate estimate_g(const DeltaPSeries& series, double contrast, double s1, double s2,
                           double alpha, const PhysicalConstants& constants,
                           const std::optional<GravityInputUncertainty>& full) {
  return estimate_g(series.mean(), series.standard_error(),
                    static_cast<std::int64_t>(series.samples.size()), contrast, s1, s2, alpha,
                    constants, full);
}

namespace {

struct PairMoments {
  std::vector<double> diff;  // Jz(T1) - Jz(T2)
  std::vector<double> atoms1;
  std::vector<double> atoms2;
};

double xi_m_from(const PairMoments& m, const std::vector<std::size_t>& idx, double contrast,
                 bool per_pair) {
  const double n = double(idx.size());
  double mean = 0.0, n1 = 0.0, n2 = 0.0;
  for (auto i : idx) {
    const double d = per_pair ? m.diff[i] / std::sqrt(m.atoms1[i] + m.atoms2[i]) : m.diff[i];
    mean += d;
    n1 += m.atoms1[i];
    n2 += m.atoms2[i];
  }
  mean /= n;
  double ss = 0.0;
  for (auto i : idx) {
    const double d = per_pair ? m.diff[i] / std::sqrt(m.atoms1[i] + m.atoms2[i]) : m.diff[i];
    ss += (d - mean) * (d - mean);
  }
  const double var = ss / (n - 1.0);
  const double denom = per_pair ? 1.0 : (n1 + n2) / n;
  return 4.0 / (contrast * contrast) * var / denom;
}

}  // namespace

MetrologicalSqueezing metrological_squeezing(std::span<const ShotRecord> shots, double contrast,
                                             const MetrologicalOptions& options) {
  if (!(contrast > 0.0 && contrast <= 1.0)) {
    throw DomainError("metrological_squeezing: contrast outside (0, 1]");
  }
  const PairedShots paired = pair_shots(shots);
  const std::size_t n = paired.pairs.size();
  if (n < 2) throw DomainError("metrological_squeezing: need at least 2 pairs");

  PairMoments m;
  for (const auto& [a, b] : paired.pairs) {
    m.diff.push_back(a.jz - b.jz);
    m.atoms1.push_back(double(a.atoms()));
    m.atoms2.push_back(double(b.atoms()));
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  MetrologicalSqueezing out;
  out.n_pairs = n;
  out.linear = xi_m_from(m, all, contrast, options.per_pair_atoms);
  out.db = to_db(out.linear);
  out.mean_atoms_t1 = std::accumulate(m.atoms1.begin(), m.atoms1.end(), 0.0) / double(n);
  out.mean_atoms_t2 = std::accumulate(m.atoms2.begin(), m.atoms2.end(), 0.0) / double(n);
  {
    const double mean = std::accumulate(m.diff.begin(), m.diff.end(), 0.0) / double(n);
    double ss = 0.0;
    for (double d : m.diff) ss += (d - mean) * (d - mean);
    out.var_difference = ss / double(n - 1);
  }

  out.ci_low_db = out.ci_high_db = out.db;
  if (options.bootstrap_resamples > 0) {
    std::vector<double> resampled;
    resampled.reserve(options.bootstrap_resamples);
    std::vector<std::size_t> idx(n);
    for (std::size_t b = 0; b < options.bootstrap_resamples; ++b) {
      RngStream stream(options.seed, b);
      for (auto& i : idx) i = static_cast<std::size_t>(stream.below(n));
      resampled.push_back(to_db(xi_m_from(m, idx, contrast, options.per_pair_atoms)));
    }
    std::sort(resampled.begin(), resampled.end());
    const double tail = 0.5 * (1.0 - options.confidence);
    auto quantile = [&](double q) {
      const double pos = q * double(resampled.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, resampled.size() - 1);
      return resampled[lo] + (pos - double(lo)) * (resampled[hi] - resampled[lo]);
    };
    out.ci_low_db = quantile(tail);
    out.ci_high_db = quantile(1.0 - tail);
  }
  return out;
}

AllanSeries allan_deviation(std::span<const double> series, double tau0) {
  const auto count = static_cast<std::int64_t>(series.size());
  if (count < 16) throw DomainError("allan_deviation: need at least 16 samples");
  if (!(tau0 > 0.0)) throw DomainError("allan_deviation: tau0 must be > 0");

  // prefix[i] = x_0 + ... + x_{i-1}; the mean is removed first to limit cancellation.
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / double(count);
  std::vector<double> prefix(series.size() + 1, 0.0);
  for (std::size_t i = 0; i < series.size(); ++i) prefix[i + 1] = prefix[i] + (series[i] - mean);

  AllanSeries out;
  out.n_samples = count;
  out.tau0 = tau0;
  for (std::int64_t m = 1; m <= count / 3; m *= 2) {
    const std::int64_t terms = count - 2 * m + 1;
    double sum = 0.0;
    for (std::int64_t j = 0; j < terms; ++j) {
      const double later = prefix[j + 2 * m] - prefix[j + m];
      const double earlier = prefix[j + m] - prefix[j];
      sum += (later - earlier) * (later - earlier);
    }
    const double adev = std::sqrt(sum / (2.0 * double(m) * double(m) * double(terms)));
    const double dof = std::max(1.0, double(count) / double(m) - 1.0);
    out.m.push_back(m);
    out.tau.push_back(double(m) * tau0);
    out.adev.push_back(adev);
    out.err.push_back(adev / std::sqrt(dof));
  }
  return out;
}

double white_noise_coefficient(const AllanSeries& series, double tau_max) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < series.tau.size(); ++k) {
    if (series.tau[k] > tau_max) break;
    const double w = series.err[k] > 0.0 ? 1.0 / (series.err[k] * series.err[k]) : 1.0;
    num += w * series.adev[k] / std::sqrt(series.tau[k]);
    den += w / series.tau[k];
  }
  if (den == 0.0) throw DomainError("white_noise_coefficient: no points below tau_max");
  return num / den;
}

double time_to_instability_ratio(const AllanSeries& slow, const AllanSeries& fast,
                                 double tau_max) {
  const double ratio = white_noise_coefficient(slow, tau_max) / white_noise_coefficient(fast, tau_max);
  return ratio * ratio;
}

PhaseNoiseBudget phase_noise_budget(double sigma_phi, double atoms) {
  if (!(atoms > 0.0)) throw DomainError("phase_noise_budget: atoms must be > 0");
  if (!(sigma_phi >= 0.0)) throw DomainError("phase_noise_budget: sigma_phi must be >= 0");
  PhaseNoiseBudget out;
  out.delta_jz = 0.5 * atoms * sigma_phi;
  if (sigma_phi > 0.0) out.db_vs_sql = to_db(atoms * sigma_phi * sigma_phi);
  return out;
}

CampaignAnalysis analyze_campaign(std::span<const ShotRecord> shots, double contrast,
                                  const SequenceTiming& timing,
                                  const PhysicalConstants& constants,
                                  const MetrologicalOptions& options) {
  if (shots.empty()) throw DataError("analyze: no shot records");
  CampaignAnalysis out;
  out.delta_p = delta_p(shots);
  if (out.delta_p.samples.size() < 2) throw DataError("analyze: fewer than 2 usable pairs");
  const PairedShots paired = pair_shots(shots);
  out.scale_t1 = scale_factor(timing.with_big_t(paired.t1), constants);
  out.scale_t2 = scale_factor(timing.with_big_t(paired.t2), constants);
  out.gravity = estimate_g(out.delta_p, contrast, out.scale_t1, out.scale_t2, shots.front().alpha,
                           constants);
  out.squeezing = metrological_squeezing(shots, contrast, options);
  return out;
}

}  // namespace sqgrav
