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

#include "sqgrav/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sqgrav/errors.hpp"
#include "sqgrav/gauss_hermite.hpp"

namespace sqgrav {

namespace {

constexpr double kPi = std::numbers::pi;

double fraction(const PulseShape& shape, double t) {
  if (!(t >= 0.0 && t <= shape.duration)) {
    std::ostringstream msg;
    msg << "pulse time " << t << " s outside [0, " << shape.duration << "]";
    throw DomainError(msg.str());
  }
  return t / shape.duration;
}

// 0.42 - 0.5 cos(2 pi x) + 0.08 cos(4 pi x), factored so that it is exactly
// non-negative and vanishes at both ends: 0.32 sin^2(pi x) (2.125 - cos(2 pi x)).
double blackman_window(double x) {
  if (x == 0.0 || x == 1.0) return 0.0;
  const double s = std::sin(kPi * x);
  return 0.32 * s * s * (2.125 - std::cos(2.0 * kPi * x));
}

// Integral of the raw window over [0, x], in units of the pulse duration.
double blackman_integral(double x) {
  if (x == 1.0) return 0.42;
  return 0.42 * x - std::sin(2.0 * kPi * x) / (4.0 * kPi) +
         0.08 * std::sin(4.0 * kPi * x) / (4.0 * kPi);
}

}  // namespace

PulseShape PulseShape::blackman(double duration, double target_area, double sensitivity_area) {
  PulseShape shape{PulseKind::Blackman, duration, target_area, sensitivity_area};
  shape.validate();
  return shape;
}

PulseShape PulseShape::square(double duration, double target_area, double sensitivity_area) {
  PulseShape shape{PulseKind::Square, duration, target_area, sensitivity_area};
  shape.validate();
  return shape;
}

void PulseShape::validate() const {
  if (!(duration > 0.0)) throw ConfigError("pulse duration must be > 0");
  if (!(target_area > 0.0)) throw ConfigError("pulse target area must be > 0");
  if (!(sensitivity_area > 0.0)) throw ConfigError("pulse sensitivity area must be > 0");
}

double envelope(const PulseShape& shape, double t) {
  const double x = fraction(shape, t);
  return shape.kind == PulseKind::Blackman ? blackman_window(x) : 1.0;
}

double mean_envelope(PulseKind kind) { return kind == PulseKind::Blackman ? 0.42 : 1.0; }

double rabi_rate(const PulseShape& shape, double t) {
  return shape.target_area / (mean_envelope(shape.kind) * shape.duration) * envelope(shape, t);
}

double accumulated_area(const PulseShape& shape, double t, double area) {
  const double x = fraction(shape, t);
  if (shape.kind == PulseKind::Square) return area * x;
  return area * blackman_integral(x) / 0.42;
}

double accumulated_area(const PulseShape& shape, double t) {
  return accumulated_area(shape, t, shape.sensitivity_area);
}

double sensitivity_gbm(const PulseShape& shape, double t) {
  if (shape.sensitivity_area > kPi / 2 * (1.0 + 1e-12)) {
    throw ConfigError("sensitivity area above pi/2 breaks the piecewise sensitivity profile");
  }
  return std::sin(accumulated_area(shape, t));
}

TwoLevelState propagate_pulse(const PulseShape& shape, double detuning,
                              const OdeOptions& options) {
  shape.validate();
  const double tau = shape.duration;
  const std::complex<double> minus_i(0.0, -1.0);
  // Dimensionless time s = t / tau keeps the step sizes O(1).
  auto rhs = [&](double s, const TwoLevelState& c) -> TwoLevelState {
    const double half_rabi = 0.5 * rabi_rate(shape, std::clamp(s, 0.0, 1.0) * tau);
    const double half_detuning = 0.5 * detuning;
    TwoLevelState d;
    d[0] = minus_i * tau * (-half_detuning * c[0] + half_rabi * c[1]);
    d[1] = minus_i * tau * (half_rabi * c[0] + half_detuning * c[1]);
    return d;
  };
  const TwoLevelState ground(1.0, 0.0);
  const auto result = integrate_dopri5(rhs, ground, 0.0, 1.0, options);
  const double norm = result.state.squaredNorm();
  if (std::abs(norm - 1.0) > 100.0 * options.rel_tol) {
    std::ostringstream msg;
    msg << "two-level propagation lost normalization: |psi|^2 = " << norm << " after "
        << result.accepted_steps << " steps (" << result.rejected_steps << " rejected)";
    throw NumericalError(msg.str());
  }
  return result.state;
}

double transfer_probability(const PulseShape& shape, double detuning, const OdeOptions& options) {
  return std::norm(propagate_pulse(shape, detuning, options)[1]);
}

double square_pulse_transfer(double duration, double area, double detuning) {
  const double rabi = area / duration;
  const double generalized = std::hypot(rabi, detuning);
  const double s = std::sin(generalized * duration / 2.0);
  return rabi * rabi / (generalized * generalized) * s * s;
}

TransferStatistics averaged_transfer(const PulseShape& shape, double detuning_mean,
                                     double detuning_sigma, int nodes,
                                     const OdeOptions& options) {
  if (detuning_sigma < 0.0) throw DomainError("detuning sigma must be >= 0");
  if (detuning_sigma == 0.0) return {transfer_probability(shape, detuning_mean, options), 0.0};
  const auto rule = gauss_hermite_normal<double>(nodes);
  std::vector<double> values(rule.nodes.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = transfer_probability(shape, detuning_mean + detuning_sigma * rule.nodes[i], options);
    mean += rule.weights[i] * values[i];
  }
  double variance = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    variance += rule.weights[i] * (values[i] - mean) * (values[i] - mean);
  }
  return {mean, std::sqrt(variance)};
}

}  // namespace sqgrav
