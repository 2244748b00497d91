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

// Adaptive Dormand-Prince 5(4) integrator for Eigen vector states.

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Core>

#include "sqgrav/errors.hpp"

namespace sqgrav {

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 selects (t1 - t0) / 100
  long max_steps = 1'000'000;
};

template <typename State>
struct OdeResult {
  State state;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// Integrates dy/dt = rhs(t, y) from t0 to t1 and returns y(t1).
/// Throws NumericalError when the step size collapses or max_steps is exceeded.
template <typename State, typename Rhs>
OdeResult<State> integrate_dopri5(Rhs&& rhs, State y, double t0, double t1,
                                  const OdeOptions& options = {}) {
  using std::abs;
  // Butcher tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeResult<State> result;
  const double span = t1 - t0;
  if (span == 0.0) {
    result.state = y;
    return result;
  }
  const double direction = span > 0 ? 1.0 : -1.0;
  double h = options.initial_step > 0 ? options.initial_step * direction : span / 100.0;
  double t = t0;
  State k1 = rhs(t, y);
  while (direction * (t1 - t) > 0) {
    if (result.accepted_steps + result.rejected_steps >= options.max_steps) {
      std::ostringstream msg;
      msg << "dopri5: exceeded " << options.max_steps << " steps at t = " << t << " (target "
          << t1 << ", last step " << h << ")";
      throw NumericalError(msg.str());
    }
    if (direction * (t + h - t1) > 0) h = t1 - t;
    const State k2 = rhs(t + c2 * h, (y + h * (a21 * k1)).eval());
    const State k3 = rhs(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = rhs(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 =
        rhs(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 =
        rhs(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(t + h, y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          options.abs_tol + options.rel_tol * std::max(abs(y[i]), abs(y_new[i]));
      const double ratio = abs(err[i]) / scale;
      norm += ratio * ratio;
    }
    norm = std::sqrt(norm / static_cast<double>(y.size()));

    if (norm <= 1.0) {
      t += h;
      y = y_new;
      k1 = k7;  // first-same-as-last
      ++result.accepted_steps;
    } else {
      ++result.rejected_steps;
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= factor;
    if (std::abs(h) < 1e-14 * std::abs(span)) {
      std::ostringstream msg;
      msg << "dopri5: step size underflow at t = " << t << " (error norm " << norm << ")";
      throw NumericalError(msg.str());
    }
  }
  result.state = y;
  return result;
}

}  // namespace sqgrav
