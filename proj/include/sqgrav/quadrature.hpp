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

// Globally adaptive Gauss-Kronrod (7/15) quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "sqgrav/errors.hpp"

namespace sqgrav {

template <typename Scalar>
struct QuadratureResult {
  Scalar value{};
  Scalar error{};
  int intervals = 0;
};

template <typename Scalar>
struct QuadratureOptions {
  Scalar abs_tol = Scalar(1e-12);
  Scalar rel_tol = Scalar(1e-12);
  int max_intervals = 2000;
};

namespace detail {

// Kronrod abscissae on [-1, 1]; even indices are shared with the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Segment {
  Scalar a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename Scalar, typename F>
Segment<Scalar> gauss_kronrod_15(F& f, Scalar a, Scalar b) {
  const Scalar center = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar fc = f(center);
  Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
  Scalar gauss = fc * Scalar(kGaussWeights[3]);
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = half * Scalar(kKronrodNodes[j]);
    const Scalar sum = f(center - dx) + f(center + dx);
    kronrod += Scalar(kKronrodWeights[j]) * sum;
    if (j % 2 == 1) gauss += Scalar(kGaussWeights[j / 2]) * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [a, b], bisecting the worst segment until the summed error
/// estimate drops below max(abs_tol, rel_tol * |I|).
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b,
                                            const QuadratureOptions<Scalar>& options = {}) {
  if (a == b) return {Scalar(0), Scalar(0), 0};
  std::priority_queue<detail::Segment<Scalar>> queue;
  auto first = detail::gauss_kronrod_15(f, a, b);
  Scalar total = first.value;
  Scalar error = first.error;
  queue.push(first);
  int intervals = 1;
  // Rounding floor: errors below a few ulps of |I| cannot be resolved further.
  auto target = [&] {
    return std::max({options.abs_tol, options.rel_tol * std::abs(total),
                     Scalar(50) * std::numeric_limits<Scalar>::epsilon() * std::abs(total)});
  };
  while (error > target()) {
    if (intervals >= options.max_intervals) {
      throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]: error estimate " + std::to_string(error) +
                           " after " + std::to_string(intervals) + " intervals");
    }
    const auto worst = queue.top();
    queue.pop();
    const Scalar mid = (worst.a + worst.b) / 2;
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++intervals;
  }
  // Re-sum from the leaves to shed accumulated cancellation in the running total.
  Scalar sum = 0;
  Scalar err = 0;
  while (!queue.empty()) {
    sum += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  return {sum, err, intervals};
}

/// Integrates piecewise-smooth f, splitting at the given ascending breakpoints.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_piecewise(F&& f, const std::vector<Scalar>& breakpoints,
                                             const QuadratureOptions<Scalar>& options = {}) {
  QuadratureResult<Scalar> result;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto part = integrate_adaptive(f, breakpoints[i], breakpoints[i + 1], options);
    result.value += part.value;
    result.error += part.error;
    result.intervals += part.intervals;
  }
  return result;
}

}  // namespace sqgrav
