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

// Dense matrix exponential by scaling and squaring with diagonal Pade
// approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace sqgrav {

namespace detail {

template <typename Derived>
double one_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename Matrix, std::size_t K>
Matrix pade_low_order(const Matrix& a, const std::array<double, K>& b) {
  using Scalar = typename Matrix::Scalar;
  const Eigen::Index n = a.rows();
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = identity;
  Matrix u_inner = Matrix::Zero(n, n);
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t j = 0; j + 1 < K; j += 2) {
    v += Scalar(b[j]) * power;
    u_inner += Scalar(b[j + 1]) * power;
    power = (power * a2).eval();
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

template <typename Matrix>
Matrix pade13(const Matrix& a) {
  using Scalar = typename Matrix::Scalar;
  constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_tail = Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2;
  const Matrix u = a * (a6 * u_tail + Scalar(b[7]) * a6 + Scalar(b[5]) * a4 +
                        Scalar(b[3]) * a2 + Scalar(b[1]) * identity);
  const Matrix v_tail = Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2;
  const Matrix v = a6 * v_tail + Scalar(b[6]) * a6 + Scalar(b[4]) * a4 + Scalar(b[2]) * a2 +
                   Scalar(b[0]) * identity;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(A) for a square dense matrix of any real or complex scalar type.
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& input) {
  using Matrix = typename Derived::PlainObject;
  using RealScalar = typename Derived::RealScalar;
  eigen_assert(input.rows() == input.cols());
  const Matrix a = input;
  const double norm = detail::one_norm(a);

  constexpr double theta3 = 1.495585217958292e-2;
  constexpr double theta5 = 2.539398330063230e-1;
  constexpr double theta7 = 9.504178996162932e-1;
  constexpr double theta9 = 2.097847961257068e0;
  constexpr double theta13 = 5.371920351148152e0;

  if (norm <= theta3) return detail::pade_low_order(a, std::array<double, 4>{120, 60, 12, 1});
  if (norm <= theta5)
    return detail::pade_low_order(a, std::array<double, 6>{30240, 15120, 3360, 420, 30, 1});
  if (norm <= theta7)
    return detail::pade_low_order(
        a, std::array<double, 8>{17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1});
  if (norm <= theta9)
    return detail::pade_low_order(
        a, std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                  30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0});

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const Matrix scaled = a * RealScalar(std::ldexp(1.0, -squarings));
  Matrix result = detail::pade13(scaled);
  for (int i = 0; i < squarings; ++i) result = (result * result).eval();
  return result;
}

}  // namespace sqgrav
