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

// Squeezed-state generation on a truncated two-mode Fock space and the
// Gaussian tomography model of the interferometer input state.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sqgrav/errors.hpp"

namespace sqgrav {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr Eigen::Index kDefaultMaxDimension = 4096;

/// Two bosonic modes (m = +1, m = -1) each truncated at occupation n_max.
/// Basis index of |n_plus, n_minus> is n_plus * (n_max + 1) + n_minus.
struct FockSpace {
  int n_max = 12;

  Eigen::Index levels() const { return n_max + 1; }
  Eigen::Index dim() const { return levels() * levels(); }
  Eigen::Index index(int n_plus, int n_minus) const { return n_plus * levels() + n_minus; }

  void validate(Eigen::Index max_dim = kDefaultMaxDimension) const {
    if (n_max < 4) throw ConfigError("FockSpace: n_max must be >= 4");
    if (dim() > max_dim) {
      throw ConfigError("FockSpace: dimension " + std::to_string(dim()) + " exceeds limit " +
                        std::to_string(max_dim));
    }
  }
};

/// Single-mode annihilation operator on {|0>, ..., |n_max>}: a(n-1, n) = sqrt(n).
template <typename Scalar = double>
DenseMatrix<Scalar> ladder(int n_max) {
  DenseMatrix<Scalar> a = DenseMatrix<Scalar>::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = Scalar(std::sqrt(double(n)));
  return a;
}

template <typename Scalar>
DenseMatrix<Scalar> kron(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b) {
  DenseMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Scalar = double>
struct ModeOperators {
  DenseMatrix<Scalar> a_plus;
  DenseMatrix<Scalar> a_minus;
  DenseMatrix<Scalar> n_plus;
  DenseMatrix<Scalar> n_minus;
};

template <typename Scalar = double>
ModeOperators<Scalar> build_operators(const FockSpace& space,
                                      Eigen::Index max_dim = kDefaultMaxDimension) {
  space.validate(max_dim);
  const DenseMatrix<Scalar> a = ladder<Scalar>(space.n_max);
  const DenseMatrix<Scalar> id = DenseMatrix<Scalar>::Identity(space.levels(), space.levels());
  ModeOperators<Scalar> ops;
  ops.a_plus = kron<Scalar>(a, id);
  ops.a_minus = kron<Scalar>(id, a);
  const DenseMatrix<Scalar> n = a.adjoint() * a;
  ops.n_plus = kron<Scalar>(n, id);
  ops.n_minus = kron<Scalar>(id, n);
  return ops;
}

struct HamiltonianParams {
  double q = 1.0;      // quadratic Zeeman energy, rad/s
  double omega = 1.0;  // spin-interaction strength, rad/s
  double atoms = 6000; // pump population N

  void validate() const {
    if (!(atoms >= 1.0)) throw ConfigError("HamiltonianParams: atoms must be >= 1");
    if (!std::isfinite(q) || !std::isfinite(omega)) {
      throw ConfigError("HamiltonianParams: q and omega must be finite");
    }
  }
};

/// Hamiltonians of the squeezing chain (hbar = 1):
///   undepleted = (q - Omega)(N+ + N-) - Omega (a+ a- + h.c.)
///   twomode    = -Omega (a+ a- + h.c.)
///   symmetric  = -(Omega/2)(a_s a_s + h.c.),  a_s = (a+ + a-)/sqrt(2)
///   antisymmetric = -(Omega/2)(a_a a_a + h.c.),  a_a = (a+ - a-)/sqrt(2)
/// so that twomode = symmetric - antisymmetric.
template <typename Scalar = double>
struct Hamiltonians {
  DenseMatrix<Scalar> undepleted;
  DenseMatrix<Scalar> twomode;
  DenseMatrix<Scalar> symmetric;
  DenseMatrix<Scalar> antisymmetric;
};

template <typename Scalar = double>
Hamiltonians<Scalar> build_hamiltonians(const FockSpace& space, const HamiltonianParams& params,
                                        Eigen::Index max_dim = kDefaultMaxDimension) {
  params.validate();
  const auto ops = build_operators<Scalar>(space, max_dim);
  const Scalar omega(params.omega);
  // Single-mode products are formed before the Kronecker product, so no dense
  // (n_max+1)^4 multiplication is needed. With a_s,a = (a_+ +- a_-)/sqrt(2):
  // a_s^2 = (a_+^2 + a_-^2)/2 + a_+ a_-,  a_a^2 = (a_+^2 + a_-^2)/2 - a_+ a_-.
  const DenseMatrix<Scalar> a = ladder<Scalar>(space.n_max);
  const DenseMatrix<Scalar> id = DenseMatrix<Scalar>::Identity(space.levels(), space.levels());
  const DenseMatrix<Scalar> a2 = a * a;
  const DenseMatrix<Scalar> pair = kron<Scalar>(a, a);
  const DenseMatrix<Scalar> pair_terms = pair + pair.adjoint();
  const DenseMatrix<Scalar> squares = Scalar(0.5) * (kron<Scalar>(a2, id) + kron<Scalar>(id, a2));
  const DenseMatrix<Scalar> ss = squares + pair;
  const DenseMatrix<Scalar> aa = squares - pair;

  Hamiltonians<Scalar> h;
  h.twomode = -omega * pair_terms;
  h.undepleted = Scalar(params.q - params.omega) * (ops.n_plus + ops.n_minus) + h.twomode;
  h.symmetric = Scalar(-0.5 * params.omega) * (ss + ss.adjoint());
  h.antisymmetric = Scalar(-0.5 * params.omega) * (aa + aa.adjoint());
  return h;
}

/// Full three-mode spin-changing-collision Hamiltonian
///   q (N+ + N-) - (Omega/N) [ (N0 - 1/2)(N+ + N-) + a0+ a0+ a+ a- + a+^+ a-^+ a0 a0 ]
/// on |n0, n+, n-> with n0 <= pump_cutoff and n+- <= side_cutoff; index
/// ((n0 * L) + n+) * L + n- with L = side_cutoff + 1. Small spaces only.
template <typename Scalar = double>
DenseMatrix<Scalar> build_full_hamiltonian(int side_cutoff, int pump_cutoff,
                                           const HamiltonianParams& params,
                                           Eigen::Index max_dim = kDefaultMaxDimension) {
  params.validate();
  const Eigen::Index dim = Eigen::Index(pump_cutoff + 1) * (side_cutoff + 1) * (side_cutoff + 1);
  if (side_cutoff < 1 || pump_cutoff < 2) {
    throw ConfigError("build_full_hamiltonian: cutoffs too small");
  }
  if (dim > max_dim) {
    throw ConfigError("build_full_hamiltonian: dimension " + std::to_string(dim) +
                      " exceeds limit " + std::to_string(max_dim));
  }
  using M = DenseMatrix<Scalar>;
  const M a0 = ladder<Scalar>(pump_cutoff);
  const M a = ladder<Scalar>(side_cutoff);
  const M id0 = M::Identity(pump_cutoff + 1, pump_cutoff + 1);
  const M id = M::Identity(side_cutoff + 1, side_cutoff + 1);
  const M pump = kron<Scalar>(kron<Scalar>(a0, id), id);
  const M plus = kron<Scalar>(kron<Scalar>(id0, a), id);
  const M minus = kron<Scalar>(kron<Scalar>(id0, id), a);
  const M n0 = pump.adjoint() * pump;
  const M side_number = plus.adjoint() * plus + minus.adjoint() * minus;
  const M identity = M::Identity(dim, dim);
  const M pair_out = pump.adjoint() * pump.adjoint() * plus * minus;

  const Scalar coupling(params.omega / params.atoms);
  M h = Scalar(params.q) * side_number -
        coupling * ((n0 - Scalar(0.5) * identity) * side_number + pair_out + pair_out.adjoint());
  return h;
}

/// U = exp(-i H t).
Eigen::MatrixXcd evolution_operator(const Eigen::MatrixXd& hamiltonian, double t);

/// Fock vacuum |0, 0>.
Eigen::VectorXcd vacuum_state(const FockSpace& space);

/// Analytic two-mode squeezed vacuum produced by exp(-i H_twomode t) with r = Omega t:
/// (1/cosh r) sum_n (i tanh r)^n |n, n>, truncated at n_max (not renormalized).
Eigen::VectorXcd two_mode_squeezed_vacuum(const FockSpace& space, double r);

/// <psi| op |psi> for a Hermitian real operator.
double expectation(const Eigen::MatrixXd& op, const Eigen::VectorXcd& psi);

/// <op^2> - <op>^2.
double variance(const Eigen::MatrixXd& op, const Eigen::VectorXcd& psi);

struct SqueezedVacuumStats {
  double mean_atoms_per_mode = 0.0;
  double mean_total = 0.0;
  double quadrature_var_minus = 0.5;  // vacuum variance 1/2
  double quadrature_var_plus = 0.5;
};

/// Bogoliubov moments after evolving the vacuum to squeezing strength r.
SqueezedVacuumStats squeezed_vacuum_stats(double r);

/// Re-expresses a two-mode state in the (symmetric, antisymmetric) mode basis.
/// Output uses the same index layout with (n_s, n_a) in place of (n+, n-).
/// Throws NumericalError when truncation loses more than 1e-8 of the norm.
Eigen::VectorXcd mode_transform(const FockSpace& space, const Eigen::VectorXcd& state);

/// Occupation distribution of the first mode (the mode kept by the rf transfer
/// when applied to mode_transform output).
std::vector<double> first_mode_distribution(const FockSpace& space, const Eigen::VectorXcd& state);

/// Gaussian model of the input state seen by spin-noise tomography.
struct SqueezingModel {
  double atoms = 6000;
  double r = 0.0;
  double phi_opt = 1.2 * std::numbers::pi;
  double sigma_det = 0.0;  // atoms, additive on J_z

  void validate() const;
  /// Var(J_z) at tomography angle phi; period pi.
  double variance_at(double phi) const;
  SqueezingModel coherent() const;
};

double tomography_variance(const SqueezingModel& model, double phi);

struct XiSquared {
  double linear = 1.0;
  double db = 0.0;
};

/// xi^2 = 4 Var(J_z) / N.
XiSquared xi_squared(double var_jz, double atoms);

double to_db(double linear);
double from_db(double db);

/// Fits (r, sigma_det) so the model reproduces the squeezing (min) and
/// anti-squeezing (max) levels exactly.
SqueezingModel calibrate(double xi_min_db, double xi_max_db, double atoms,
                         double phi_opt = 1.2 * std::numbers::pi);

}  // namespace sqgrav
