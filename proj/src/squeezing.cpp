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

#include "sqgrav/squeezing.hpp"

#include <numeric>

#include <sstream>

#include "sqgrav/expm.hpp"

namespace sqgrav {

Eigen::MatrixXcd evolution_operator(const Eigen::MatrixXd& hamiltonian, double t) {
  const Eigen::Index n = hamiltonian.rows();
  if (hamiltonian.cols() != n) throw DomainError("evolution_operator: matrix must be square");
  // Number-conserving Hamiltonians split into many small blocks; exponentiate
  // each connected component on its own.
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto root = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && (hamiltonian(i, j) != 0.0 || hamiltonian(j, i) != 0.0)) {
        parent[root(i)] = root(j);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> block_of(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index& b = block_of[root(i)];
    if (b < 0) {
      b = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[b].push_back(i);
  }
  const std::complex<double> factor(0.0, -t);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& idx : blocks) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd g(m, m);
    for (Eigen::Index c = 0; c < m; ++c)
      for (Eigen::Index r = 0; r < m; ++r) g(r, c) = factor * hamiltonian(idx[r], idx[c]);
    const Eigen::MatrixXcd e = expm(g);
    for (Eigen::Index c = 0; c < m; ++c)
      for (Eigen::Index r = 0; r < m; ++r) u(idx[r], idx[c]) = e(r, c);
  }
  return u;
}

Eigen::VectorXcd vacuum_state(const FockSpace& space) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dim());
  psi(0) = 1.0;
  return psi;
}

Eigen::VectorXcd two_mode_squeezed_vacuum(const FockSpace& space, double r) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dim());
  const double t = std::tanh(r);
  std::complex<double> amplitude(1.0 / std::cosh(r), 0.0);
  const std::complex<double> step(0.0, t);
  for (int n = 0; n <= space.n_max; ++n) {
    psi(space.index(n, n)) = amplitude;
    amplitude *= step;
  }
  return psi;
}

double expectation(const Eigen::MatrixXd& op, const Eigen::VectorXcd& psi) {
  return psi.dot(op.cast<std::complex<double>>() * psi).real();
}

double variance(const Eigen::MatrixXd& op, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd applied = op.cast<std::complex<double>>() * psi;
  const double mean = psi.dot(applied).real();
  return applied.squaredNorm() - mean * mean;
}

SqueezedVacuumStats squeezed_vacuum_stats(double r) {
  if (!(r >= 0.0)) throw DomainError("squeezing strength r must be >= 0");
  const double s = std::sinh(r);
  return {s * s, 2.0 * s * s, 0.5 * std::exp(-2.0 * r), 0.5 * std::exp(2.0 * r)};
}

Eigen::VectorXcd mode_transform(const FockSpace& space, const Eigen::VectorXcd& state) {
  if (state.size() != space.dim()) throw DomainError("mode_transform: state dimension mismatch");
  const int n_max = space.n_max;
  // log C(n, k) and log n! tables up to 2 n_max.
  std::vector<double> log_fact(2 * n_max + 2, 0.0);
  for (std::size_t n = 1; n < log_fact.size(); ++n) log_fact[n] = log_fact[n - 1] + std::log(double(n));
  auto log_binom = [&](int n, int k) { return log_fact[n] - log_fact[k] - log_fact[n - k]; };

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(space.dim());
  for (int np = 0; np <= n_max; ++np) {
    for (int nm = 0; nm <= n_max; ++nm) {
      const std::complex<double> c = state(space.index(np, nm));
      if (c == 0.0) continue;
      const int total = np + nm;
      // a+^dag = (a_s^dag + a_a^dag)/sqrt2, a-^dag = (a_s^dag - a_a^dag)/sqrt2.
      for (int j = 0; j <= np; ++j) {
        for (int k = 0; k <= nm; ++k) {
          const int ns = j + k;
          const int na = total - ns;
          const double log_mag = log_binom(np, j) + log_binom(nm, k) +
                                 0.5 * (log_fact[ns] + log_fact[na] - log_fact[np] - log_fact[nm]) -
                                 0.5 * total * std::numbers::ln2;
          const double sign = ((nm - k) % 2 == 0) ? 1.0 : -1.0;
          const std::complex<double> term = c * (sign * std::exp(log_mag));
          if (ns > n_max || na > n_max) continue;
          out(space.index(ns, na)) += term;
        }
      }
    }
  }
  const double deviation = std::abs(out.squaredNorm() - state.squaredNorm());
  if (deviation > 1e-8) {
    std::ostringstream msg;
    msg << "mode_transform: truncation changed the norm by " << deviation
        << " (raise n_max above " << n_max << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

std::vector<double> first_mode_distribution(const FockSpace& space, const Eigen::VectorXcd& state) {
  std::vector<double> p(space.levels(), 0.0);
  for (int n1 = 0; n1 <= space.n_max; ++n1) {
    for (int n2 = 0; n2 <= space.n_max; ++n2) p[n1] += std::norm(state(space.index(n1, n2)));
  }
  return p;
}

void SqueezingModel::validate() const {
  if (!(atoms > 0.0)) throw ConfigError("SqueezingModel: atoms must be > 0");
  if (!(r >= 0.0)) throw ConfigError("SqueezingModel: r must be >= 0");
  if (!(sigma_det >= 0.0)) throw ConfigError("SqueezingModel: sigma_det must be >= 0");
}

double SqueezingModel::variance_at(double phi) const {
  const double c = std::cos(phi - phi_opt);
  const double s = std::sin(phi - phi_opt);
  return atoms / 4.0 * (std::exp(-2.0 * r) * c * c + std::exp(2.0 * r) * s * s) +
         sigma_det * sigma_det;
}

SqueezingModel SqueezingModel::coherent() const {
  SqueezingModel copy = *this;
  copy.r = 0.0;
  return copy;
}

double tomography_variance(const SqueezingModel& model, double phi) {
  return model.variance_at(phi);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

XiSquared xi_squared(double var_jz, double atoms) {
  if (!(atoms > 0.0)) throw DomainError("xi_squared: atom number must be > 0");
  if (!(var_jz > 0.0)) throw DomainError("xi_squared: variance must be > 0");
  const double linear = 4.0 * var_jz / atoms;
  return {linear, to_db(linear)};
}

SqueezingModel calibrate(double xi_min_db, double xi_max_db, double atoms, double phi_opt) {
  if (!(atoms > 0.0)) throw ConfigError("calibrate: atoms must be > 0");
  if (xi_min_db > 0.0 || xi_max_db < 0.0) {
    throw ConfigError("calibrate: need xi_min_db <= 0 <= xi_max_db");
  }
  const double lo = from_db(xi_min_db);
  const double hi = from_db(xi_max_db);
  // e^{-2r} + d = lo, e^{2r} + d = hi  =>  sinh(2r) = (hi - lo) / 2.
  const double r = 0.5 * std::asinh(0.5 * (hi - lo));
  const double d = lo - std::exp(-2.0 * r);
  if (d < -1e-12) {
    std::ostringstream msg;
    msg << "calibrate: infeasible targets (" << xi_min_db << " dB, " << xi_max_db
        << " dB) need negative detection variance d = " << d
        << "; the product of the linear levels must be >= 1";
    throw ConfigError(msg.str());
  }
  SqueezingModel model{atoms, r, phi_opt, std::sqrt(std::max(d, 0.0) * atoms / 4.0)};
  model.validate();
  return model;
}

}  // namespace sqgrav
