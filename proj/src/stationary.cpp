// Copyright 2026 The mgfluid Authors
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

#include "mgfluid/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "mgfluid/errors.hpp"

namespace mgfluid {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(const Distribution& d) {
  return Eigen::Map<const Eigen::VectorXd>(d.probs().data(), static_cast<Eigen::Index>(d.size()));
}

}  // namespace

void check_row_stochastic(const Eigen::MatrixXd& P, double tolerance) {
  if (P.rows() == 0 || P.rows() != P.cols()) {
    throw ParameterError("kernel must be a non-empty square matrix");
  }
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      const double p = P(i, j);
      if (!(p >= 0.0)) {
        throw ParameterError("kernel entry (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") is negative or NaN");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw ParameterError("kernel row " + std::to_string(i) + " sums to " +
                           std::to_string(sum));
    }
  }
}

double stationary_residual(const Eigen::MatrixXd& P, const Distribution& mu) {
  const Eigen::VectorXd m = to_eigen(mu);
  return (P.transpose() * m - m).lpNorm<1>();
}

Distribution power_iteration_stationary(const Eigen::MatrixXd& P,
                                        const PowerIterationOptions& options,
                                        const Distribution* start) {
  check_row_stochastic(P);
  const Eigen::Index n = P.rows();
  Eigen::VectorXd mu = start ? to_eigen(*start) : Eigen::VectorXd::Constant(n, 1.0 / n);
  if (mu.size() != n) throw ParameterError("starting law has the wrong size");
  const Eigen::MatrixXd Pt = P.transpose();
  Eigen::VectorXd next(n);
  for (long it = 0; it < options.max_iterations; ++it) {
    next.noalias() = Pt * mu;
    next /= next.sum();
    const double delta = (next - mu).lpNorm<1>();
    mu.swap(next);
    if (delta <= options.tolerance) return Distribution::normalized(to_std(mu));
  }
  throw ErgodicityError("power iteration did not converge within " +
                        std::to_string(options.max_iterations) + " iterations");
}

Distribution stationary_distribution(const Eigen::MatrixXd& P, double tolerance) {
  check_row_stochastic(P);
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd M = P.transpose();
  M.diagonal().array() -= 1.0;
  M.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) {
    throw ErgodicityError("kernel has no unique invariant law (balance system is singular)");
  }
  Eigen::VectorXd mu = lu.solve(rhs);

  const bool sign_ok = (mu.array() >= -Distribution::kNegativeSlack).all();
  if (sign_ok) {
    Distribution d = Distribution::normalized(to_std(mu));
    if (stationary_residual(P, d) <= tolerance) return d;
    // Polish an inaccurate direct solution.
    PowerIterationOptions opts;
    opts.tolerance = std::min(tolerance, opts.tolerance);
    Distribution polished = power_iteration_stationary(P, opts, &d);
    if (stationary_residual(P, polished) <= tolerance) return polished;
  } else {
    PowerIterationOptions opts;
    opts.tolerance = std::min(tolerance, opts.tolerance);
    Distribution polished = power_iteration_stationary(P, opts);
    if (stationary_residual(P, polished) <= tolerance) return polished;
  }
  throw ErgodicityError("could not reach stationary residual " + std::to_string(tolerance));
}

double tv_distance(const Distribution& mu, const Distribution& nu) {
  if (mu.size() != nu.size()) {
    throw ParameterError("distributions have different sizes (" + std::to_string(mu.size()) +
                         " vs " + std::to_string(nu.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return 0.5 * s;
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& P, int k) {
  if (k < 0) throw ParameterError("matrix power needs k >= 0");
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(P.rows(), P.cols());
  Eigen::MatrixXd base = P;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

namespace {

std::optional<DoeblinCertificate> certificate_from_power(const Eigen::MatrixXd& Pk, int k) {
  const Eigen::VectorXd m = Pk.colwise().minCoeff().transpose().cwiseMax(0.0);
  const double c = m.sum();
  if (!(c > 0.0)) return std::nullopt;
  DoeblinCertificate cert;
  cert.k = k;
  cert.c = c;
  cert.q = Distribution::normalized(to_std(m));
  return cert;
}

}  // namespace

std::optional<DoeblinCertificate> doeblin_minorization(const Eigen::MatrixXd& P, int k) {
  if (k < 1) throw ParameterError("minorization step count must be >= 1");
  check_row_stochastic(P);
  return certificate_from_power(matrix_power(P, k), k);
}

std::optional<DoeblinCertificate> find_doeblin_certificate(const Eigen::MatrixXd& P,
                                                           int k_max) {
  check_row_stochastic(P);
  if (k_max <= 0) k_max = static_cast<int>(2 * P.rows());
  Eigen::MatrixXd Pk = P;
  for (int k = 1; k <= k_max; ++k) {
    if (auto cert = certificate_from_power(Pk, k)) return cert;
    Pk = Pk * P;
  }
  return std::nullopt;
}

double certificate_violation(const Eigen::MatrixXd& P, const DoeblinCertificate& cert) {
  const Eigen::MatrixXd Pk = matrix_power(P, cert.k);
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < Pk.cols(); ++j) {
    const double floor = cert.c * cert.q[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < Pk.rows(); ++i) worst = std::max(worst, floor - Pk(i, j));
  }
  return worst;
}

std::vector<double> mixing_curve(const Eigen::MatrixXd& P, const Distribution& mu0, int n_max) {
  if (n_max < 0) throw ParameterError("n_max must be >= 0");
  if (mu0.size() != static_cast<std::size_t>(P.rows())) {
    throw ParameterError("initial law has the wrong size");
  }
  const Distribution mu = stationary_distribution(P);
  const Eigen::VectorXd target = to_eigen(mu);
  const Eigen::MatrixXd Pt = P.transpose();
  Eigen::VectorXd cur = to_eigen(mu0);
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    curve.push_back(0.5 * (cur - target).lpNorm<1>());
    cur = Pt * cur;
  }
  return curve;
}

double doeblin_bound(const DoeblinCertificate& cert, int n) {
  return std::pow(1.0 - cert.c, n / cert.k);
}

double spectral_gap_estimate(const Eigen::MatrixXd& P) {
  if (P.rows() < 2) return 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(P, /*computeEigenvectors=*/false);
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    moduli.push_back(std::abs(solver.eigenvalues()(i)));
  }
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return 1.0 - moduli[1];
}

double max_row_l1(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw ParameterError("matrices have different shapes");
  }
  return (A - B).cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace mgfluid
