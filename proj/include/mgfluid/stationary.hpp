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

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mgfluid/distribution.hpp"

namespace mgfluid {

// P^k(i, j) >= c * q(j) for all i, j.
struct DoeblinCertificate {
  int k = 1;
  double c = 0.0;
  Distribution q;
};

struct PowerIterationOptions {
  double tolerance = 1e-13;
  long max_iterations = 1'000'000;
};

// Throws ParameterError unless P is square with nonnegative rows summing to
// 1 within `tolerance`.
void check_row_stochastic(const Eigen::MatrixXd& P, double tolerance = 1e-10);

// ||mu P - mu||_1.
double stationary_residual(const Eigen::MatrixXd& P, const Distribution& mu);

// Invariant law of P by a dense solve of (P^T - I) mu = 0 with the last
// balance equation replaced by sum(mu) = 1. Falls back to power iteration
// when the solve is inaccurate. Throws ErgodicityError when the chain has no
// unique invariant law.
Distribution stationary_distribution(const Eigen::MatrixXd& P, double tolerance = 1e-12);

// mu_{n+1} = mu_n P until ||mu_{n+1} - mu_n||_1 <= tolerance. Throws
// ErgodicityError when the iteration does not settle.
Distribution power_iteration_stationary(const Eigen::MatrixXd& P,
                                        const PowerIterationOptions& options = {},
                                        const Distribution* start = nullptr);

// Half the L1 distance. Throws ParameterError on size mismatch.
double tv_distance(const Distribution& mu, const Distribution& nu);

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& P, int k);

// Minorization at a fixed step count: m_j = min_i P^k(i, j), c = sum_j m_j,
// q = m / c. Returns nullopt when c == 0.
std::optional<DoeblinCertificate> doeblin_minorization(const Eigen::MatrixXd& P, int k);

// First k in [1, k_max] that yields a certificate. k_max <= 0 means 2 * |E|.
std::optional<DoeblinCertificate> find_doeblin_certificate(const Eigen::MatrixXd& P,
                                                           int k_max = 0);

// Largest violation of P^k(i, j) >= c q(j); <= 0 means the certificate holds.
double certificate_violation(const Eigen::MatrixXd& P, const DoeblinCertificate& cert);

// TV(mu0 P^n, mu) for n = 0..n_max with mu the invariant law of P.
std::vector<double> mixing_curve(const Eigen::MatrixXd& P, const Distribution& mu0, int n_max);

// (1 - c)^floor(n / k).
double doeblin_bound(const DoeblinCertificate& cert, int n);

// 1 - |lambda_2| from a dense eigen-decomposition.
double spectral_gap_estimate(const Eigen::MatrixXd& P);

// max_i sum_j |A(i, j) - B(i, j)|.
double max_row_l1(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace mgfluid
