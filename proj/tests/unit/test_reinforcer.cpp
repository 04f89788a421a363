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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mgfluid/errors.hpp"
#include "mgfluid/reinforcer.hpp"
#include "test_game.hpp"

using namespace mgfluid;

TEST_CASE("q update on a zero table") {
  const std::vector<double> q(4, 0.0);  // 2 actions x 2 states
  const auto f = q_update(q, 2, 1, 0, 1.0, 0, 0.1, 0.5);
  CHECK(f[0 * 2 + 1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(f[0] == 0.0);
  CHECK(f[2] == 0.0);
  CHECK(f[3] == 0.0);
}

TEST_CASE("q update zero cases") {
  const std::vector<double> q = {0.3, -0.2, 1.5, 0.7};
  for (double v : q_update(q, 2, 0, 1, 0.8, 1, 0.0, 0.9)) CHECK(v == 0.0);
  // q[1][0] = r + gamma * max_b q[b][1] = 0.8 + 0.5 * 0.7
  std::vector<double> fixed = {0.3, 0.2, 0.8 + 0.5 * 0.7, 0.7};
  for (double v : q_update(fixed, 2, 0, 1, 0.8, 1, 0.3, 0.5)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("softmax examples") {
  const std::vector<double> equal = {0.4, 0.0, 0.4, 0.0, 0.4, 0.0};
  for (double eps : {0.0, 0.3, 1.0}) {
    const auto p = softmax_policy(equal, 2, 0, 0.7, eps);
    for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  const std::vector<double> skew = {5.0, 0.0, -3.0, 0.0};
  const auto u = softmax_policy(skew, 2, 0, 0.1, 1.0);
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(0.5));

  const std::vector<double> q = {1.0, 0.0};  // one state
  const auto p = softmax_policy(q, 1, 0, 1.0, 0.0);
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
  CHECK(p[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.2689414213699951).epsilon(1e-14));
}

TEST_CASE("softmax survives large values and rejects tau 0") {
  const std::vector<double> q = {1000.0, 999.0};
  const auto p = softmax_policy(q, 1, 0, 0.01, 0.1);
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p[1] >= 0.05);
  CHECK_THROWS_AS(softmax_policy(q, 1, 0, 0.0, 0.1), ParameterError);
  CHECK_THROWS_AS(softmax_policy(q, 1, 0, 1.0, 1.5), ParameterError);
}

TEST_CASE("ball radius") {
  CHECK(param_ball_radius(0.0, 1.0, 0.5) == doctest::Approx(2.0));
  CHECK(param_ball_radius(3.0, 0.0, 0.9) == 3.0);
  CHECK(param_ball_radius(10.0, 1.0, 0.9) == doctest::Approx(10.0));
  CHECK_THROWS_AS(param_ball_radius(0.0, 1.0, 1.0), ParameterError);
}

TEST_CASE("hyperparameter validation") {
  QTableParams p;
  p.gamma = 1.0;
  CHECK_THROWS_AS(QTableReinforcer(2, 2, p, 0.0), ParameterError);
  p = {};
  p.tau = 0.0;
  CHECK_THROWS_AS(QTableReinforcer(2, 2, p, 0.0), ParameterError);
  p = {};
  p.alpha = 1.2;
  CHECK_THROWS_AS(QTableReinforcer(2, 2, p, 0.0), ParameterError);
  p = {};
  CHECK_THROWS_AS(QTableReinforcer(2, 2, p, std::vector<double>(3, 0.0)), StructuralError);
  QTableReinforcer r(2, 3, p, 0.0);
  CHECK(r.with_alpha(0.5).params().alpha == 0.5);
  CHECK(r.probability_floor() == doctest::Approx(0.05));
}

TEST_CASE("aggregate update") {
  const auto game = mgtest::canonical_game();
  const auto rs = mgtest::qtables(*game, mgtest::canonical_params());
  const std::vector<double> x(8, 0.0);
  const std::vector<double> zero_r = {0.0, 0.0};
  for (double v : aggregate_update(rs, game->indexer(), 0, 1, 1, zero_r, x)) CHECK(v == 0.0);

  // identical players, identical rewards, symmetric joint action (1, 1)
  const std::vector<double> r = {0.4, 0.4};
  const auto f = aggregate_update(rs, game->indexer(), 1, 3, 0, r, x);
  for (int k = 0; k < 4; ++k) CHECK(f[k] == f[4 + k]);
  CHECK(f[1 * 2 + 1] == doctest::Approx(0.04));

  // single player: q_update at offset 0
  const auto g1 = mgtest::single_player_game();
  const auto r1 = mgtest::qtables(*g1, mgtest::canonical_params());
  const std::vector<double> x1 = {0.2, -0.1, 0.5, 0.3};
  const std::vector<double> rew = {0.7};
  const auto agg = aggregate_update(r1, g1->indexer(), 1, 0, 0, rew, x1);
  const auto direct = q_update(x1, 2, 1, 0, 0.7, 0, 0.1, 0.9);
  for (int k = 0; k < 4; ++k) CHECK(agg[k] == direct[k]);
}

TEST_CASE("update support is one coordinate per player") {
  const auto game = mgtest::canonical_game();
  const auto rs = mgtest::qtables(*game, mgtest::canonical_params());
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(8);
    for (auto& v : x) v = u(gen);
    const int s = trial % 2, a = trial % 4, sn = (trial / 4) % 2;
    const std::vector<double> r = {u(gen), u(gen)};
    const auto f = aggregate_update(rs, game->indexer(), s, a, sn, r, x);
    const int a1 = a / 2, a2 = a % 2;
    for (int k = 0; k < 8; ++k) {
      const bool allowed = k == a1 * 2 + s || k == 4 + a2 * 2 + s;
      if (!allowed) CHECK(f[k] == 0.0);
    }
  }
}

TEST_CASE("policy floor and Lipschitz bound over the ball") {
  const double eps = 0.1, tau = 0.5, radius = 10.0;
  const int A = 3;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-radius, radius);
  const double L = (1.0 - eps) * A / (2.0 * tau) * 2.0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> q(A), q2(A);
    for (auto& v : q) v = u(gen);
    for (int a = 0; a < A; ++a) q2[a] = q[a] + (trial % 2 ? 1e-3 * u(gen) : u(gen));
    const auto p = softmax_policy(q, 1, 0, tau, eps);
    const auto p2 = softmax_policy(q2, 1, 0, tau, eps);
    double l1 = 0.0, dinf = 0.0;
    for (int a = 0; a < A; ++a) {
      CHECK(p[a] >= eps / A - 1e-15);
      l1 += std::abs(p[a] - p2[a]);
      dinf = std::max(dinf, std::abs(q[a] - q2[a]));
    }
    CHECK(l1 <= L * dinf + 1e-12);
  }
}

TEST_CASE("reinforcer contract") {
  QTableReinforcer r(2, 2, mgtest::canonical_params(), std::vector<double>{1, 2, 3, 4});
  CHECK(r.dimension() == 4);
  CHECK(r.initial_params()[2] == 3);
  CHECK(r.parameter_radius(1.0).value() == doctest::Approx(10.0));
  CHECK(r.parameter_radius(0.1).value() == doctest::Approx(4.0));
  std::vector<double> pi(2);
  r.policy(r.initial_params(), 1, pi);
  CHECK(pi[0] + pi[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pi[1] > pi[0]);
}
