// Copyright 2026 The DuelBandit Authors
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

#include "duelbandit/games.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace duelbandit;
using duelbandit::testing::cce_gain_2x2;
using duelbandit::testing::for_each_grid_joint;
using duelbandit::testing::random_skew;

namespace {

Matrix rps() {
  Matrix m(3, 3);
  m << 0, 1, -1, -1, 0, 1, 1, -1, 0;
  return m;
}

bool valid_simplex(const Vector& v) {
  return (v.array() >= -1e-12).all() && std::abs(v.sum() - 1.0) <= 1e-9;
}

void check_cce(const Matrix& u, const JointReport& r) {
  CHECK(r.converged);
  CHECK(cce_max_violation(u, r.point.weights()) <= 1e-8);
  auto [left, right] = marginals(r.point);
  CHECK(valid_simplex(left.weights()));
  CHECK(valid_simplex(right.weights()));
}

}  // namespace

TEST_CASE("cce of the zero game") {
  const Matrix u = Matrix::Zero(3, 3);
  check_cce(u, solve_cce(GeneralMatrix(u)));
  CHECK(cce_max_violation(u, JointActionDistribution::uniform(3).weights()) == 0.0);
}

TEST_CASE("uniform product is a cce of rock-paper-scissors") {
  const auto uniform = ActionDistribution::uniform(3);
  const Matrix p = JointActionDistribution::product(uniform, uniform).weights();
  CHECK(std::abs(cce_max_violation(rps(), p)) <= 1e-15);
  check_cce(rps(), solve_cce(GeneralMatrix(rps())));
}

TEST_CASE("cce of a 2x2 game agrees with a grid search") {
  Matrix u(2, 2);
  u << 0, 0.5, 0.2, 0;
  const JointReport r = solve_cce(GeneralMatrix(u));
  check_cce(u, r);
  CHECK(cce_gain_2x2(u, r.point.weights()) <= 1e-8);

  // The grid at step 1e-3 contains an exact equilibrium of this game.
  bool grid_feasible = false;
  for_each_grid_joint(1000, [&](const Matrix& p) {
    if (!grid_feasible && cce_gain_2x2(u, p) <= 0.0) grid_feasible = true;
  });
  CHECK(grid_feasible);
}

TEST_CASE("cce violation formula matches the hand-written 2x2 version") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix u(2, 2), p(2, 2);
    for (int i = 0; i < 4; ++i) {
      u.data()[i] = rng.uniform(-3, 3);
      p.data()[i] = rng.uniform();
    }
    p /= p.sum();
    CHECK(cce_max_violation(u, p) == doctest::Approx(cce_gain_2x2(u, p)).epsilon(1e-12));
  }
}

TEST_CASE("cce on random general-sum games") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    Matrix u(k, k);
    for (int i = 0; i < u.size(); ++i) u.data()[i] = rng.uniform(-3, 3);
    check_cce(u, solve_cce(GeneralMatrix(u)));
  }
}

TEST_CASE("nash of rock-paper-scissors is uniform") {
  const MarginalReport r = solve_zero_sum_nash(validate_preference_matrix(rps()));
  for (int i = 0; i < 3; ++i) CHECK(r.point[i] == doctest::Approx(1.0 / 3.0));
  const Vector cols = rps().transpose() * r.point.weights();
  CHECK(cols.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("nash of a condorcet matrix is the winner") {
  Matrix m(3, 3);
  m << 0, 0.4, 0.4, -0.4, 0, 0.1, -0.4, -0.1, 0;
  const MarginalReport r = solve_zero_sum_nash(validate_preference_matrix(m));
  CHECK(r.point[0] == doctest::Approx(1.0));
  const Vector cols = m.transpose() * r.point.weights();
  CHECK(cols(0) == doctest::Approx(0.0));
  CHECK(cols(1) == doctest::Approx(0.4));
  CHECK(cols(2) == doctest::Approx(0.4));

  Matrix two(2, 2);
  two << 0, 0.6, -0.6, 0;
  CHECK(solve_zero_sum_nash(validate_preference_matrix(two)).point[0] == doctest::Approx(1.0));
}

TEST_CASE("nash guarantees a nonnegative value on random games") {
  Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const Matrix m = random_skew(k, rng);
    const MarginalReport r = solve_zero_sum_nash(validate_preference_matrix(m));
    const Vector& q = r.point.weights();
    CHECK((m.transpose() * q).minCoeff() >= -1e-8);
    CHECK(std::abs(q.dot(m * q)) <= 1e-12);
  }
}

TEST_CASE("inverse-gap program: zero predictions keep the uniform point") {
  const PreferenceMatrix y = PreferenceMatrix::zero(4);
  const Vector uniform = Vector::Constant(4, 0.25);
  const Vector lhs = igw_lhs(y.entries(), uniform, 16.0);
  CHECK(lhs.maxCoeff() == doctest::Approx(0.5));
  CHECK(igw_budget(4, 16.0) == doctest::Approx(1.25));

  const MarginalReport r = solve_minmax_feasibility(y, 16.0);
  CHECK(r.converged);
  CHECK(r.point.weights().isApprox(uniform));
}

TEST_CASE("inverse-gap program on two arms matches a grid search") {
  Matrix m(2, 2);
  m << 0, 1, -1, 0;
  const PreferenceMatrix y = validate_preference_matrix(m);
  const double gamma = 10.0;

  Vector hand(2);
  hand << 0.8, 0.2;
  const Vector lhs = igw_lhs(m, hand, gamma);
  CHECK(lhs(0) == doctest::Approx(0.45));
  CHECK(lhs(1) == doctest::Approx(0.2));

  // Grid over the 2-simplex at step 1e-3, strict budget.
  int feasible = 0;
  for (int i = 1; i < 1000; ++i) {
    Vector p(2);
    p << i / 1000.0, 1.0 - i / 1000.0;
    if (igw_lhs(m, p, gamma).maxCoeff() <= igw_budget(2, gamma)) ++feasible;
  }
  CHECK(feasible > 0);

  const MarginalReport r = solve_minmax_feasibility(y, gamma);
  CHECK(r.converged);
  CHECK(igw_max_violation(m, r.point.weights(), gamma) <= igw_slack(2, gamma));
}

TEST_CASE("inverse-gap program rejects small gamma and bad floors") {
  try {
    solve_minmax_feasibility(PreferenceMatrix::zero(3), 5.0);
    FAIL("gamma below 2K accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGammaTooSmall);
  }
  SolverConfig cfg;
  cfg.floor_epsilon = 0.5;
  try {
    solve_minmax_feasibility(PreferenceMatrix::zero(3), 12.0, cfg);
    FAIL("floor above 1/K accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
  }
}

TEST_CASE("inverse-gap program converges on random predictions") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const double gamma = k * (2.0 + 8.0 * rng.uniform());
    const PreferenceMatrix y = validate_preference_matrix(random_skew(k, rng));
    const MarginalReport r = solve_minmax_feasibility(y, gamma);
    CHECK(r.converged);
    CHECK(r.max_violation <= igw_slack(k, gamma) + 1e-6);
    CHECK(r.point.weights().minCoeff() >= 1.0 / (4.0 * gamma) - 1e-12);
  }
}
