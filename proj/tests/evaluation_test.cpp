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

#include "duelbandit/evaluation.hpp"
#include "duelbandit/environments.hpp"
#include "duelbandit/games.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace duelbandit;
using duelbandit::testing::random_simplex;
using duelbandit::testing::random_skew;

TEST_CASE("best-response step examples") {
  const auto uniform3 = JointActionDistribution::uniform(3);
  CHECK(br_regret_step(PreferenceMatrix::zero(3), uniform3) == 0.0);
  CHECK(std::abs(br_regret_step(rps3(), uniform3)) <= 1e-15);
  CHECK(br_regret_step(hardness(0.2), JointActionDistribution::point_mass(3, 2, 2)) ==
        doctest::Approx(0.2));
  CHECK_THROWS_AS(br_regret_step(rps3(), JointActionDistribution::uniform(2)), Error);
}

TEST_CASE("fixed-benchmark step examples") {
  const PreferenceMatrix c = condorcet(3, 0.4);
  const auto uniform3 = JointActionDistribution::uniform(3);
  CHECK(fb_regret_step(c, uniform3, ActionDistribution::point_mass(3, 0)) ==
        doctest::Approx(0.8 / 3.0));
  CHECK(fb_regret_step(PreferenceMatrix::zero(3), uniform3, ActionDistribution::uniform(3)) ==
        0.0);

  Rng rng(1);
  const Matrix w = random_simplex(9, rng).reshaped(3, 3);
  const auto joint = JointActionDistribution::from_weights(w);
  const PreferenceMatrix f = validate_preference_matrix(random_skew(3, rng));
  const Vector m = w.rowwise().sum() + w.colwise().sum().transpose();
  Eigen::Index best = 0;
  (f.entries() * m).maxCoeff(&best);
  CHECK(fb_regret_step(f, joint, ActionDistribution::point_mass(3, static_cast<int>(best))) ==
        doctest::Approx(br_regret_step(f, joint)));
}

TEST_CASE("pure responses attain the best-response maximum") {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const int k = 3 + trial;
    const PreferenceMatrix f = validate_preference_matrix(random_skew(k, rng));
    const Matrix w = random_simplex(k * k, rng).reshaped(k, k);
    const auto joint = JointActionDistribution::from_weights(w);
    const Vector m = w.rowwise().sum() + w.colwise().sum().transpose();
    const double br = br_regret_step(f, joint);
    double vertices = -1e300, sampled = -1e300;
    for (int i = 0; i < k; ++i) vertices = std::max(vertices, 0.5 * f.entries().row(i).dot(m));
    for (int i = 0; i < 10000; ++i) {
      sampled = std::max(sampled, 0.5 * random_simplex(k, rng).dot(f.entries() * m));
    }
    CHECK(sampled <= br + 1e-9);
    CHECK(std::abs(vertices - br) <= 1e-9);
  }
}

TEST_CASE("fixed benchmarks never exceed the best response") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(8));
    const PreferenceMatrix f = validate_preference_matrix(random_skew(k, rng));
    const auto joint =
        JointActionDistribution::from_weights(random_simplex(k * k, rng).reshaped(k, k));
    const auto q = ActionDistribution::from_weights(random_simplex(k, rng));
    CHECK(fb_regret_step(f, joint, q) <= br_regret_step(f, joint) + 1e-12);
  }
}

TEST_CASE("nash marginals give zero best-response regret") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(8));
    const PreferenceMatrix f = validate_preference_matrix(random_skew(k, rng));
    const SolverConfig cfg;
    const auto q = solve_zero_sum_nash(f, cfg).point;
    CHECK(br_regret_step(f, JointActionDistribution::product(q, q)) <= cfg.violation_tolerance);
  }
}

TEST_CASE("policy regret uses the realized duel") {
  const PreferenceMatrix c = condorcet(3, 0.4);
  RegretLedger zero_duel({Policy{{0}}});
  zero_duel.accumulate_policy(c, 0, {0, 0});
  zero_duel.record(0.0, 0.0);
  CHECK(zero_duel.policy_total() == 0.0);

  RegretLedger losers({Policy{{0}}});
  losers.accumulate_policy(c, 0, {1, 2});
  losers.record(0.0, 0.0);
  CHECK(losers.policy_total() == doctest::Approx(0.4));

  const PreferenceMatrix r = rps3();
  RegretLedger mirror({Policy{{0, 1, 2}}});
  mirror.accumulate_policy(r, 1, {1, 2});
  mirror.record(0.0, 0.0);
  CHECK(mirror.policy_total() == doctest::Approx(0.5 * r(1, 2)));

  RegretLedger unknown({Policy{{0, 1}}});
  CHECK_THROWS_AS(unknown.accumulate_policy(r, 5, {0, 1}), Error);
}

TEST_CASE("ledger cumulative columns are compensated prefix sums") {
  RegretLedger ledger;
  long double exact = 0.0L;
  for (int t = 0; t < 1000000; ++t) {
    ledger.record(0.1, 0.05);
    exact += 0.1L;
  }
  CHECK(ledger.rounds() == 1000000);
  CHECK(std::abs(ledger.br_total() - static_cast<double>(exact)) <= 1e-9);
  CHECK(ledger.br_cumulative()[9] == doctest::Approx(1.0));
  CHECK(ledger.fb_total() == doctest::Approx(50000.0).epsilon(1e-14));

  RegretLedger small;
  for (double v : {1.0, 2.0, 3.0}) small.record(v, 0.0);
  CHECK(small.br_cumulative() == std::vector<double>{1.0, 3.0, 6.0});
}

TEST_CASE("dominance report") {
  const DominanceReport empty = dominance_report(RegretLedger{});
  CHECK(empty.fb_dominated);
  CHECK(empty.policy_within_slack);
  CHECK(empty.br_total == 0.0);
  CHECK(empty.policy_total == 0.0);

  RegretLedger bad;
  bad.record(0.1, 0.1);
  bad.record(0.1, 0.2);
  const DominanceReport r = dominance_report(bad);
  CHECK_FALSE(r.fb_dominated);
  CHECK(r.first_fb_violation == 2);
}
