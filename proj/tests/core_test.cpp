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

#include "duelbandit/core.hpp"

#include "test_util.hpp"

#include <doctest.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <array>
#include <sstream>

using namespace duelbandit;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kConfigError;
}

Matrix rps() {
  Matrix m(3, 3);
  m << 0, 1, -1, -1, 0, 1, 1, -1, 0;
  return m;
}

}  // namespace

TEST_CASE("validate accepts zero and rock-paper-scissors") {
  CHECK(validate_preference_matrix(Matrix::Zero(4, 4)).k() == 4);
  const PreferenceMatrix p = validate_preference_matrix(rps());
  CHECK(p(0, 1) == 1.0);
  CHECK(p(2, 0) == 1.0);
}

TEST_CASE("validate reports the offending entry") {
  Matrix sym(2, 2);
  sym << 0, 1, 1, 0;
  try {
    validate_preference_matrix(sym);
    FAIL("symmetric matrix accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSkewSymmetryViolation);
    REQUIRE(e.where().has_value());
    CHECK(*e.where() == std::pair{0, 1});
  }

  Matrix diag = Matrix::Zero(2, 2);
  diag(1, 1) = 0.1;
  CHECK(code_of([&] { validate_preference_matrix(diag); }) == ErrorCode::kDiagonalViolation);

  Matrix big = Matrix::Zero(2, 2);
  big(0, 1) = 1.5;
  big(1, 0) = -1.5;
  CHECK(code_of([&] { validate_preference_matrix(big); }) == ErrorCode::kRangeViolation);

  CHECK(code_of([&] { validate_preference_matrix(Matrix::Zero(2, 3)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("validate stores an exactly antisymmetric copy") {
  Matrix m(2, 2);
  m << 0, 0.3, -0.3 + 5e-13, 0;
  const PreferenceMatrix p = validate_preference_matrix(m);
  CHECK(p(1, 0) == -p(0, 1));
  CHECK(p(0, 1) == 0.3);
}

TEST_CASE("skew_complete builds the matrix from the upper triangle") {
  const std::array<double, 1> one{0.3};
  const PreferenceMatrix p = skew_complete(2, one);
  CHECK(p(0, 1) == 0.3);
  CHECK(p(1, 0) == -0.3);

  const std::array<double, 3> zeros{0, 0, 0};
  CHECK(skew_complete(3, zeros).entries().isZero(0.0));

  const std::array<double, 3> vals{0.1, 0.2, 0.3};
  const PreferenceMatrix q = skew_complete(3, vals);
  CHECK(q(0, 1) == 0.1);
  CHECK(q(0, 2) == 0.2);
  CHECK(q(1, 2) == 0.3);
}

TEST_CASE("skew_complete clamps out-of-range predictions and logs it") {
  std::ostringstream log;
  auto previous = spdlog::default_logger();
  auto capture = std::make_shared<spdlog::logger>(
      "capture", std::make_shared<spdlog::sinks::ostream_sink_mt>(log));
  spdlog::set_default_logger(capture);

  const std::array<double, 1> over{1.7};
  const PreferenceMatrix p = skew_complete(2, over);
  spdlog::set_default_logger(previous);

  CHECK(p(0, 1) == 1.0);
  CHECK(p(1, 0) == -1.0);
  CHECK(log.str().find("clamped 1 prediction") != std::string::npos);

  const std::array<double, 1> nan{std::nan("")};
  CHECK(code_of([&] { skew_complete(2, nan); }) == ErrorCode::kRangeViolation);
}

TEST_CASE("random skew completions always validate") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    std::vector<double> upper(num_pairs(k));
    for (auto& v : upper) v = rng.uniform(-1.0, 1.0);
    const PreferenceMatrix p = skew_complete(k, upper);
    CHECK_NOTHROW(validate_preference_matrix(p.entries()));
    CHECK(is_skew_symmetric(p.entries(), 0.0));
  }
}

TEST_CASE("pair_index enumerates the upper triangle in row-major order") {
  for (int k = 2; k <= 7; ++k) {
    int expected = 0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) CHECK(pair_index(k, a, b) == expected++);
    }
    CHECK(expected == num_pairs(k));
  }
}

TEST_CASE("distributions renormalize small drift and reject large drift") {
  Vector w(2);
  w << 0.5, 0.5 + 5e-7;
  const ActionDistribution d = ActionDistribution::from_weights(w);
  CHECK(std::abs(d.weights().sum() - 1.0) <= 1e-15);

  w << 0.5, 0.6;
  CHECK(code_of([&] { ActionDistribution::from_weights(w); }) == ErrorCode::kSimplexViolation);
  w << 1.1, -0.1;
  CHECK(code_of([&] { ActionDistribution::from_weights(w); }) == ErrorCode::kSimplexViolation);
}

TEST_CASE("marginals") {
  auto [l1, r1] = marginals(JointActionDistribution::uniform(2));
  CHECK(l1[0] == doctest::Approx(0.5));
  CHECK(r1[1] == doctest::Approx(0.5));

  auto [l2, r2] = marginals(JointActionDistribution::point_mass(2, 0, 1));
  CHECK(l2.weights() == Vector::Unit(2, 0));
  CHECK(r2.weights() == Vector::Unit(2, 1));

  Matrix w(2, 2);
  w << 0.1, 0.2, 0.3, 0.4;
  auto [l3, r3] = marginals(JointActionDistribution::from_weights(w));
  CHECK(l3[0] == doctest::Approx(0.3));
  CHECK(l3[1] == doctest::Approx(0.7));
  CHECK(r3[0] == doctest::Approx(0.4));
  CHECK(r3[1] == doctest::Approx(0.6));
}

TEST_CASE("marginals of random joints sum to one") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(8));
    Matrix w(k, k);
    for (int i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform();
    w /= w.sum();
    auto [l, r] = marginals(JointActionDistribution::from_weights(w));
    CHECK(std::abs(l.weights().sum() - 1.0) <= 1e-9);
    CHECK(std::abs(r.weights().sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("sample_outcome at the extremes is deterministic") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_outcome(1.0, rng) == 1);
    CHECK(sample_outcome(-1.0, rng) == -1);
  }
  CHECK(code_of([&] { sample_outcome(1.5, rng); }) == ErrorCode::kRangeViolation);
}

TEST_CASE("sample_outcome mean converges to the preference value") {
  Rng rng(5);
  const int n = 10000;
  int wins = 0;
  for (int i = 0; i < n; ++i) wins += sample_outcome(0.0, rng) == 1;
  CHECK(std::abs(wins / double(n) - 0.5) <= 0.02);

  for (double p : {-0.8, 0.0, 0.5}) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_outcome(p, rng);
    CHECK(std::abs(sum / n - p) <= 3.0 * std::sqrt(1.0 / n));
  }
}

TEST_CASE("sample_pair and sample_joint") {
  Rng rng(9);
  const auto point = ActionDistribution::point_mass(3, 2);
  for (int i = 0; i < 100; ++i) CHECK(sample_pair(point, rng) == Duel{2, 2});

  const auto joint = JointActionDistribution::point_mass(2, 0, 1);
  for (int i = 0; i < 100; ++i) CHECK(sample_joint(joint, rng) == Duel{0, 1});

  const int n = 10000;
  int counts[2][2] = {};
  const auto uniform = ActionDistribution::uniform(2);
  for (int i = 0; i < n; ++i) {
    const Duel d = sample_pair(uniform, rng);
    ++counts[d.a][d.b];
  }
  for (auto& row : counts) {
    for (int c : row) CHECK(std::abs(c / double(n) - 0.25) <= 0.02);
  }

  Matrix w(2, 2);
  w << 0.1, 0.2, 0.3, 0.4;
  int joint_counts[2][2] = {};
  const auto skewed = JointActionDistribution::from_weights(w);
  for (int i = 0; i < n; ++i) {
    const Duel d = sample_joint(skewed, rng);
    ++joint_counts[d.a][d.b];
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) CHECK(std::abs(joint_counts[a][b] / double(n) - w(a, b)) <= 0.02);
  }
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  const Rng root(42);
  Rng s0 = root.split(0), s0_again = root.split(0), s1 = root.split(1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = s0.next_u64();
    CHECK(x == s0_again.next_u64());
    equal += x == s1.next_u64();
  }
  CHECK(equal == 0);

  Rng c(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(c.below(7) < 7u);
  }
}

TEST_CASE("general matrices must be square and finite") {
  CHECK(code_of([] { GeneralMatrix(Matrix::Zero(2, 3)); }) == ErrorCode::kDimensionMismatch);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { GeneralMatrix{m}; }) == ErrorCode::kRangeViolation);
}
