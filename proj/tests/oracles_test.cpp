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

#include "duelbandit/oracles.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace duelbandit;

namespace {

OracleInput scalar(double x) {
  OracleInput z;
  z.features = Vector::Constant(1, x);
  return z;
}

OracleInput pair01(std::size_t context = 0) { return {context, 0, 1, {}}; }

Hypothesis constant(double value) {
  Matrix m(2, 2);
  m << 0, value, -value, 0;
  return TabularHypothesis{{validate_preference_matrix(m)}};
}

Vector random_unit(int d, Rng& rng) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform(-1, 1);
  return x / std::max(1.0, x.norm());
}

}  // namespace

TEST_CASE("single-hypothesis aggregator repeats its hypothesis") {
  FiniteClassAggregator agg({constant(0.3)});
  CHECK(agg.predict(pair01()) == doctest::Approx(0.3));
  agg.update(pair01(), -1.0);
  CHECK(agg.predict(pair01()) == doctest::Approx(0.3));
}

TEST_CASE("aggregator moves weight toward the hypothesis with smaller loss") {
  FiniteClassAggregator agg({constant(-1.0), constant(1.0)});
  const Vector before = agg.weights();
  agg.update(pair01(), 1.0);
  const Vector after = agg.weights();
  CHECK(after(1) / after(0) > before(1) / before(0));
  CHECK(std::abs(after.sum() - 1.0) <= 1e-12);
  CHECK(agg.log_weights().allFinite());
}

TEST_CASE("tabular hypothesis outside its contexts") {
  FiniteClassAggregator agg({constant(0.1)});
  try {
    agg.predict(pair01(3));
    FAIL("unknown context accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownContext);
  }
}

TEST_CASE("vaw closed forms in one dimension") {
  VawForecaster vaw(1, 1.0);
  CHECK(vaw.predict(scalar(1.0)) == 0.0);
  vaw.update(scalar(1.0), 1.0);
  CHECK(vaw.predict(scalar(1.0)) == doctest::Approx(1.0 / 3.0));

  VawForecaster repeated(1, 1.0);
  double previous = -1.0;
  for (int n = 1; n <= 50; ++n) {
    repeated.update(scalar(1.0), 1.0);
    const double y = repeated.predict(scalar(1.0));
    CHECK(y == doctest::Approx(n / (n + 2.0)));
    CHECK(y > previous);
    previous = y;
  }
}

TEST_CASE("vaw agrees with an explicit ridge solve that includes the query") {
  Rng rng(3);
  const int d = 3;
  VawForecaster vaw(d, 0.7);
  Matrix a = 0.7 * Matrix::Identity(d, d);
  Vector b = Vector::Zero(d);
  for (int t = 0; t < 40; ++t) {
    OracleInput z;
    z.features = random_unit(d, rng);
    const Matrix with_query = a + z.features * z.features.transpose();
    const double expected = std::clamp(b.dot(with_query.inverse() * z.features), -1.0, 1.0);
    CHECK(vaw.predict(z) == doctest::Approx(expected).epsilon(1e-10));
    const double y = rng.uniform() < 0.5 ? -1.0 : 1.0;
    vaw.update(z, y);
    a += z.features * z.features.transpose();
    b += y * z.features;
  }
}

TEST_CASE("vaw gram matrix stays above lambda") {
  Rng rng(5);
  const double lambda = 0.5;
  VawForecaster vaw(4, lambda);
  for (int t = 0; t < 200; ++t) {
    OracleInput z;
    z.features = random_unit(4, rng);
    vaw.update(z, rng.uniform(-1, 1));
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(vaw.gram());
  CHECK(eig.eigenvalues().minCoeff() >= lambda - 1e-12);
  CHECK((vaw.gram() - vaw.gram().transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ogd single step and projection") {
  OgdForecaster ogd(2, 1.0, 0.25);
  OracleInput z;
  z.features = Vector::Unit(2, 0);
  ogd.update(z, 1.0);
  CHECK(ogd.theta()(0) == doctest::Approx(0.5));
  CHECK(ogd.theta()(1) == 0.0);

  OgdForecaster tight(2, 0.3, 0.25);
  tight.update(z, 1.0);
  CHECK(tight.theta().norm() == doctest::Approx(0.3));
}

TEST_CASE("predictions are pure and stay in range") {
  Rng rng(9);
  std::vector<OracleState> states;
  states.emplace_back(FiniteClassAggregator({constant(0.4), constant(-0.9)}));
  states.emplace_back(VawForecaster(2));
  states.emplace_back(OgdForecaster(2, 5.0, 0.5));
  for (auto& s : states) {
    for (int t = 0; t < 100; ++t) {
      OracleInput z = pair01();
      z.features = 3.0 * random_unit(2, rng);
      const double first = predict(s, z);
      CHECK(first == predict(s, z));
      CHECK(std::abs(first) <= 1.0);
      update(s, z, rng.uniform() < 0.5 ? -1.0 : 1.0);
    }
  }
  CHECK_THROWS_AS(update(states[1], pair01(), 2.0), Error);
}

TEST_CASE("dimension mismatches are reported") {
  VawForecaster vaw(3);
  try {
    vaw.predict(scalar(1.0));
    FAIL("wrong feature length accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("regret budgets") {
  ClassParams finite;
  finite.class_size = 16;
  const RegretBudget b = regret_budget(OracleKind::kFiniteClass, finite);
  CHECK(b(10.0) == doctest::Approx(8.0 * std::log(16.0)));
  CHECK(b(1e6) == doctest::Approx(8.0 * std::log(16.0)));

  ClassParams vaw;
  vaw.dim = 4;
  const RegretBudget v = regret_budget(OracleKind::kVaw, vaw);
  CHECK(v(1000.0) == doctest::Approx(4.0 * std::log(1.0 + 1000.0 / 4.0) + 1.0));

  ClassParams ogd;
  ogd.dim = 2;
  ogd.radius = 2.0;
  ogd.feature_norm = 1.0;
  const RegretBudget o = regret_budget(OracleKind::kOgd, ogd);
  const double lipschitz = 2.0 * (2.0 * 1.0 + 1.0) * 1.0;
  CHECK(o(100.0) == doctest::Approx(2.5 * 2.0 * lipschitz * 10.0));

  for (const auto& budget : {b, v, o}) {
    double last = 0.0;
    for (double t = 1; t <= 1e6; t *= 3) {
      CHECK(budget(t) >= last);
      last = budget(t);
    }
  }

  for (auto kind : {OracleKind::kGlm, OracleKind::kRkhs, OracleKind::kBanach}) {
    try {
      regret_budget(kind, finite);
      FAIL("unsupported oracle accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnsupportedOracle);
    }
  }
  CHECK(oracle_kind_from_string("glm") == OracleKind::kGlm);
  CHECK_THROWS_AS(oracle_kind_from_string("nope"), Error);
}

TEST_CASE("aggregator regret against the best hypothesis on adversarial labels") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Hypothesis> hyps;
    for (int i = 0; i < 16; ++i) hyps.push_back(constant(rng.uniform(-1, 1)));
    FiniteClassAggregator agg(hyps);
    std::vector<double> expert_loss(hyps.size(), 0.0);
    double online = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const double y_hat = agg.predict(pair01());
      // Label against the forecast, occasionally randomized.
      const double y = rng.uniform() < 0.8 ? (y_hat > 0 ? -1.0 : 1.0) : rng.uniform(-1, 1);
      online += (y_hat - y) * (y_hat - y);
      for (std::size_t i = 0; i < hyps.size(); ++i) {
        const double e = evaluate(hyps[i], pair01()) - y;
        expert_loss[i] += e * e;
      }
      agg.update(pair01(), y);
    }
    const double best = *std::min_element(expert_loss.begin(), expert_loss.end());
    ClassParams p;
    p.class_size = hyps.size();
    CHECK(online - best <= regret_budget(OracleKind::kFiniteClass, p)(1000.0) + 1.0);
  }
}

TEST_CASE("vaw regret against the ridge comparator on adversarial labels") {
  Rng rng(17);
  const int d = 3;
  const int horizon = 1000;
  VawForecaster vaw(d);
  Matrix gram = Matrix::Identity(d, d);
  Vector moment = Vector::Zero(d);
  double online = 0.0, label_energy = 0.0;
  for (int t = 0; t < horizon; ++t) {
    OracleInput z;
    z.features = random_unit(d, rng);
    const double y_hat = vaw.predict(z);
    const double y = y_hat > 0 ? -1.0 : 1.0;
    online += (y_hat - y) * (y_hat - y);
    vaw.update(z, y);
    gram += z.features * z.features.transpose();
    moment += y * z.features;
    label_energy += y * y;
  }
  // min_theta |theta|^2 + sum (theta'x - y)^2 = sum y^2 - m' G^{-1} m.
  const double ridge = label_energy - moment.dot(gram.ldlt().solve(moment));
  ClassParams p;
  p.dim = d;
  CHECK(online - ridge <= regret_budget(OracleKind::kVaw, p)(horizon) + 1.0);
}

TEST_CASE("ogd regret against the best point of the ball") {
  Rng rng(19);
  const int d = 2;
  const int horizon = 1000;
  const double radius = 1.0;
  const double step = OgdForecaster::default_step(radius, 1.0, horizon);
  OgdForecaster ogd(d, radius, step);
  std::vector<Vector> xs;
  std::vector<double> ys;
  double online = 0.0;
  for (int t = 0; t < horizon; ++t) {
    OracleInput z;
    z.features = random_unit(d, rng);
    const double y_hat = ogd.predict(z);
    const double y = rng.uniform() < 0.7 ? (y_hat > 0 ? -1.0 : 1.0) : 1.0;
    online += (y_hat - y) * (y_hat - y);
    ogd.update(z, y);
    xs.push_back(z.features);
    ys.push_back(y);
  }
  // Ball-constrained least squares by projected gradient.
  Matrix g = Matrix::Zero(d, d);
  Vector m = Vector::Zero(d);
  for (int t = 0; t < horizon; ++t) {
    g += xs[t] * xs[t].transpose();
    m += ys[t] * xs[t];
  }
  const double lip = 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues().maxCoeff();
  Vector theta = Vector::Zero(d);
  for (int it = 0; it < 5000; ++it) {
    theta -= (2.0 * (g * theta - m)) / lip;
    if (theta.norm() > radius) theta *= radius / theta.norm();
  }
  double best = 0.0;
  for (int t = 0; t < horizon; ++t) best += std::pow(theta.dot(xs[t]) - ys[t], 2);
  ClassParams p;
  p.dim = d;
  p.radius = radius;
  p.feature_norm = 1.0;
  CHECK(online - best <= regret_budget(OracleKind::kOgd, p)(horizon) + 1.0);
}
