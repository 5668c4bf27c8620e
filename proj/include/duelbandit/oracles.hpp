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

#pragma once

#include "duelbandit/core.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace duelbandit {

/// z = (context, a, b). Tabular oracles read `context_id`; linear oracles
/// read `features`, the d-dimensional feature vector of the pair.
struct OracleInput {
  std::size_t context_id = 0;
  int a = 0;
  int b = 0;
  Vector features;
};

/// A hypothesis stored as one preference matrix per (finite) context.
struct TabularHypothesis {
  std::vector<PreferenceMatrix> by_context;
};

/// A hypothesis evaluated on demand as clip(w' x(a, b)).
struct LinearHypothesis {
  Vector weights;
};

using Hypothesis = std::variant<TabularHypothesis, LinearHypothesis>;

double evaluate(const Hypothesis& h, const OracleInput& z);

/// Exponential weights over a finite class with the weighted-mean forecast.
/// Square loss on [-1, 1] is 1/8-exp-concave, so eta defaults to 1/8.
class FiniteClassAggregator {
 public:
  explicit FiniteClassAggregator(std::vector<Hypothesis> hypotheses,
                                 double eta = 1.0 / 8.0);

  double predict(const OracleInput& z) const;
  void update(const OracleInput& z, double y);

  std::size_t size() const { return hypotheses_.size(); }
  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  const Vector& log_weights() const { return log_weights_; }
  Vector weights() const;
  double eta() const { return eta_; }

 private:
  std::vector<Hypothesis> hypotheses_;
  Vector log_weights_;
  double eta_;
};

/// Vovk-Azoury-Warmuth forecaster. The query point joins the regularized
/// design before predicting: y_hat = b' (A + x x')^{-1} x.
class VawForecaster {
 public:
  explicit VawForecaster(int dim, double lambda = 1.0);

  double predict(const OracleInput& z) const;
  void update(const OracleInput& z, double y);

  int dim() const { return static_cast<int>(b_.size()); }
  double lambda() const { return lambda_; }
  const Matrix& gram() const { return a_; }
  const Vector& moment() const { return b_; }

 private:
  void check(const Vector& x) const;
  Matrix a_;
  Vector b_;
  double lambda_;
};

/// Projected online gradient descent on the square loss over the l2 ball.
class OgdForecaster {
 public:
  OgdForecaster(int dim, double radius, double step);

  /// Step radius / (L sqrt(T)) with L = 2 (radius * feature_norm + 1) * feature_norm.
  static double default_step(double radius, double feature_norm, std::int64_t horizon);

  double predict(const OracleInput& z) const;
  void update(const OracleInput& z, double y);

  const Vector& theta() const { return theta_; }
  double radius() const { return radius_; }
  double step() const { return step_; }

 private:
  void check(const Vector& x) const;
  Vector theta_;
  double radius_;
  double step_;
};

using OracleState = std::variant<FiniteClassAggregator, VawForecaster, OgdForecaster>;

/// Pure query; never mutates the oracle. Result lies in [-1, 1].
double predict(const OracleState& state, const OracleInput& z);
void update(OracleState& state, const OracleInput& z, double y);

enum class OracleKind { kFiniteClass, kVaw, kOgd, kGlm, kRkhs, kBanach };

OracleKind oracle_kind_from_string(const std::string& name);

struct ClassParams {
  std::size_t class_size = 1;
  int dim = 1;
  double lambda = 1.0;
  double radius = 1.0;
  double feature_norm = 1.0;
};

/// T -> upper bound on the oracle's cumulative square-loss regret.
struct RegretBudget {
  std::function<double(double)> bound;
  std::string description;
  double operator()(double horizon) const { return bound(horizon); }
};

/// Finite class: 8 ln|F|. VAW: d ln(1 + T/d) + lambda * radius^2.
/// OGD: 2.5 * radius * L * sqrt(T). GLM, RKHS and Banach oracles are
/// unsupported.
RegretBudget regret_budget(OracleKind kind, const ClassParams& params);

}  // namespace duelbandit
