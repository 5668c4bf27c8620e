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
#include "duelbandit/environments.hpp"
#include "duelbandit/games.hpp"
#include "duelbandit/oracles.hpp"

#include <cstdint>
#include <variant>

namespace duelbandit {

struct Selection {
  JointActionDistribution joint;
  Duel duel;
  int solver_iterations = 0;
};

/// Optimistic CCE learner for the non-contextual problem: tracks pairwise
/// win counts and plays a CCE of P_hat + C each round.
class CceDb {
 public:
  CceDb(int k, double delta, SolverConfig solver = {});

  Selection select(const Context& ctx, Rng& rng);
  void observe(const Context& ctx, Duel duel, int outcome);

  int k() const { return static_cast<int>(wins_.rows()); }
  double delta() const { return delta_; }
  /// Index of the next round to be played, starting at 1.
  std::int64_t t() const { return t_; }
  const Matrix& wins() const { return wins_; }

  /// N[i, j] = W[i, j] + W[j, i] off the diagonal and W[i, i] on it, so a
  /// duel (a, a) counts once.
  Matrix counts() const;
  Matrix estimate() const;
  /// Confidence widths at the current round; unexplored pairs get
  /// min(2, sqrt(0.5 log(K^2 t^2 / delta))).
  Matrix confidence() const;
  Matrix ucb() const;

  /// True when |P - P_hat| <= C on every off-diagonal pair.
  bool covers(const PreferenceMatrix& truth) const;

 private:
  Matrix wins_;
  double delta_;
  SolverConfig solver_;
  std::int64_t t_ = 1;
};

/// Linear-feature variant: ridge estimate of w with an elliptical bonus.
class CceLinDb {
 public:
  CceLinDb(int k, int dim, double lambda, double eta, SolverConfig solver = {});

  /// sqrt(d ln((1 + T/lambda) / delta)) + sqrt(lambda).
  static double default_eta(int dim, std::int64_t horizon, double lambda, double delta);

  Selection select(const Context& ctx, Rng& rng);
  void observe(const Context& ctx, Duel duel, int outcome);

  int k() const { return k_; }
  int dim() const { return static_cast<int>(moment_.size()); }
  double lambda() const { return lambda_; }
  double eta() const { return eta_; }
  std::int64_t t() const { return t_; }
  const Matrix& gram() const { return gram_; }

  Vector estimate() const;
  /// eta * sqrt(x' V^{-1} x) per pair; zero diagonal.
  Matrix confidence(const Context& ctx) const;
  Matrix ucb(const Context& ctx) const;

 private:
  void check(const Context& ctx) const;
  int k_;
  Matrix gram_;
  Vector moment_;
  double lambda_;
  double eta_;
  SolverConfig solver_;
  std::int64_t t_ = 1;
};

/// Reduction to online square-loss regression: plays p x p where p solves
/// the inverse-gap program for the oracle's predicted matrix.
class MinMaxDb {
 public:
  MinMaxDb(int k, OracleState oracle, double gamma, SolverConfig solver = {});

  Selection select(const Context& ctx, Rng& rng);
  void observe(const Context& ctx, Duel duel, int outcome);

  int k() const { return k_; }
  double gamma() const { return gamma_; }
  std::int64_t t() const { return t_; }
  const OracleState& oracle() const { return oracle_; }

  /// Skew-completed oracle predictions for the context.
  PreferenceMatrix predict_matrix(const Context& ctx) const;
  const std::optional<PreferenceMatrix>& last_prediction() const { return last_prediction_; }
  const std::optional<ActionDistribution>& last_marginal() const { return last_marginal_; }

 private:
  int k_;
  OracleState oracle_;
  double gamma_;
  SolverConfig solver_;
  std::int64_t t_ = 1;
  std::optional<PreferenceMatrix> last_prediction_;
  std::optional<ActionDistribution> last_marginal_;
};

/// sqrt(20 K T / budget(T)); throws HorizonTooShort when T < 4 K budget(T).
double default_gamma(int k, std::int64_t horizon, const RegretBudget& budget);

using Learner = std::variant<CceDb, CceLinDb, MinMaxDb>;

Selection select(Learner& learner, const Context& ctx, Rng& rng);
void observe(Learner& learner, const Context& ctx, Duel duel, int outcome);

}  // namespace duelbandit
