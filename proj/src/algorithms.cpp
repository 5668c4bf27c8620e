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

#include "duelbandit/algorithms.hpp"

#include <cmath>
#include <string>

namespace duelbandit {

namespace {

constexpr double kUnexploredCap = 2.0;

void check_outcome(int outcome) {
  if (outcome != 1 && outcome != -1) {
    throw Error(ErrorCode::kRangeViolation,
                "outcome must be +1 or -1, got " + std::to_string(outcome));
  }
}

void check_duel(int k, Duel duel) {
  if (duel.a < 0 || duel.a >= k || duel.b < 0 || duel.b >= k) {
    throw Error(ErrorCode::kDimensionMismatch, "duel arm out of range");
  }
}

// U has a zero diagonal but is otherwise general-sum.
Selection play_cce(Matrix u, const SolverConfig& solver, Rng& rng) {
  u.diagonal().setZero();
  JointReport report = solve_cce(GeneralMatrix(std::move(u)), solver);
  const Duel duel = sample_joint(report.point, rng);
  return {std::move(report.point), duel, report.iterations};
}

}  // namespace

CceDb::CceDb(int k, double delta, SolverConfig solver)
    : wins_(Matrix::Zero(k, k)), delta_(delta), solver_(solver) {
  if (k < 2) throw Error(ErrorCode::kConfigError, "K must be at least 2");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kConfigError, "delta must lie in (0, 1)");
  }
}

Matrix CceDb::counts() const {
  Matrix n = wins_ + wins_.transpose();
  n.diagonal() = wins_.diagonal();
  return n;
}

Matrix CceDb::estimate() const {
  const Matrix n = counts();
  Matrix p = Matrix::Zero(k(), k());
  for (int i = 0; i < k(); ++i) {
    for (int j = 0; j < k(); ++j) {
      if (i != j && n(i, j) > 0.0) p(i, j) = 2.0 * wins_(i, j) / n(i, j) - 1.0;
    }
  }
  return p;
}

Matrix CceDb::confidence() const {
  const double kt = static_cast<double>(k()) * static_cast<double>(t_);
  const double log_term = std::log(kt * kt / delta_);
  const double unexplored = std::min(kUnexploredCap, std::sqrt(0.5 * log_term));
  const Matrix n = counts();
  Matrix c = Matrix::Zero(k(), k());
  for (int i = 0; i < k(); ++i) {
    for (int j = 0; j < k(); ++j) {
      if (i == j) continue;
      c(i, j) = n(i, j) > 0.0 ? std::sqrt(log_term / n(i, j)) : unexplored;
    }
  }
  return c;
}

Matrix CceDb::ucb() const {
  Matrix u = estimate() + confidence();
  u.diagonal().setZero();
  return u;
}

bool CceDb::covers(const PreferenceMatrix& truth) const {
  const Matrix gap = (truth.entries() - estimate()).cwiseAbs() - confidence();
  return gap.maxCoeff() <= 0.0;
}

Selection CceDb::select(const Context&, Rng& rng) {
  return play_cce(ucb(), solver_, rng);
}

void CceDb::observe(const Context&, Duel duel, int outcome) {
  check_outcome(outcome);
  check_duel(k(), duel);
  const double won = (outcome + 1) / 2.0;
  if (duel.a == duel.b) {
    wins_(duel.a, duel.a) += 1.0;
  } else {
    wins_(duel.a, duel.b) += won;
    wins_(duel.b, duel.a) += 1.0 - won;
  }
  ++t_;
}

CceLinDb::CceLinDb(int k, int dim, double lambda, double eta, SolverConfig solver)
    : k_(k),
      gram_(lambda * Matrix::Identity(dim, dim)),
      moment_(Vector::Zero(dim)),
      lambda_(lambda),
      eta_(eta),
      solver_(solver) {
  if (k < 2 || dim < 1) throw Error(ErrorCode::kConfigError, "need K >= 2 and d >= 1");
  if (!(lambda > 0.0)) throw Error(ErrorCode::kConfigError, "lambda must be positive");
  if (!(eta >= 0.0)) throw Error(ErrorCode::kConfigError, "eta must be nonnegative");
}

double CceLinDb::default_eta(int dim, std::int64_t horizon, double lambda, double delta) {
  const double ratio = (1.0 + static_cast<double>(horizon) / lambda) / delta;
  return std::sqrt(dim * std::log(ratio)) + std::sqrt(lambda);
}

void CceLinDb::check(const Context& ctx) const {
  if (ctx.k != k_ || ctx.features.rows() != k_ * k_ || ctx.features.cols() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "context features must be (K*K) x " + std::to_string(dim()));
  }
}

Vector CceLinDb::estimate() const { return gram_.llt().solve(moment_); }

Matrix CceLinDb::confidence(const Context& ctx) const {
  check(ctx);
  const Eigen::LLT<Matrix> llt(gram_);
  Matrix c = Matrix::Zero(k_, k_);
  for (int a = 0; a < k_; ++a) {
    for (int b = 0; b < k_; ++b) {
      if (a == b) continue;
      const Vector x = ctx.pair_features(a, b);
      c(a, b) = eta_ * std::sqrt(std::max(0.0, x.dot(llt.solve(x))));
    }
  }
  return c;
}

Matrix CceLinDb::ucb(const Context& ctx) const {
  const Vector w = estimate();
  Matrix u = confidence(ctx);
  for (int a = 0; a < k_; ++a) {
    for (int b = 0; b < k_; ++b) {
      if (a != b) u(a, b) += w.dot(ctx.pair_features(a, b));
    }
  }
  return u;
}

Selection CceLinDb::select(const Context& ctx, Rng& rng) {
  return play_cce(ucb(ctx), solver_, rng);
}

void CceLinDb::observe(const Context& ctx, Duel duel, int outcome) {
  check_outcome(outcome);
  check_duel(k_, duel);
  check(ctx);
  const Vector x = ctx.pair_features(duel.a, duel.b);
  gram_.noalias() += x * x.transpose();
  moment_ += outcome * x;
  ++t_;
}

MinMaxDb::MinMaxDb(int k, OracleState oracle, double gamma, SolverConfig solver)
    : k_(k), oracle_(std::move(oracle)), gamma_(gamma), solver_(solver) {
  if (k < 2) throw Error(ErrorCode::kConfigError, "K must be at least 2");
  if (!(gamma >= 2.0 * k)) {
    throw Error(ErrorCode::kGammaTooSmall,
                "gamma " + std::to_string(gamma) + " below 2K = " + std::to_string(2 * k));
  }
}

PreferenceMatrix MinMaxDb::predict_matrix(const Context& ctx) const {
  std::vector<double> upper;
  upper.reserve(num_pairs(k_));
  for (int a = 0; a < k_; ++a) {
    for (int b = a + 1; b < k_; ++b) {
      upper.push_back(predict(oracle_, make_oracle_input(ctx, a, b)));
    }
  }
  return skew_complete(k_, upper);
}

Selection MinMaxDb::select(const Context& ctx, Rng& rng) {
  PreferenceMatrix y_hat = predict_matrix(ctx);
  MarginalReport report = solve_minmax_feasibility(y_hat, gamma_, solver_);
  const Duel duel = sample_pair(report.point, rng);
  Selection out{JointActionDistribution::product(report.point, report.point), duel,
                report.iterations};
  last_prediction_ = std::move(y_hat);
  last_marginal_ = std::move(report.point);
  return out;
}

void MinMaxDb::observe(const Context& ctx, Duel duel, int outcome) {
  check_outcome(outcome);
  check_duel(k_, duel);
  if (duel.a != duel.b) {
    const bool flipped = duel.a > duel.b;
    const int lo = flipped ? duel.b : duel.a;
    const int hi = flipped ? duel.a : duel.b;
    update(oracle_, make_oracle_input(ctx, lo, hi), flipped ? -outcome : outcome);
  }
  ++t_;
}

double default_gamma(int k, std::int64_t horizon, const RegretBudget& budget) {
  const double t = static_cast<double>(horizon);
  const double reg = budget(t);
  if (!(reg > 0.0) || !std::isfinite(reg)) {
    throw Error(ErrorCode::kConfigError, "regret budget must be positive and finite");
  }
  if (t < 4.0 * k * reg) {
    throw Error(ErrorCode::kHorizonTooShort,
                "T = " + std::to_string(horizon) + " below 4K budget(T) = " +
                    std::to_string(4.0 * k * reg));
  }
  return std::sqrt(20.0 * k * t / reg);
}

Selection select(Learner& learner, const Context& ctx, Rng& rng) {
  return std::visit([&](auto& l) { return l.select(ctx, rng); }, learner);
}

void observe(Learner& learner, const Context& ctx, Duel duel, int outcome) {
  std::visit([&](auto& l) { l.observe(ctx, duel, outcome); }, learner);
}

}  // namespace duelbandit
