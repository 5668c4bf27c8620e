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

#include <optional>

namespace duelbandit {

struct SolverConfig {
  int max_iterations = 50000;
  double violation_tolerance = 1e-8;
  /// Minimum per-arm mass for the inverse-gap program; defaults to 1/(4 gamma).
  std::optional<double> floor_epsilon;
};

/// Solution point plus the signed worst constraint violation
/// (<= 0 means strictly feasible).
template <typename Point>
struct FeasibilityReport {
  Point point;
  double max_violation = 0.0;
  int iterations = 0;
  bool converged = false;
};

using MarginalReport = FeasibilityReport<ActionDistribution>;
using JointReport = FeasibilityReport<JointActionDistribution>;

/// Worst violation of the two coarse-correlated-equilibrium families of u
/// under `joint`: a row deviation to a* against the right marginal, and a
/// column deviation b* (payoff u[b*, a]) against the left marginal.
template <typename DerivedU, typename DerivedP>
double cce_max_violation(const Eigen::MatrixBase<DerivedU>& u,
                         const Eigen::MatrixBase<DerivedP>& joint) {
  const Vector left = joint.rowwise().sum();
  const Vector right = joint.colwise().sum().transpose();
  const double row_value = joint.cwiseProduct(u).sum();
  const double col_value = joint.cwiseProduct(u.transpose()).sum();
  const double row_dev = (u * right).maxCoeff() - row_value;
  const double col_dev = (u * left).maxCoeff() - col_value;
  return std::max(row_dev, col_dev);
}

/// Left-hand sides of the inverse-gap program:
///   lhs_i = sum_b y[i, b] p[b] + (2 / gamma) / p[i].
template <typename DerivedY, typename DerivedP>
Vector igw_lhs(const Eigen::MatrixBase<DerivedY>& y,
               const Eigen::MatrixBase<DerivedP>& p, double gamma) {
  return y * p + (2.0 / gamma) * p.cwiseInverse();
}

/// Right-hand side 5K/gamma and the admissible numerical slack K/gamma.
inline double igw_budget(int k, double gamma) { return 5.0 * k / gamma; }
inline double igw_slack(int k, double gamma) { return k / gamma; }

/// Signed worst excess over the 5K/gamma budget (slack not included).
template <typename DerivedY, typename DerivedP>
double igw_max_violation(const Eigen::MatrixBase<DerivedY>& y,
                         const Eigen::MatrixBase<DerivedP>& p, double gamma) {
  return igw_lhs(y, p, gamma).maxCoeff() - igw_budget(static_cast<int>(y.rows()), gamma);
}

/// Coarse correlated equilibrium of a general-sum matrix, found by
/// minimizing the worst deviation gain t over the joint simplex.
/// Throws NotConverged if the LP fails or the result misses the tolerance.
JointReport solve_cce(const GeneralMatrix& u, const SolverConfig& config = {});

/// Maximin strategy q of a skew-symmetric game: min_j (q' P)_j >= -tol.
MarginalReport solve_zero_sum_nash(const PreferenceMatrix& p,
                                   const SolverConfig& config = {});

/// Finds p in the floored simplex with
///   sum_b y[i, b] p[b] + (2/gamma)/p[i] <= 5K/gamma + K/gamma  for all i,
/// by entropic mirror descent on the worst constraint, started at uniform.
/// Requires gamma >= 2K.
MarginalReport solve_minmax_feasibility(const PreferenceMatrix& y_hat,
                                        double gamma,
                                        const SolverConfig& config = {});

}  // namespace duelbandit
