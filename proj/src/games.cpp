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

#include "duelbandit/lp.hpp"

#include <cmath>
#include <sstream>

namespace duelbandit {

namespace {

std::string not_converged(const char* who, double violation, int iterations) {
  std::ostringstream os;
  os << who << ": violation " << violation << " after " << iterations
     << " iterations";
  return os.str();
}

// Zeroes tiny negative LP round-off and restores unit mass.
Vector clean_simplex(Vector x) {
  x = x.cwiseMax(0.0);
  return x / x.sum();
}

}  // namespace

JointReport solve_cce(const GeneralMatrix& u_in, const SolverConfig& config) {
  const Matrix& u = u_in.entries();
  const int k = u_in.k();
  const int n = k * k;
  const double bound = 2.0 * u.cwiseAbs().maxCoeff() + 1.0;

  // x = (p[0,0], p[0,1], ..., p[k-1,k-1], s) with t = bound - s the largest
  // deviation gain; minimizing t maximizes s.
  LinearProgram lp;
  lp.cost = Vector::Zero(n + 1);
  lp.cost(n) = -1.0;
  lp.a_ub = Matrix::Zero(2 * k, n + 1);
  lp.b_ub = Vector::Constant(2 * k, bound);
  for (int dev = 0; dev < k; ++dev) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        lp.a_ub(dev, a * k + b) = u(dev, b) - u(a, b);
        lp.a_ub(k + dev, a * k + b) = u(dev, a) - u(b, a);
      }
    }
    lp.a_ub(dev, n) = 1.0;
    lp.a_ub(k + dev, n) = 1.0;
  }
  lp.a_eq = Matrix::Zero(1, n + 1);
  lp.a_eq.row(0).head(n).setOnes();
  lp.b_eq = Vector::Ones(1);

  const LpSolution sol = solve_lp(lp, config.max_iterations);
  if (sol.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kNotConverged,
                std::string("solve_cce: LP ") + to_string(sol.status));
  }
  const Vector flat = clean_simplex(sol.x.head(n));
  // Row-major flat vector back into a K x K matrix.
  Matrix joint = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), k, k);
  const double violation = cce_max_violation(u, joint);
  if (violation > config.violation_tolerance) {
    throw Error(ErrorCode::kNotConverged,
                not_converged("solve_cce", violation, sol.iterations));
  }
  return {JointActionDistribution::from_weights(joint), violation, sol.iterations,
          true};
}

MarginalReport solve_zero_sum_nash(const PreferenceMatrix& p,
                                   const SolverConfig& config) {
  const Matrix& m = p.entries();
  const int k = p.k();
  // x = (q, w) with game value v = w - 1; maximize w subject to
  // v <= (q' P)_j for every column j.
  LinearProgram lp;
  lp.cost = Vector::Zero(k + 1);
  lp.cost(k) = -1.0;
  lp.a_ub = Matrix::Zero(k, k + 1);
  lp.a_ub.leftCols(k) = -m.transpose();
  lp.a_ub.col(k).setOnes();
  lp.b_ub = Vector::Ones(k);
  lp.a_eq = Matrix::Zero(1, k + 1);
  lp.a_eq.row(0).head(k).setOnes();
  lp.b_eq = Vector::Ones(1);

  const LpSolution sol = solve_lp(lp, config.max_iterations);
  if (sol.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kNotConverged,
                std::string("solve_zero_sum_nash: LP ") + to_string(sol.status));
  }
  const Vector q = clean_simplex(sol.x.head(k));
  const double violation = -(m.transpose() * q).minCoeff();
  if (violation > config.violation_tolerance) {
    throw Error(ErrorCode::kNotConverged,
                not_converged("solve_zero_sum_nash", violation, sol.iterations));
  }
  return {ActionDistribution::from_weights(q), violation, sol.iterations, true};
}

namespace {

// KL projection onto {p : p_i >= floor, sum p = 1}: pin low coordinates at
// the floor and rescale the rest, repeating until nothing falls below.
void project_floor(Vector& p, double floor) {
  const int k = static_cast<int>(p.size());
  Eigen::Array<bool, Eigen::Dynamic, 1> pinned =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(k, false);
  while (true) {
    bool changed = false;
    for (int i = 0; i < k; ++i) {
      if (!pinned(i) && p(i) < floor) {
        pinned(i) = true;
        changed = true;
      }
    }
    const int num_pinned = static_cast<int>(pinned.count());
    double free_mass = 0.0;
    for (int i = 0; i < k; ++i) {
      if (!pinned(i)) free_mass += p(i);
    }
    const double target = 1.0 - num_pinned * floor;
    for (int i = 0; i < k; ++i) {
      p(i) = pinned(i) ? floor : p(i) * target / free_mass;
    }
    if (!changed) return;
  }
}

}  // namespace

MarginalReport solve_minmax_feasibility(const PreferenceMatrix& y_hat,
                                        double gamma,
                                        const SolverConfig& config) {
  const int k = y_hat.k();
  if (!(gamma >= 2.0 * k)) {
    throw Error(ErrorCode::kGammaTooSmall,
                "gamma " + std::to_string(gamma) + " < 2K = " + std::to_string(2 * k));
  }
  const double floor = config.floor_epsilon.value_or(1.0 / (4.0 * gamma));
  if (!(floor > 0.0 && floor < 1.0 / k)) {
    throw Error(ErrorCode::kConfigError, "floor_epsilon must lie in (0, 1/K)");
  }
  const Matrix& y = y_hat.entries();
  const double stop = 0.5 * igw_slack(k, gamma);
  const double step = 1.0 / (gamma * k);

  Vector p = Vector::Constant(k, 1.0 / k);
  double violation = 0.0;
  for (int it = 0; it <= config.max_iterations; ++it) {
    const Vector excess = igw_lhs(y, p, gamma).array() - igw_budget(k, gamma);
    Eigen::Index worst = 0;
    violation = excess.maxCoeff(&worst);
    if (violation <= stop) {
      return {ActionDistribution::from_weights(p), violation, it, true};
    }
    if (it == config.max_iterations) break;
    // Subgradient of the worst constraint.
    Vector grad = y.row(worst).transpose();
    grad(worst) -= (2.0 / gamma) / (p(worst) * p(worst));
    p = p.cwiseProduct((-step * grad).array().exp().matrix());
    p /= p.sum();
    project_floor(p, floor);
  }
  throw Error(ErrorCode::kNotConverged,
              not_converged("solve_minmax_feasibility", violation,
                            config.max_iterations));
}

}  // namespace duelbandit
