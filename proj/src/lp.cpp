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

#include "duelbandit/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace duelbandit {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-11;
// Consecutive degenerate pivots before switching to Bland's rule.
constexpr int kDegenerateStreak = 50;

class Tableau {
 public:
  // Rows 0..m-1 are constraints, row m is the objective (reduced costs).
  // The last column holds the right-hand side.
  Tableau(Matrix t, std::vector<int> basis, int num_allowed)
      : t_(std::move(t)), basis_(std::move(basis)), num_allowed_(num_allowed) {}

  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int rhs_col() const { return static_cast<int>(t_.cols()) - 1; }

  // Runs primal simplex on the current objective row. Columns >= num_allowed_
  // never enter the basis.
  LpStatus run(int max_iterations, int& iterations) {
    int degenerate = 0;
    while (true) {
      if (iterations >= max_iterations) return LpStatus::kIterationLimit;
      const bool bland = degenerate >= kDegenerateStreak;
      const int enter = choose_entering(bland);
      if (enter < 0) return LpStatus::kOptimal;
      const int leave = choose_leaving(enter);
      if (leave < 0) return LpStatus::kUnbounded;
      degenerate = t_(leave, rhs_col()) <= kPivotEps ? degenerate + 1 : 0;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int r = 0; r < t_.rows(); ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (f != 0.0) t_.row(r) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  // Rebuilds the objective row as reduced costs of `cost` for the current basis.
  void set_objective(const Vector& cost) {
    const int m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cost.size()) = cost.transpose();
    for (int r = 0; r < m; ++r) {
      const int b = basis_[r];
      const double cb = b < cost.size() ? cost(b) : 0.0;
      if (cb != 0.0) t_.row(m) -= cb * t_.row(r);
    }
  }

  // Objective value of the current basic solution (row stores -z).
  double objective() const { return -t_(rows(), rhs_col()); }

  Matrix& data() { return t_; }
  std::vector<int>& basis() { return basis_; }
  void set_allowed(int n) { num_allowed_ = n; }

 private:
  int choose_entering(bool bland) const {
    const int m = rows();
    int best = -1;
    double best_val = -kCostEps;
    for (int j = 0; j < num_allowed_; ++j) {
      const double r = t_(m, j);
      if (r < -kCostEps) {
        if (bland) return j;
        if (r < best_val) {
          best_val = r;
          best = j;
        }
      }
    }
    return best;
  }

  int choose_leaving(int col) const {
    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows(); ++r) {
      const double a = t_(r, col);
      if (a <= kPivotEps) continue;
      const double ratio = t_(r, rhs_col()) / a;
      if (ratio < best_ratio - 1e-14 ||
          (std::abs(ratio - best_ratio) <= 1e-14 && basis_[r] < basis_[best])) {
        best_ratio = ratio;
        best = r;
      }
    }
    return best;
  }

  Matrix t_;
  std::vector<int> basis_;
  int num_allowed_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, int max_iterations) {
  const int n = static_cast<int>(lp.cost.size());
  const int m_ub = static_cast<int>(lp.a_ub.rows());
  const int m_eq = static_cast<int>(lp.a_eq.rows());
  if ((m_ub > 0 && (lp.a_ub.cols() != n || lp.b_ub.size() != m_ub)) ||
      (m_eq > 0 && (lp.a_eq.cols() != n || lp.b_eq.size() != m_eq))) {
    throw Error(ErrorCode::kDimensionMismatch, "inconsistent LP dimensions");
  }
  const int m = m_ub + m_eq;

  // Rows whose slack cannot start basic (negative rhs or equality) get an
  // artificial column.
  std::vector<int> artificial_rows;
  for (int i = 0; i < m_ub; ++i) {
    if (lp.b_ub(i) < 0.0) artificial_rows.push_back(i);
  }
  for (int i = 0; i < m_eq; ++i) artificial_rows.push_back(m_ub + i);

  const int num_art = static_cast<int>(artificial_rows.size());
  const int cols = n + m_ub + num_art + 1;
  Matrix t = Matrix::Zero(m + 1, cols);
  std::vector<int> basis(m, -1);

  for (int i = 0; i < m_ub; ++i) {
    t.row(i).head(n) = lp.a_ub.row(i);
    t(i, n + i) = 1.0;
    t(i, cols - 1) = lp.b_ub(i);
    basis[i] = n + i;
  }
  for (int i = 0; i < m_eq; ++i) {
    t.row(m_ub + i).head(n) = lp.a_eq.row(i);
    t(m_ub + i, cols - 1) = lp.b_eq(i);
  }
  for (int a = 0; a < num_art; ++a) {
    const int r = artificial_rows[a];
    if (t(r, cols - 1) < 0.0) t.row(r) *= -1.0;
    t(r, n + m_ub + a) = 1.0;
    basis[r] = n + m_ub + a;
  }

  Tableau tab(std::move(t), std::move(basis), n + m_ub + num_art);
  LpSolution sol;

  if (num_art > 0) {
    Vector phase1 = Vector::Zero(cols - 1);
    phase1.segment(n + m_ub, num_art).setOnes();
    tab.set_objective(phase1);
    const LpStatus s = tab.run(max_iterations, sol.iterations);
    if (s == LpStatus::kIterationLimit) {
      sol.status = s;
      return sol;
    }
    const double scale = 1.0 + tab.data().col(cols - 1).head(m).cwiseAbs().maxCoeff();
    if (tab.objective() > 1e-9 * scale) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (tab.basis()[r] < n + m_ub) continue;
      for (int j = 0; j < n + m_ub; ++j) {
        if (std::abs(tab.data()(r, j)) > 1e-9) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }

  tab.set_allowed(n + m_ub);
  Vector phase2 = Vector::Zero(cols - 1);
  phase2.head(n) = lp.cost;
  tab.set_objective(phase2);
  sol.status = tab.run(max_iterations, sol.iterations);
  if (sol.status != LpStatus::kOptimal) return sol;

  sol.x = Vector::Zero(n);
  for (int r = 0; r < m; ++r) {
    const int b = tab.basis()[r];
    if (b < n) sol.x(b) = std::max(0.0, tab.data()(r, cols - 1));
  }
  sol.objective = lp.cost.dot(sol.x);
  return sol;
}

}  // namespace duelbandit
