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

namespace duelbandit {

// Dense two-phase tableau simplex for
//   minimize  cost' x
//   s.t.      a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0.
// Sized for the K^2-variable equilibrium programs used here, not for
// general large-scale LPs.
struct LinearProgram {
  Vector cost;
  Matrix a_ub;
  Vector b_ub;
  Matrix a_eq;
  Vector b_eq;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

LpSolution solve_lp(const LinearProgram& lp, int max_iterations = 10000);

}  // namespace duelbandit
