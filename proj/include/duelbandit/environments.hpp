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
#include "duelbandit/oracles.hpp"

#include <string>
#include <vector>

namespace duelbandit {

/// What the learner sees each round. `features` is empty for tabular
/// environments; otherwise row a * K + b holds the pair's d-vector.
struct Context {
  std::size_t id = 0;
  int k = 0;
  Matrix features;

  bool has_features() const { return features.size() > 0; }
  Vector pair_features(int a, int b) const { return features.row(a * k + b).transpose(); }
};

/// Oracle query for pair (a, b) under this context.
OracleInput make_oracle_input(const Context& ctx, int a, int b);

enum class EnvironmentKind { kFixedMatrix, kFiniteClass, kLinearRealizable };

/// A context together with the realized preference matrix of the round.
/// Only the harness sees `realized`; learners receive `context`.
struct RoundDraw {
  Context context;
  PreferenceMatrix realized;
};

class Environment {
 public:
  static Environment fixed_matrix(PreferenceMatrix matrix);
  /// f*(x) = tables[x] for x uniform over the table index.
  static Environment finite_class(std::vector<PreferenceMatrix> tables);
  /// f*(x)[a, b] = w' x[a, b] with skew-symmetric, rescaled features.
  static Environment linear_realizable(int k, Vector w);

  /// Realized matrices fluctuate around f*(x) by a zero-mean skew
  /// perturbation of at most `magnitude` (clipped to stay in [-1, 1]).
  Environment& with_perturbation(double magnitude);

  EnvironmentKind kind() const { return kind_; }
  int k() const { return k_; }
  int dim() const { return static_cast<int>(w_.size()); }
  std::size_t num_contexts() const { return tables_.size(); }
  const Vector& weights() const { return w_; }

  RoundDraw sample_round(Rng& rng) const;

  /// Exact conditional mean f*(x). Evaluation only.
  PreferenceMatrix ground_truth(const Context& ctx) const;

 private:
  Environment(EnvironmentKind kind, int k) : kind_(kind), k_(k) {}

  EnvironmentKind kind_;
  int k_;
  std::vector<PreferenceMatrix> tables_;
  Vector w_;
  double perturbation_ = 0.0;
};

/// Cyclic rock-paper-scissors matrix.
PreferenceMatrix rps3();
/// Arm 0 beats every other arm by `margin`; all other pairs are ties.
PreferenceMatrix condorcet(int k, double margin);
/// [[0, 1, 0], [-1, 0, eps], [0, -eps, 0]].
PreferenceMatrix hardness(double eps);

struct FiniteClassInstance {
  Environment environment;
  std::vector<Hypothesis> hypotheses;
  std::size_t true_index = 0;
};

/// Draws `class_size` random tabular hypotheses over `n_contexts` contexts
/// (entries uniform on [-0.8, 0.8], antisymmetrized) and picks one as f*.
FiniteClassInstance make_finite_class(std::size_t n_contexts, int k,
                                      std::size_t class_size, Rng& rng);

/// All 2^(K(K-1)/2) orientations of a K-arm tournament with the given margin,
/// as single-context hypotheses.
std::vector<Hypothesis> tournament_class(int k, double margin);

/// Linear environment with w uniform on [-1, 1]^d.
Environment make_linear(int k, int dim, Rng& rng);

}  // namespace duelbandit
