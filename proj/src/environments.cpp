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

#include "duelbandit/environments.hpp"

#include <algorithm>
#include <cmath>

namespace duelbandit {

namespace {

constexpr double kMarginCap = 0.8;

PreferenceMatrix random_skew(int k, double cap, Rng& rng) {
  Matrix m = Matrix::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      m(a, b) = rng.uniform(-cap, cap);
      m(b, a) = -m(a, b);
    }
  }
  return validate_preference_matrix(m);
}

}  // namespace

OracleInput make_oracle_input(const Context& ctx, int a, int b) {
  OracleInput z{ctx.id, a, b, {}};
  if (ctx.has_features()) z.features = ctx.pair_features(a, b);
  return z;
}

Environment Environment::fixed_matrix(PreferenceMatrix matrix) {
  Environment env(EnvironmentKind::kFixedMatrix, matrix.k());
  env.tables_.push_back(std::move(matrix));
  return env;
}

Environment Environment::finite_class(std::vector<PreferenceMatrix> tables) {
  if (tables.empty()) {
    throw Error(ErrorCode::kConfigError, "finite-class environment needs a context");
  }
  Environment env(EnvironmentKind::kFiniteClass, tables.front().k());
  for (const auto& t : tables) {
    if (t.k() != env.k_) {
      throw Error(ErrorCode::kDimensionMismatch, "context tables differ in K");
    }
  }
  env.tables_ = std::move(tables);
  return env;
}

Environment Environment::linear_realizable(int k, Vector w) {
  if (k < 2 || w.size() < 1) {
    throw Error(ErrorCode::kConfigError, "linear environment needs K >= 2, d >= 1");
  }
  Environment env(EnvironmentKind::kLinearRealizable, k);
  env.w_ = std::move(w);
  return env;
}

Environment& Environment::with_perturbation(double magnitude) {
  if (!(magnitude >= 0.0 && magnitude <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "perturbation must lie in [0, 1]");
  }
  perturbation_ = magnitude;
  return *this;
}

RoundDraw Environment::sample_round(Rng& rng) const {
  Context ctx;
  ctx.k = k_;
  switch (kind_) {
    case EnvironmentKind::kFixedMatrix:
      break;
    case EnvironmentKind::kFiniteClass:
      ctx.id = static_cast<std::size_t>(rng.below(tables_.size()));
      break;
    case EnvironmentKind::kLinearRealizable: {
      const int d = dim();
      ctx.features = Matrix::Zero(k_ * k_, d);
      for (int a = 0; a < k_; ++a) {
        for (int b = a + 1; b < k_; ++b) {
          for (int j = 0; j < d; ++j) ctx.features(a * k_ + b, j) = rng.uniform(-1.0, 1.0);
          ctx.features.row(b * k_ + a) = -ctx.features.row(a * k_ + b);
        }
      }
      const double peak = (ctx.features * w_).cwiseAbs().maxCoeff();
      if (peak > 1.0) ctx.features /= peak;
      break;
    }
  }
  PreferenceMatrix mean = ground_truth(ctx);
  if (perturbation_ == 0.0) return {std::move(ctx), std::move(mean)};

  Matrix m = mean.entries();
  for (int a = 0; a < k_; ++a) {
    for (int b = a + 1; b < k_; ++b) {
      const double room = std::min(perturbation_, 1.0 - std::abs(m(a, b)));
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      m(a, b) += sign * room;
      m(b, a) = -m(a, b);
    }
  }
  return {std::move(ctx), validate_preference_matrix(m)};
}

PreferenceMatrix Environment::ground_truth(const Context& ctx) const {
  switch (kind_) {
    case EnvironmentKind::kFixedMatrix:
    case EnvironmentKind::kFiniteClass:
      if (ctx.id >= tables_.size()) {
        throw Error(ErrorCode::kUnknownContext,
                    "context " + std::to_string(ctx.id) + " not produced here");
      }
      return tables_[ctx.id];
    case EnvironmentKind::kLinearRealizable: {
      if (ctx.k != k_ || ctx.features.rows() != k_ * k_ ||
          ctx.features.cols() != w_.size()) {
        throw Error(ErrorCode::kUnknownContext, "context has no matching features");
      }
      const Vector flat = ctx.features * w_;
      Matrix m(k_, k_);
      for (int a = 0; a < k_; ++a) {
        // The rescaling can leave the peak an ulp outside [-1, 1].
        for (int b = 0; b < k_; ++b) m(a, b) = std::clamp(flat(a * k_ + b), -1.0, 1.0);
      }
      return validate_preference_matrix(m);
    }
  }
  throw Error(ErrorCode::kUnknownContext, "unknown environment kind");
}

PreferenceMatrix rps3() {
  Matrix m(3, 3);
  m << 0, 1, -1,
      -1, 0, 1,
      1, -1, 0;
  return validate_preference_matrix(m);
}

PreferenceMatrix condorcet(int k, double margin) {
  if (!(margin > 0.0 && margin <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "condorcet margin must lie in (0, 1]");
  }
  Matrix m = Matrix::Zero(k, k);
  for (int j = 1; j < k; ++j) {
    m(0, j) = margin;
    m(j, 0) = -margin;
  }
  return validate_preference_matrix(m);
}

PreferenceMatrix hardness(double eps) {
  Matrix m(3, 3);
  m << 0, 1, 0,
      -1, 0, eps,
      0, -eps, 0;
  return validate_preference_matrix(m);
}

FiniteClassInstance make_finite_class(std::size_t n_contexts, int k,
                                      std::size_t class_size, Rng& rng) {
  if (class_size < 1 || n_contexts < 1) {
    throw Error(ErrorCode::kConfigError, "class_size and n_contexts must be >= 1");
  }
  std::vector<Hypothesis> hypotheses;
  hypotheses.reserve(class_size);
  for (std::size_t h = 0; h < class_size; ++h) {
    TabularHypothesis table;
    for (std::size_t c = 0; c < n_contexts; ++c) {
      table.by_context.push_back(random_skew(k, kMarginCap, rng));
    }
    hypotheses.emplace_back(std::move(table));
  }
  const auto true_index = static_cast<std::size_t>(rng.below(class_size));
  auto tables = std::get<TabularHypothesis>(hypotheses[true_index]).by_context;
  return {Environment::finite_class(std::move(tables)), std::move(hypotheses),
          true_index};
}

std::vector<Hypothesis> tournament_class(int k, double margin) {
  const int pairs = num_pairs(k);
  std::vector<Hypothesis> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) {
    std::vector<double> upper(pairs);
    for (int i = 0; i < pairs; ++i) upper[i] = (mask >> i) & 1 ? -margin : margin;
    out.emplace_back(TabularHypothesis{{skew_complete(k, upper)}});
  }
  return out;
}

Environment make_linear(int k, int dim, Rng& rng) {
  Vector w(dim);
  for (int j = 0; j < dim; ++j) w(j) = rng.uniform(-1.0, 1.0);
  return Environment::linear_realizable(k, std::move(w));
}

}  // namespace duelbandit
