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

#include "duelbandit/core.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace duelbandit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSkewSymmetryViolation: return "SkewSymmetryViolation";
    case ErrorCode::kRangeViolation: return "RangeViolation";
    case ErrorCode::kDiagonalViolation: return "DiagonalViolation";
    case ErrorCode::kSimplexViolation: return "SimplexViolation";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kGammaTooSmall: return "GammaTooSmall";
    case ErrorCode::kHorizonTooShort: return "HorizonTooShort";
    case ErrorCode::kUnsupportedOracle: return "UnsupportedOracle";
    case ErrorCode::kUnknownContext: return "UnknownContext";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string entry_message(const char* what, int i, int j, double v) {
  std::ostringstream os;
  os << what << " at (" << i << ", " << j << "): " << v;
  return os.str();
}

}  // namespace

PreferenceMatrix PreferenceMatrix::zero(int k) {
  if (k < 2) throw Error(ErrorCode::kDimensionMismatch, "arm count must be >= 2");
  return PreferenceMatrix(Matrix::Zero(k, k));
}

PreferenceMatrix validate_preference_matrix(
    const Eigen::Ref<const Matrix>& entries) {
  const Eigen::Index k = entries.rows();
  if (k < 2 || entries.cols() != k) {
    throw Error(ErrorCode::kDimensionMismatch,
                "preference matrix must be square with K >= 2");
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double v = entries(i, j);
      if (!std::isfinite(v) || std::abs(v) > 1.0) {
        throw Error(ErrorCode::kRangeViolation,
                    entry_message("entry outside [-1, 1]", i, j, v),
                    std::pair{i, j});
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    if (std::abs(entries(i, i)) > kSkewTolerance) {
      throw Error(ErrorCode::kDiagonalViolation,
                  entry_message("nonzero diagonal", i, i, entries(i, i)),
                  std::pair{i, i});
    }
    for (int j = i + 1; j < k; ++j) {
      if (std::abs(entries(i, j) + entries(j, i)) > kSkewTolerance) {
        throw Error(ErrorCode::kSkewSymmetryViolation,
                    entry_message("not skew-symmetric", i, j, entries(i, j)),
                    std::pair{i, j});
      }
    }
  }
  Matrix m = Matrix::Zero(k, k);
  m.triangularView<Eigen::StrictlyUpper>() = entries;
  m.triangularView<Eigen::StrictlyLower>() = -m.transpose();
  return PreferenceMatrix(std::move(m));
}

PreferenceMatrix skew_complete(int k, std::span<const double> upper) {
  if (k < 2 || static_cast<int>(upper.size()) != num_pairs(k)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "skew_complete expects one value per pair a < b");
  }
  Matrix m = Matrix::Zero(k, k);
  int clamped = 0;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      double v = upper[pair_index(k, a, b)];
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kRangeViolation,
                    entry_message("non-finite prediction", a, b, v),
                    std::pair{a, b});
      }
      if (std::abs(v) > 1.0) {
        ++clamped;
        v = std::clamp(v, -1.0, 1.0);
      }
      m(a, b) = v;
      m(b, a) = -v;
    }
  }
  if (clamped > 0) {
    spdlog::warn("skew_complete: clamped {} prediction(s) into [-1, 1]", clamped);
  }
  return validate_preference_matrix(m);
}

GeneralMatrix::GeneralMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "payoff matrix must be square");
  }
  if (!m_.allFinite()) {
    throw Error(ErrorCode::kRangeViolation, "payoff matrix has non-finite entries");
  }
}

namespace {

// Shared normalization rule for vectors and matrices of weights.
template <typename Derived>
void normalize_simplex(Eigen::PlainObjectBase<Derived>& w) {
  if (w.size() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "empty distribution");
  }
  if (!w.allFinite() || (w.array() < 0.0).any()) {
    throw Error(ErrorCode::kSimplexViolation, "negative or non-finite weight");
  }
  const double total = w.sum();
  if (std::abs(total - 1.0) > kRenormalizeTolerance) {
    throw Error(ErrorCode::kSimplexViolation,
                "weights sum to " + std::to_string(total));
  }
  w /= total;
}

}  // namespace

ActionDistribution ActionDistribution::from_weights(
    const Eigen::Ref<const Vector>& w) {
  Vector v = w;
  normalize_simplex(v);
  return ActionDistribution(std::move(v));
}

ActionDistribution ActionDistribution::uniform(int k) {
  return ActionDistribution(Vector::Constant(k, 1.0 / k));
}

ActionDistribution ActionDistribution::point_mass(int k, int arm) {
  Vector v = Vector::Zero(k);
  v(arm) = 1.0;
  return ActionDistribution(std::move(v));
}

JointActionDistribution JointActionDistribution::from_weights(
    const Eigen::Ref<const Matrix>& w) {
  if (w.rows() != w.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "joint must be K x K");
  }
  Matrix m = w;
  normalize_simplex(m);
  return JointActionDistribution(std::move(m));
}

JointActionDistribution JointActionDistribution::uniform(int k) {
  return JointActionDistribution(Matrix::Constant(k, k, 1.0 / (k * k)));
}

JointActionDistribution JointActionDistribution::point_mass(int k, int a, int b) {
  Matrix m = Matrix::Zero(k, k);
  m(a, b) = 1.0;
  return JointActionDistribution(std::move(m));
}

JointActionDistribution JointActionDistribution::product(
    const ActionDistribution& left, const ActionDistribution& right) {
  if (left.k() != right.k()) {
    throw Error(ErrorCode::kDimensionMismatch, "marginal sizes differ");
  }
  return JointActionDistribution(left.weights() * right.weights().transpose());
}

std::pair<ActionDistribution, ActionDistribution> marginals(
    const JointActionDistribution& joint) {
  return {ActionDistribution::from_weights(joint.weights().rowwise().sum()),
          ActionDistribution::from_weights(joint.weights().colwise().sum().transpose())};
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

int Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform() * total;
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += weights[i];
    if (u < acc) return last_positive;
  }
  return last_positive;
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(mix64(key_ ^ mix64(stream * kGolden + 0x243F6A8885A308D3ULL)), 0);
}

int sample_outcome(double p_value, Rng& rng) {
  if (!(std::abs(p_value) <= 1.0)) {
    throw Error(ErrorCode::kRangeViolation,
                "preference value outside [-1, 1]: " + std::to_string(p_value));
  }
  return rng.uniform() < 0.5 * (p_value + 1.0) ? 1 : -1;
}

Duel sample_pair(const ActionDistribution& dist, Rng& rng) {
  std::span<const double> w(dist.weights().data(), dist.weights().size());
  const int a = rng.categorical(w);
  const int b = rng.categorical(w);
  return {a, b};
}

Duel sample_joint(const JointActionDistribution& joint, Rng& rng) {
  const Matrix& w = joint.weights();
  // Column-major storage: flat index = a + k * b.
  const int idx = rng.categorical(std::span<const double>(w.data(), w.size()));
  const int k = joint.k();
  return {idx % k, idx / k};
}

}  // namespace duelbandit
