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

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace duelbandit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  kSkewSymmetryViolation,
  kRangeViolation,
  kDiagonalViolation,
  kSimplexViolation,
  kDimensionMismatch,
  kNotConverged,
  kGammaTooSmall,
  kHorizonTooShort,
  kUnsupportedOracle,
  kUnknownContext,
  kConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::pair<int, int>> where = std::nullopt)
      : std::runtime_error(what), code_(code), where_(where) {}

  ErrorCode code() const { return code_; }
  // Offending index pair, when the error refers to a matrix entry.
  const std::optional<std::pair<int, int>>& where() const { return where_; }

 private:
  ErrorCode code_;
  std::optional<std::pair<int, int>> where_;
};

inline constexpr double kSkewTolerance = 1e-12;
inline constexpr double kSimplexTolerance = 1e-9;
inline constexpr double kRenormalizeTolerance = 1e-6;

template <typename Derived>
bool is_skew_symmetric(const Eigen::MatrixBase<Derived>& m,
                       double tol = kSkewTolerance) {
  if (m.rows() != m.cols()) return false;
  return ((m + m.transpose()).array().abs() <= tol).all();
}

template <typename Derived>
bool in_unit_box(const Eigen::MatrixBase<Derived>& m) {
  return (m.array().abs() <= 1.0).all();
}

/// Skew-symmetric K x K matrix with entries in [-1, 1] and zero diagonal.
/// Entry (a, b) is the expected win signal of arm a over arm b.
class PreferenceMatrix {
 public:
  static PreferenceMatrix zero(int k);

  int k() const { return static_cast<int>(m_.rows()); }
  const Matrix& entries() const { return m_; }
  double operator()(int a, int b) const { return m_(a, b); }

 private:
  friend PreferenceMatrix validate_preference_matrix(
      const Eigen::Ref<const Matrix>& entries);
  explicit PreferenceMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Checks skew-symmetry (to 1e-12), the zero diagonal and the [-1, 1] range,
/// then stores an exactly antisymmetrized copy built from the upper triangle.
PreferenceMatrix validate_preference_matrix(
    const Eigen::Ref<const Matrix>& entries);

/// Number of unordered pairs a < b.
constexpr int num_pairs(int k) { return k * (k - 1) / 2; }

/// Position of pair (a, b), a < b, in row-major upper-triangle order.
constexpr int pair_index(int k, int a, int b) {
  return a * k - a * (a + 1) / 2 + (b - a - 1);
}

/// Builds a preference matrix from one value per pair a < b (upper-triangle,
/// row-major). Values outside [-1, 1] are clamped and a warning is logged.
PreferenceMatrix skew_complete(int k, std::span<const double> upper);

/// Arbitrary finite K x K payoff matrix (e.g. an upper-confidence matrix).
class GeneralMatrix {
 public:
  explicit GeneralMatrix(Matrix m);
  int k() const { return static_cast<int>(m_.rows()); }
  const Matrix& entries() const { return m_; }
  double operator()(int a, int b) const { return m_(a, b); }

 private:
  Matrix m_;
};

/// A point of the K-simplex.
class ActionDistribution {
 public:
  /// Accepts weights within 1e-6 of the simplex and renormalizes them.
  static ActionDistribution from_weights(const Eigen::Ref<const Vector>& w);
  static ActionDistribution uniform(int k);
  static ActionDistribution point_mass(int k, int arm);

  int k() const { return static_cast<int>(w_.size()); }
  const Vector& weights() const { return w_; }
  double operator[](int i) const { return w_(i); }

 private:
  explicit ActionDistribution(Vector w) : w_(std::move(w)) {}
  Vector w_;
};

/// A distribution over ordered pairs (a, b); row index is the left arm.
class JointActionDistribution {
 public:
  static JointActionDistribution from_weights(const Eigen::Ref<const Matrix>& w);
  static JointActionDistribution uniform(int k);
  static JointActionDistribution point_mass(int k, int a, int b);
  static JointActionDistribution product(const ActionDistribution& left,
                                         const ActionDistribution& right);

  int k() const { return static_cast<int>(w_.rows()); }
  const Matrix& weights() const { return w_; }
  double operator()(int a, int b) const { return w_(a, b); }

 private:
  explicit JointActionDistribution(Matrix w) : w_(std::move(w)) {}
  Matrix w_;
};

/// Left (row-sum) and right (column-sum) marginals.
std::pair<ActionDistribution, ActionDistribution> marginals(
    const JointActionDistribution& joint);

struct Duel {
  int a = 0;
  int b = 0;
  friend bool operator==(const Duel&, const Duel&) = default;
};

struct RoundRecord {
  std::int64_t t = 1;
  std::size_t context_id = 0;
  Duel duel;
  int outcome = 1;
  JointActionDistribution learner_joint = JointActionDistribution::uniform(2);
};

/// Counter-based generator: draw n of a stream is a pure function of
/// (key, n). split() derives statistically independent substreams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Index drawn proportionally to nonnegative weights.
  int categorical(std::span<const double> weights);

  Rng split(std::uint64_t stream) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  Rng(std::uint64_t key, int) : key_(key) {}
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// +1 with probability (p_value + 1) / 2, else -1.
int sample_outcome(double p_value, Rng& rng);

/// Draws a and b independently from the same marginal.
Duel sample_pair(const ActionDistribution& dist, Rng& rng);

Duel sample_joint(const JointActionDistribution& joint, Rng& rng);

}  // namespace duelbandit
