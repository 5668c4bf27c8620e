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

#include <cstdint>
#include <vector>

namespace duelbandit {

/// Max over pure a* of (1/2) sum_b f[a*, b] (left[b] + right[b]). The
/// objective is linear in the response distribution, so a vertex attains it.
double br_regret_step(const PreferenceMatrix& f_star, const JointActionDistribution& joint);

/// (1/2) q' f (left + right) for a fixed comparator q.
double fb_regret_step(const PreferenceMatrix& f_star, const JointActionDistribution& joint,
                      const ActionDistribution& q_star);

/// Context id -> arm. A single entry is a constant policy.
struct Policy {
  std::vector<int> arms;
  int operator()(std::size_t context_id) const;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class RegretLedger {
 public:
  explicit RegretLedger(std::vector<Policy> policies = {});

  void record(double br_step, double fb_step);
  /// Adds (1/2)(f[pi(x), a] + f[pi(x), b]) to each policy's column, using the
  /// realized duel.
  void accumulate_policy(const PreferenceMatrix& f_star, std::size_t context_id, Duel duel);

  std::int64_t rounds() const { return static_cast<std::int64_t>(br_step_.size()); }
  const std::vector<double>& br_steps() const { return br_step_; }
  const std::vector<double>& fb_steps() const { return fb_step_; }
  const std::vector<double>& br_cumulative() const { return br_cum_; }
  const std::vector<double>& fb_cumulative() const { return fb_cum_; }
  /// Running max over policy columns after each round.
  const std::vector<double>& policy_cumulative() const { return policy_cum_; }
  const std::vector<Policy>& policies() const { return policies_; }

  double br_total() const { return br_cum_.empty() ? 0.0 : br_cum_.back(); }
  double fb_total() const { return fb_cum_.empty() ? 0.0 : fb_cum_.back(); }
  double policy_total() const;

 private:
  std::vector<Policy> policies_;
  CompensatedSum br_sum_;
  CompensatedSum fb_sum_;
  std::vector<CompensatedSum> policy_sums_;
  std::vector<double> br_step_, fb_step_, br_cum_, fb_cum_, policy_cum_;
};

struct DominanceReport {
  /// fb_step <= br_step + 1e-12 on every round.
  bool fb_dominated = true;
  std::int64_t first_fb_violation = -1;
  double br_total = 0.0;
  double fb_total = 0.0;
  double policy_total = 0.0;
  /// sqrt(T ln(|Pi| T)); zero when T = 0 or Pi is empty.
  double policy_slack = 0.0;
  bool policy_within_slack = true;
};

DominanceReport dominance_report(const RegretLedger& ledger);

}  // namespace duelbandit
