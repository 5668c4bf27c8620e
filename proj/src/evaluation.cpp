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

#include "duelbandit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace duelbandit {

namespace {

constexpr double kDominanceTolerance = 1e-12;

Vector combined_marginal(const PreferenceMatrix& f_star, const JointActionDistribution& joint) {
  if (f_star.k() != joint.k()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "preference matrix has K = " + std::to_string(f_star.k()) +
                    ", joint has K = " + std::to_string(joint.k()));
  }
  const Matrix& p = joint.weights();
  return p.rowwise().sum() + p.colwise().sum().transpose();
}

}  // namespace

double br_regret_step(const PreferenceMatrix& f_star, const JointActionDistribution& joint) {
  const Vector m = combined_marginal(f_star, joint);
  return 0.5 * (f_star.entries() * m).maxCoeff();
}

double fb_regret_step(const PreferenceMatrix& f_star, const JointActionDistribution& joint,
                      const ActionDistribution& q_star) {
  const Vector m = combined_marginal(f_star, joint);
  if (q_star.k() != f_star.k()) {
    throw Error(ErrorCode::kDimensionMismatch, "comparator has the wrong number of arms");
  }
  return 0.5 * q_star.weights().dot(f_star.entries() * m);
}

int Policy::operator()(std::size_t context_id) const {
  if (arms.size() == 1) return arms.front();
  if (context_id >= arms.size()) {
    throw Error(ErrorCode::kUnknownContext,
                "policy has no arm for context " + std::to_string(context_id));
  }
  return arms[context_id];
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    carry_ += (sum_ - t) + x;
  } else {
    carry_ += (x - t) + sum_;
  }
  sum_ = t;
}

RegretLedger::RegretLedger(std::vector<Policy> policies)
    : policies_(std::move(policies)), policy_sums_(policies_.size()) {}

void RegretLedger::record(double br_step, double fb_step) {
  br_sum_.add(br_step);
  fb_sum_.add(fb_step);
  br_step_.push_back(br_step);
  fb_step_.push_back(fb_step);
  br_cum_.push_back(br_sum_.value());
  fb_cum_.push_back(fb_sum_.value());
  policy_cum_.push_back(policy_total());
}

void RegretLedger::accumulate_policy(const PreferenceMatrix& f_star, std::size_t context_id,
                                     Duel duel) {
  for (std::size_t i = 0; i < policies_.size(); ++i) {
    const int arm = policies_[i](context_id);
    policy_sums_[i].add(0.5 * (f_star(arm, duel.a) + f_star(arm, duel.b)));
  }
}

double RegretLedger::policy_total() const {
  if (policy_sums_.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : policy_sums_) best = std::max(best, s.value());
  return best;
}

DominanceReport dominance_report(const RegretLedger& ledger) {
  DominanceReport report;
  const auto& br = ledger.br_steps();
  const auto& fb = ledger.fb_steps();
  for (std::size_t t = 0; t < br.size(); ++t) {
    if (fb[t] > br[t] + kDominanceTolerance) {
      report.fb_dominated = false;
      report.first_fb_violation = static_cast<std::int64_t>(t) + 1;
      break;
    }
  }
  report.br_total = ledger.br_total();
  report.fb_total = ledger.fb_total();
  report.policy_total = ledger.policy_total();
  const double t = static_cast<double>(ledger.rounds());
  const double n = static_cast<double>(ledger.policies().size());
  if (t > 0.0 && n > 0.0) report.policy_slack = std::sqrt(t * std::log(std::max(1.0, n * t)));
  report.policy_within_slack = report.policy_total <= report.br_total + report.policy_slack;
  return report;
}

}  // namespace duelbandit
