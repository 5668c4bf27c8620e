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

#include <string>
#include <string_view>
#include <vector>

namespace duelbandit::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string_view name;
  /// Wall-clock budget; exceeding it fails the criterion.
  double budget_seconds;
};

const std::vector<Criterion>& criteria();

CriterionResult run_criterion(int id);

/// `name` is "all", a criterion number, or a criterion name.
/// Throws Error(kConfigError) for an unknown suite.
std::vector<CriterionResult> run_suite(std::string_view name);

/// "PASS  3 cce-validity  <detail>  (1.2 s)"
std::string format(const CriterionResult& result);

}  // namespace duelbandit::acceptance
