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

#include "duelbandit/algorithms.hpp"
#include "duelbandit/environments.hpp"
#include "duelbandit/evaluation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace duelbandit {

struct OracleSpec {
  std::string kind = "finite";
  double eta = 1.0 / 8.0;
  double lambda = 1.0;
  /// Comparator radius and feature bound for the OGD budget; default sqrt(d).
  std::optional<double> radius;
  std::optional<double> step;
};

struct AlgorithmSpec {
  std::string kind = "ccedb";  // ccedb | ccelindb | minmaxdb
  std::optional<double> delta;  // default 1/T
  double lambda = 1.0;
  std::optional<double> eta;
  std::optional<double> t0;
  std::optional<double> gamma;  // absent or "auto" -> default_gamma
  OracleSpec oracle;
  SolverConfig solver;
};

struct EnvironmentSpec {
  std::string kind = "fixed";  // fixed | finite | linear
  std::string fixture = "condorcet";  // rps3 | condorcet | hardness | explicit
  int k = 3;
  double margin = 0.4;
  double epsilon = 0.2;
  std::optional<Matrix> matrix;
  std::size_t n_contexts = 1;
  std::size_t class_size = 16;
  int dim = 4;
  double perturbation = 0.0;
};

struct BenchmarkSpec {
  std::string comparator = "nash";  // nash | condorcet | explicit
  std::optional<Vector> q;
  /// Total policy count; the K constant policies come first.
  std::size_t policies = 0;
};

struct ExperimentConfig {
  AlgorithmSpec algorithm;
  EnvironmentSpec environment;
  BenchmarkSpec benchmark;
  std::int64_t horizon = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir;
  bool diagnostic = false;
};

/// Throws Error(kConfigError) on malformed input or invariant violations.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);
/// Every field with defaults filled in, as pretty-printed JSON.
std::string resolved_config_json(const ExperimentConfig& config);

struct RoundRow {
  std::int64_t t = 0;
  int arm_a = 0;
  int arm_b = 0;
  int outcome = 0;
  double br_step = 0.0;
  double br_cum = 0.0;
  double fb_step = 0.0;
  double fb_cum = 0.0;
  double policy_cum = 0.0;
  double gamma = 0.0;
  int solver_iters = 0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  double br_regret = 0.0;
  double fb_regret = 0.0;
  double policy_regret = 0.0;
  /// BR / sqrt(K T RegSq(T)); RegSq is taken as 1 without an oracle budget.
  double normalized = 0.0;
  double wall_seconds = 0.0;
  std::int64_t solver_iterations = 0;
  std::int64_t confidence_violations = 0;
  std::int64_t bound_violations = 0;
  bool failed = false;
  std::string error;
};

struct RunResult {
  RunSummary summary;
  std::vector<RoundRow> rows;
  DominanceReport dominance;
};

inline constexpr std::string_view kCsvHeader =
    "seed,t,arm_a,arm_b,outcome,br_step,br_cum,fb_step,fb_cum,policy_cum,gamma,solver_iters";

/// One seed, start to finish. Solver failures are caught and recorded in
/// the summary; configuration errors propagate.
RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed);

/// All seeds, fanned out over up to DUELBANDIT_THREADS workers. Writes
/// seed_<s>.csv, summary.csv and resolved_config.json when output_dir is set.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

std::size_t worker_count(std::size_t jobs);

void write_rounds_csv(std::ostream& out, std::uint64_t seed, const std::vector<RoundRow>& rows);
std::vector<RoundRow> read_rounds_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& summaries);
std::vector<RunSummary> read_summary_csv(std::istream& in);

struct HorizonStats {
  std::int64_t horizon = 0;
  std::size_t runs = 0;
  double mean_br = 0.0, median_br = 0.0, p95_br = 0.0;
  double mean_fb = 0.0, median_fb = 0.0;
  double mean_policy = 0.0, median_policy = 0.0;
};

/// median(BR at 4T) / median(BR at T) with a bootstrap 95% interval.
struct ScalingRatio {
  std::int64_t from = 0;
  std::int64_t to = 0;
  double ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct BatchReport {
  std::size_t runs = 0;
  std::size_t failed = 0;
  std::vector<HorizonStats> horizons;
  std::vector<ScalingRatio> ratios;
};

/// Throws Error(kConfigError) on an empty list.
BatchReport aggregate(const std::vector<RunSummary>& summaries);
/// Collects every summary.csv below `dir`.
std::vector<RunSummary> read_summaries(const std::filesystem::path& dir);
std::string to_json(const BatchReport& report);

double median(std::vector<double> values);

}  // namespace duelbandit
