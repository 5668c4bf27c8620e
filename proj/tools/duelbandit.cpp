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

// Command-line front end: run experiments, solve single games, run the
// acceptance suites and aggregate summaries.

#include "duelbandit/acceptance.hpp"
#include "duelbandit/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using duelbandit::Error;
using duelbandit::ErrorCode;
using json = nlohmann::json;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSolverFailure = 2;
constexpr int kAcceptanceFailure = 3;

duelbandit::Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, path + ": " + e.what());
  }
  if (j.is_object() && j.contains("matrix")) j = j["matrix"];
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::kConfigError, "matrix must be an array of rows");
  const auto n = static_cast<int>(j.size());
  duelbandit::Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(j[r].size()) != n) {
      throw Error(ErrorCode::kDimensionMismatch, "matrix must be square");
    }
    for (int c = 0; c < n; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json to_json(const duelbandit::Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kConfigError, "bad seed '" + item + "'");
    }
  }
  return seeds;
}

int cmd_run(const std::string& config_path, const std::string& seeds, const std::string& out,
            bool diagnostic) {
  duelbandit::ExperimentConfig config = duelbandit::load_config(config_path);
  if (!seeds.empty()) config.seeds = parse_seeds(seeds);
  if (!out.empty()) config.output_dir = out;
  if (diagnostic) config.diagnostic = true;
  duelbandit::validate(config);

  const auto results = duelbandit::run_experiment(config);
  std::vector<duelbandit::RunSummary> summaries;
  for (const auto& r : results) summaries.push_back(r.summary);
  duelbandit::write_summary_csv(std::cout, summaries);
  for (const auto& s : summaries) {
    if (s.failed) return kSolverFailure;
  }
  return kOk;
}

int cmd_solve_cce(const std::string& path) {
  const auto report = duelbandit::solve_cce(duelbandit::GeneralMatrix(read_matrix(path)));
  const json out = {{"joint", to_json(report.point.weights())},
                    {"max_violation", report.max_violation},
                    {"iterations", report.iterations}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_solve_igw(const std::string& path, double gamma) {
  const auto y = duelbandit::validate_preference_matrix(read_matrix(path));
  const auto report = duelbandit::solve_minmax_feasibility(y, gamma);
  const int k = y.k();
  const json out = {{"p", to_json(report.point.weights())},
                    {"max_violation", report.max_violation},
                    {"budget", duelbandit::igw_budget(k, gamma)},
                    {"slack", duelbandit::igw_slack(k, gamma)},
                    {"iterations", report.iterations}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_accept(const std::string& suite) {
  auto selected = [&](const duelbandit::acceptance::Criterion& c) {
    return suite == "all" || suite == c.name || suite == std::to_string(c.id);
  };
  const auto& all = duelbandit::acceptance::criteria();
  if (std::none_of(all.begin(), all.end(), selected)) {
    throw Error(ErrorCode::kConfigError, "unknown suite '" + suite + "'");
  }
  bool all_passed = true;
  for (const auto& c : all) {
    if (!selected(c)) continue;
    const auto r = duelbandit::acceptance::run_criterion(c.id);
    std::cout << duelbandit::acceptance::format(r) << std::endl;
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kOk : kAcceptanceFailure;
}

int cmd_aggregate(const std::string& dir) {
  const auto report = duelbandit::aggregate(duelbandit::read_summaries(dir));
  std::cout << duelbandit::to_json(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual dueling bandit experiments"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  std::string config_path, seeds, out;
  bool diagnostic = false;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--seeds", seeds, "Comma-separated seeds overriding the config");
  run->add_option("--out", out, "Output directory overriding the config");
  run->add_flag("--diagnostic", diagnostic, "Check confidence coverage and per-round bounds");

  std::string matrix_path;
  double gamma = 0.0;
  auto* cce = app.add_subcommand("solve-cce", "Coarse correlated equilibrium of a payoff matrix");
  cce->add_option("--matrix", matrix_path, "JSON matrix file")->required();
  auto* igw = app.add_subcommand("solve-igw", "Inverse-gap feasibility point of a prediction matrix");
  igw->add_option("--matrix", matrix_path, "JSON matrix file")->required();
  igw->add_option("--gamma", gamma, "Exploration rate, at least 2K")->required();

  std::string suite;
  auto* accept = app.add_subcommand("accept", "Run an acceptance criterion by number or name, or all");
  accept->add_option("--suite", suite, "Criterion number, name, or 'all'")->required();

  std::string in_dir;
  auto* agg = app.add_subcommand("aggregate", "Summarize every summary.csv under a directory");
  agg->add_option("--in", in_dir, "Directory to scan")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(config_path, seeds, out, diagnostic);
    if (*cce) return cmd_solve_cce(matrix_path);
    if (*igw) return cmd_solve_igw(matrix_path, gamma);
    if (*accept) return cmd_accept(suite);
    if (*agg) return cmd_aggregate(in_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kNotConverged ? kSolverFailure : kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
