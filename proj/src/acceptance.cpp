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

#include "duelbandit/acceptance.hpp"

#include "duelbandit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <unistd.h>

namespace duelbandit::acceptance {

namespace {

std::string printf_string(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Matrix random_skew(int k, Rng& rng) {
  Matrix m = Matrix::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      m(a, b) = rng.uniform(-1.0, 1.0);
      m(b, a) = -m(a, b);
    }
  }
  return m;
}

Vector random_simplex(int k, Rng& rng) {
  Vector v(k);
  for (int i = 0; i < k; ++i) v(i) = -std::log(1.0 - rng.uniform());
  return v / v.sum();
}

struct Verdict {
  bool passed = true;
  std::string detail;
};

// Inverse-gap feasibility for the full (K, gamma) grid; also feeds the
// per-round inequality check with every solved point.
struct IgwCase {
  Matrix y_hat;
  Vector p;
  double gamma;
};

constexpr int kIgwTrials = 1000;

std::vector<IgwCase> solve_igw_grid(Verdict& v) {
  std::vector<IgwCase> cases;
  Rng rng(101);
  int failures = 0;
  double worst_ratio = 0.0;
  for (int k : {2, 3, 5, 10}) {
    for (double mult : {2.0, 4.0, 10.0}) {
      const double gamma = mult * k;
      for (int trial = 0; trial < kIgwTrials; ++trial) {
        const PreferenceMatrix y = validate_preference_matrix(random_skew(k, rng));
        try {
          const MarginalReport r = solve_minmax_feasibility(y, gamma);
          const double excess = igw_max_violation(y.entries(), r.point.weights(), gamma);
          worst_ratio = std::max(worst_ratio, excess / igw_slack(k, gamma));
          if (excess > igw_slack(k, gamma) + 1e-6) ++failures;
          cases.push_back({y.entries(), r.point.weights(), gamma});
        } catch (const Error&) {
          ++failures;
        }
      }
    }
  }
  v.passed = failures == 0;
  v.detail = printf_string("%zu solves, %d failures, worst excess %.3f x K/gamma",
                           cases.size() + failures, failures, worst_ratio);
  return cases;
}

Verdict igw_feasibility() {
  Verdict v;
  solve_igw_grid(v);
  return v;
}

Verdict per_round_inequality() {
  Verdict solved;
  const auto cases = solve_igw_grid(solved);
  Rng rng(202);
  long checks = 0, violations = 0;
  double worst = -1e300;
  for (const auto& c : cases) {
    const int k = static_cast<int>(c.p.size());
    const Matrix joint = c.p * c.p.transpose();
    for (int draw = 0; draw < 100; ++draw) {
      const Matrix f = random_skew(k, rng);
      const Vector q = random_simplex(k, rng);
      const double rhs = 0.5 * c.gamma * joint.cwiseProduct((f - c.y_hat).cwiseAbs2()).sum() +
                         igw_budget(k, c.gamma) + igw_slack(k, c.gamma) + 1e-9;
      const Vector fp = f * c.p;
      // The random q, and the pure response that maximizes the left side.
      for (double lhs : {q.dot(fp), fp.maxCoeff()}) {
        ++checks;
        worst = std::max(worst, lhs - rhs);
        if (lhs > rhs) ++violations;
      }
    }
  }
  Verdict v;
  v.passed = solved.passed && violations == 0;
  v.detail = printf_string("%ld checks on %zu points, %ld violations, worst margin %.3g",
                           checks, cases.size(), violations, worst);
  return v;
}

// Brute force over the 1e-3 grid of the 2x2 joint simplex. Each deviation
// gain is affine in the last free coordinate, so the innermost loop is
// replaced by the exact interval of admissible grid points.
bool grid_cce_exists(const Matrix& u, double tol) {
  constexpr int n = 1000;
  const int cell_a[4] = {0, 0, 1, 1};
  const int cell_b[4] = {0, 1, 0, 1};
  double gain[4][4];
  for (int cell = 0; cell < 4; ++cell) {
    const int a = cell_a[cell], b = cell_b[cell];
    for (int dev = 0; dev < 2; ++dev) {
      gain[dev][cell] = u(dev, b) - u(a, b);
      gain[2 + dev][cell] = u(dev, a) - u(b, a);
    }
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n - i; ++j) {
      const int rest = n - i - j;
      double lo = 0.0, hi = rest;
      for (const auto& g : gain) {
        const double base = (g[0] * i + g[1] * j + g[3] * rest) / n;
        const double slope = (g[2] - g[3]) / n;
        if (slope == 0.0) {
          if (base > tol) hi = -1.0;
          continue;
        }
        const double root = (tol - base) / slope;
        if (slope > 0.0) {
          hi = std::min(hi, std::floor(root));
        } else {
          lo = std::max(lo, std::ceil(root));
        }
      }
      if (lo <= hi) return true;
    }
  }
  return false;
}

Verdict cce_validity() {
  Rng rng(303);
  int failures = 0, k2 = 0, k2_mismatch = 0;
  double worst = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    Matrix u(k, k);
    for (int i = 0; i < u.size(); ++i) u.data()[i] = rng.uniform(-3.0, 3.0);
    bool solved = false;
    try {
      const JointReport r = solve_cce(GeneralMatrix(u));
      const double viol = cce_max_violation(u, r.point.weights());
      worst = std::max(worst, viol);
      solved = viol <= 1e-8;
    } catch (const Error&) {
    }
    if (!solved) ++failures;
    if (k == 2) {
      ++k2;
      const bool grid = grid_cce_exists(u, 4.0 * u.cwiseAbs().maxCoeff() * 1e-3);
      if (grid != solved) ++k2_mismatch;
    }
  }
  Verdict v;
  v.passed = failures == 0 && k2_mismatch == 0;
  v.detail = printf_string("1000 games, %d failures, worst violation %.3g, K=2 grid "
                           "mismatches %d of %d",
                           failures, worst, k2_mismatch, k2);
  return v;
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::uint64_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

ExperimentConfig condorcet_ccedb(std::int64_t horizon, std::uint64_t seeds) {
  ExperimentConfig c;
  c.algorithm.kind = "ccedb";
  c.environment.kind = "fixed";
  c.environment.fixture = "condorcet";
  c.environment.k = 5;
  c.environment.margin = 0.4;
  c.benchmark.comparator = "nash";
  c.horizon = horizon;
  c.seeds = seed_range(seeds);
  return c;
}

ExperimentConfig finite_minmaxdb(std::int64_t horizon, std::uint64_t seeds) {
  ExperimentConfig c;
  c.algorithm.kind = "minmaxdb";
  c.algorithm.oracle.kind = "finite";
  c.environment.kind = "finite";
  c.environment.k = 3;
  c.environment.n_contexts = 1;
  c.environment.class_size = 16;
  c.benchmark.comparator = "nash";
  c.horizon = horizon;
  c.seeds = seed_range(seeds);
  return c;
}

Verdict coverage() {
  ExperimentConfig c = condorcet_ccedb(2000, 200);
  c.diagnostic = true;
  const auto runs = run_experiment(c);
  int bad_seeds = 0, failed = 0;
  long bound_violations = 0;
  for (const auto& r : runs) {
    if (r.summary.confidence_violations > 0) ++bad_seeds;
    if (r.summary.failed) ++failed;
    bound_violations += r.summary.bound_violations;
  }
  Verdict v;
  v.passed = bad_seeds <= 10 && failed == 0 && bound_violations == 0;
  v.detail = printf_string("%d of 200 seeds lost coverage (limit 10), %ld covered rounds "
                           "broke the confidence regret bound, %d solver failures",
                           bad_seeds, bound_violations, failed);
  return v;
}

// Both scaling criteria and the dominance check share these runs.
struct ScalingRuns {
  std::int64_t short_horizon, long_horizon;
  std::vector<RunResult> short_runs, long_runs;
};

const ScalingRuns& scaling_runs(int which) {
  static std::mutex mu;
  static std::map<int, ScalingRuns> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(which);
  if (it != cache.end()) return it->second;
  ScalingRuns s;
  if (which == 5) {
    s.short_horizon = 2000;
    s.long_horizon = 8000;
    s.short_runs = run_experiment(condorcet_ccedb(s.short_horizon, 50));
    s.long_runs = run_experiment(condorcet_ccedb(s.long_horizon, 50));
  } else {
    s.short_horizon = 2500;
    s.long_horizon = 10000;
    s.short_runs = run_experiment(finite_minmaxdb(s.short_horizon, 50));
    s.long_runs = run_experiment(finite_minmaxdb(s.long_horizon, 50));
  }
  return cache.emplace(which, std::move(s)).first->second;
}

double median_br(const std::vector<RunResult>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.summary.br_regret);
  return median(std::move(v));
}

int failed_runs(const ScalingRuns& s) {
  int n = 0;
  for (const auto* runs : {&s.short_runs, &s.long_runs}) {
    for (const auto& r : *runs) n += r.summary.failed;
  }
  return n;
}

Verdict scaling(int which, auto bound) {
  const ScalingRuns& s = scaling_runs(which);
  const double lo = median_br(s.short_runs);
  const double hi = median_br(s.long_runs);
  const double lo_bound = bound(s.short_horizon);
  const double hi_bound = bound(s.long_horizon);
  const double ratio = hi / lo;
  const int failed = failed_runs(s);
  Verdict v;
  v.passed = lo <= lo_bound && hi <= hi_bound && ratio >= 1.4 && ratio <= 2.8 && failed == 0;
  v.detail = printf_string(
      "median BR %.1f at T=%lld (bound %.0f), %.1f at T=%lld (bound %.0f), ratio %.3f "
      "(target [1.4, 2.8]), %d solver failures",
      lo, static_cast<long long>(s.short_horizon), lo_bound, hi,
      static_cast<long long>(s.long_horizon), hi_bound, ratio, failed);
  return v;
}

Verdict ccedb_scaling() {
  return scaling(5, [](std::int64_t t) {
    const double k = 5.0;
    return 4.0 * k * std::log(k * t) * std::sqrt(static_cast<double>(t));
  });
}

Verdict minmaxdb_scaling() {
  return scaling(6, [](std::int64_t t) {
    const double k = 3.0;
    return 4.0 * std::sqrt(5.0 * k * t * 8.0 * std::log(16.0));
  });
}

Verdict oracle_budgets() {
  constexpr std::int64_t horizon = 5000;
  constexpr int seeds = 20;
  const int dim = 4;
  const double vaw_limit = 4.0 * dim * std::log1p(static_cast<double>(horizon) / dim);
  const double finite_limit = 4.0 * 8.0 * std::log(16.0);
  double vaw_worst = 0.0, finite_worst = 0.0;
  for (int seed = 0; seed < seeds; ++seed) {
    const Rng root(static_cast<std::uint64_t>(seed));
    Rng setup = root.split(3), draws = root.split(0), outcomes = root.split(2);

    const Environment linear = make_linear(3, dim, setup);
    VawForecaster vaw(dim);
    double err = 0.0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const Context ctx = linear.sample_round(draws).context;
      const int a = static_cast<int>(draws.below(2));
      const int b = a + 1 + static_cast<int>(draws.below(2 - a));
      const OracleInput z = make_oracle_input(ctx, a, b);
      const double target = linear.ground_truth(ctx)(a, b);
      err += std::pow(vaw.predict(z) - target, 2);
      vaw.update(z, sample_outcome(target, outcomes));
    }
    vaw_worst = std::max(vaw_worst, err);

    FiniteClassInstance inst = make_finite_class(4, 3, 16, setup);
    FiniteClassAggregator agg(inst.hypotheses);
    err = 0.0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const Context ctx = inst.environment.sample_round(draws).context;
      const int a = static_cast<int>(draws.below(2));
      const int b = a + 1 + static_cast<int>(draws.below(2 - a));
      const OracleInput z = make_oracle_input(ctx, a, b);
      const double target = inst.environment.ground_truth(ctx)(a, b);
      err += std::pow(agg.predict(z) - target, 2);
      agg.update(z, sample_outcome(target, outcomes));
    }
    finite_worst = std::max(finite_worst, err);
  }
  Verdict v;
  v.passed = vaw_worst <= vaw_limit && finite_worst <= finite_limit;
  v.detail = printf_string("worst estimation error: VAW %.2f (limit %.2f), finite class "
                           "%.2f (limit %.2f)",
                           vaw_worst, vaw_limit, finite_worst, finite_limit);
  return v;
}

Verdict fb_dominance() {
  long rounds = 0, violations = 0;
  for (int which : {5, 6}) {
    const ScalingRuns& s = scaling_runs(which);
    for (const auto* runs : {&s.short_runs, &s.long_runs}) {
      for (const auto& r : *runs) {
        for (const auto& row : r.rows) {
          ++rounds;
          if (row.fb_step > row.br_step + 1e-12) ++violations;
        }
      }
    }
  }
  Verdict v;
  v.passed = violations == 0 && rounds > 0;
  v.detail = printf_string("%ld rounds checked, %ld with fb_step > br_step", rounds, violations);
  return v;
}

Verdict nash_certificate() {
  Rng rng(909);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const PreferenceMatrix p = validate_preference_matrix(random_skew(k, rng));
    const ActionDistribution q = solve_zero_sum_nash(p).point;
    worst = std::max(worst, br_regret_step(p, JointActionDistribution::product(q, q)));
  }
  Verdict v;
  v.passed = worst <= 1e-6;
  v.detail = printf_string("worst BR step %.3g over 100 games (limit 1e-6)", worst);
  return v;
}

Verdict hardness_instance() {
  Verdict v;
  std::string detail;
  for (double eps : {0.2, 0.05, 0.5}) {
    const std::int64_t horizon = 10000;
    const PreferenceMatrix f = hardness(eps);
    RegretLedger play_c, play_a;
    const auto cc = JointActionDistribution::point_mass(3, 2, 2);
    const auto aa = JointActionDistribution::point_mass(3, 0, 0);
    for (std::int64_t t = 0; t < horizon; ++t) {
      play_c.record(br_regret_step(f, cc), 0.0);
      play_a.record(br_regret_step(f, aa), 0.0);
    }
    const double expected = eps * static_cast<double>(horizon);
    v.passed = v.passed && play_c.br_total() == expected && play_a.br_total() == 0.0;
    detail += printf_string("eps=%g: (c,c) %.17g vs %.17g, (a,a) %g; ", eps, play_c.br_total(),
                            expected, play_a.br_total());
  }
  v.detail = detail.substr(0, detail.size() - 2);
  return v;
}

std::vector<std::string> determinism_csvs(const ExperimentConfig& config,
                                          const std::filesystem::path& dir) {
  ExperimentConfig c = config;
  c.output_dir = dir.string();
  run_experiment(c);
  std::vector<std::string> out;
  for (auto seed : c.seeds) {
    std::ifstream in(dir / ("seed_" + std::to_string(seed) + ".csv"), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    out.push_back(buf.str());
  }
  return out;
}

Verdict determinism() {
  std::vector<ExperimentConfig> configs;
  configs.push_back(condorcet_ccedb(300, 3));
  configs.push_back(finite_minmaxdb(300, 3));
  configs.back().environment.n_contexts = 4;
  configs.back().algorithm.gamma = 60.0;

  ExperimentConfig rps = condorcet_ccedb(300, 3);
  rps.environment.fixture = "rps3";
  rps.environment.k = 3;
  configs.push_back(rps);

  ExperimentConfig lin;
  lin.algorithm.kind = "ccelindb";
  lin.environment.kind = "linear";
  lin.environment.k = 4;
  lin.environment.dim = 3;
  lin.horizon = 300;
  lin.seeds = {0, 1, 2};
  configs.push_back(lin);

  ExperimentConfig vaw = lin;
  vaw.algorithm.kind = "minmaxdb";
  vaw.algorithm.oracle.kind = "vaw";
  vaw.algorithm.gamma = 40.0;
  vaw.environment.perturbation = 0.1;
  configs.push_back(vaw);

  const auto root = std::filesystem::temp_directory_path() /
                    ("duelbandit-determinism-" + std::to_string(::getpid()));
  int files = 0, mismatches = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto first = determinism_csvs(configs[i], root / std::to_string(i) / "a");
    const auto second = determinism_csvs(configs[i], root / std::to_string(i) / "b");
    for (std::size_t j = 0; j < first.size(); ++j) {
      ++files;
      if (first[j].empty() || first[j] != second[j]) ++mismatches;
    }
  }
  std::filesystem::remove_all(root);
  Verdict v;
  v.passed = mismatches == 0;
  v.detail = printf_string("%d CSV pairs from %zu configs, %d differ", files, configs.size(),
                           mismatches);
  return v;
}

using Check = Verdict (*)();

struct Entry {
  Criterion criterion;
  Check check;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {{1, "igw-feasibility", 60}, igw_feasibility},
      {{2, "per-round-inequality", 60}, per_round_inequality},
      {{3, "cce-validity", 120}, cce_validity},
      {{4, "confidence-coverage", 300}, coverage},
      {{5, "ccedb-scaling", 600}, ccedb_scaling},
      {{6, "minmaxdb-scaling", 600}, minmaxdb_scaling},
      {{7, "oracle-budgets", 120}, oracle_budgets},
      {{8, "fb-dominance", 1200}, fb_dominance},
      {{9, "nash-certificate", 60}, nash_certificate},
      {{10, "hardness-instance", 1}, hardness_instance},
      {{11, "determinism", 120}, determinism},
  };
  return entries;
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = [] {
    std::vector<Criterion> out;
    for (const auto& e : registry()) out.push_back(e.criterion);
    return out;
  }();
  return list;
}

CriterionResult run_criterion(int id) {
  for (const auto& e : registry()) {
    if (e.criterion.id != id) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = e.check();
    } catch (const std::exception& ex) {
      v = {false, std::string("threw: ") + ex.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CriterionResult r{id, std::string(e.criterion.name), v.passed, v.detail, seconds};
    if (seconds > e.criterion.budget_seconds) {
      r.passed = false;
      r.detail += printf_string("; over the %.0f s budget", e.criterion.budget_seconds);
    }
    return r;
  }
  throw Error(ErrorCode::kConfigError, "no acceptance criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_suite(std::string_view name) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (name == "all" || name == c.name || name == std::to_string(c.id)) {
      out.push_back(run_criterion(c.id));
    }
  }
  if (out.empty()) throw Error(ErrorCode::kConfigError, "unknown suite '" + std::string(name) + "'");
  return out;
}

std::string format(const CriterionResult& r) {
  return printf_string("%s %2d %-22s %s (%.2f s)", r.passed ? "PASS" : "FAIL", r.id,
                       r.name.c_str(), r.detail.c_str(), r.seconds);
}

}  // namespace duelbandit::acceptance
