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

#include "duelbandit/harness.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace duelbandit {

using json = nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) config_error("matrix must be a nonempty array of rows");
  const auto rows = static_cast<int>(j.size());
  const auto cols = static_cast<int>(j.front().size());
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) config_error("matrix rows differ in length");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double resolved_delta(const ExperimentConfig& c) {
  return c.algorithm.delta.value_or(1.0 / static_cast<double>(c.horizon));
}

double oracle_radius(const ExperimentConfig& c) {
  return c.algorithm.oracle.radius.value_or(std::sqrt(static_cast<double>(c.environment.dim)));
}

// Linear features are rescaled so every entry stays in [-1, 1].
double feature_norm(const ExperimentConfig& c) {
  return std::sqrt(static_cast<double>(c.environment.dim));
}

ClassParams class_params(const ExperimentConfig& c) {
  ClassParams p;
  p.class_size = c.environment.class_size;
  p.dim = c.environment.dim;
  p.lambda = c.algorithm.oracle.lambda;
  p.radius = oracle_radius(c);
  p.feature_norm = feature_norm(c);
  return p;
}

std::optional<RegretBudget> oracle_budget(const ExperimentConfig& c) {
  if (c.algorithm.kind != "minmaxdb") return std::nullopt;
  return regret_budget(oracle_kind_from_string(c.algorithm.oracle.kind), class_params(c));
}

double resolved_gamma(const ExperimentConfig& c) {
  if (c.algorithm.gamma) return *c.algorithm.gamma;
  return default_gamma(c.environment.k, c.horizon, *oracle_budget(c));
}

double resolved_eta(const ExperimentConfig& c) {
  if (c.algorithm.eta) return *c.algorithm.eta;
  return CceLinDb::default_eta(c.environment.dim, c.horizon, c.algorithm.lambda,
                               resolved_delta(c));
}

struct Setup {
  Environment environment;
  std::vector<Hypothesis> hypotheses;
};

PreferenceMatrix fixture_matrix(const EnvironmentSpec& e) {
  if (e.fixture == "rps3") return rps3();
  if (e.fixture == "condorcet") return condorcet(e.k, e.margin);
  if (e.fixture == "hardness") return hardness(e.epsilon);
  if (e.fixture == "explicit") return validate_preference_matrix(*e.matrix);
  config_error("unknown fixture '" + e.fixture + "'");
}

Setup build_setup(const ExperimentConfig& c, Rng& rng) {
  const EnvironmentSpec& e = c.environment;
  if (e.kind == "linear") {
    Environment env = make_linear(e.k, e.dim, rng);
    env.with_perturbation(e.perturbation);
    return {std::move(env), {}};
  }
  if (e.kind == "finite") {
    FiniteClassInstance inst = make_finite_class(e.n_contexts, e.k, e.class_size, rng);
    inst.environment.with_perturbation(e.perturbation);
    return {std::move(inst.environment), std::move(inst.hypotheses)};
  }
  PreferenceMatrix truth = fixture_matrix(e);
  std::vector<Hypothesis> hypotheses;
  if (c.algorithm.kind == "minmaxdb" && e.class_size > 1) {
    hypotheses = make_finite_class(1, e.k, e.class_size - 1, rng).hypotheses;
  }
  const auto slot = static_cast<std::ptrdiff_t>(rng.below(hypotheses.size() + 1));
  hypotheses.insert(hypotheses.begin() + slot, TabularHypothesis{{truth}});
  Environment env = Environment::fixed_matrix(std::move(truth));
  env.with_perturbation(e.perturbation);
  return {std::move(env), std::move(hypotheses)};
}

Learner make_learner(const ExperimentConfig& c, const Setup& setup) {
  const AlgorithmSpec& a = c.algorithm;
  const int k = c.environment.k;
  if (a.kind == "ccedb") return CceDb(k, resolved_delta(c), a.solver);
  if (a.kind == "ccelindb") {
    return CceLinDb(k, c.environment.dim, a.lambda, resolved_eta(c), a.solver);
  }
  OracleState oracle = [&]() -> OracleState {
    switch (oracle_kind_from_string(a.oracle.kind)) {
      case OracleKind::kFiniteClass:
        return FiniteClassAggregator(setup.hypotheses, a.oracle.eta);
      case OracleKind::kVaw:
        return VawForecaster(c.environment.dim, a.oracle.lambda);
      case OracleKind::kOgd: {
        const double r = oracle_radius(c);
        const double step = a.oracle.step.value_or(
            OgdForecaster::default_step(r, feature_norm(c), c.horizon));
        return OgdForecaster(c.environment.dim, r, step);
      }
      default:
        throw Error(ErrorCode::kUnsupportedOracle, "oracle '" + a.oracle.kind + "'");
    }
  }();
  return MinMaxDb(k, std::move(oracle), resolved_gamma(c), a.solver);
}

Matrix mean_preference(const ExperimentConfig& c, const Environment& env) {
  if (env.kind() == EnvironmentKind::kLinearRealizable) return Matrix::Zero(c.environment.k, c.environment.k);
  Matrix sum = Matrix::Zero(env.k(), env.k());
  for (std::size_t id = 0; id < env.num_contexts(); ++id) {
    sum += env.ground_truth(Context{id, env.k(), {}}).entries();
  }
  return sum / static_cast<double>(env.num_contexts());
}

ActionDistribution comparator(const ExperimentConfig& c, const Environment& env) {
  const BenchmarkSpec& b = c.benchmark;
  if (b.comparator == "explicit") return ActionDistribution::from_weights(*b.q);
  const PreferenceMatrix mean = validate_preference_matrix(mean_preference(c, env));
  if (b.comparator == "nash") return solve_zero_sum_nash(mean).point;
  for (int i = 0; i < mean.k(); ++i) {
    bool wins_all = true;
    for (int j = 0; j < mean.k(); ++j) wins_all = wins_all && (i == j || mean(i, j) > 0.0);
    if (wins_all) return ActionDistribution::point_mass(mean.k(), i);
  }
  config_error("comparator 'condorcet' requested but no arm beats all others");
}

std::vector<Policy> make_policies(const ExperimentConfig& c, const Environment& env, Rng& rng) {
  const int k = c.environment.k;
  const std::size_t wanted = std::max<std::size_t>(c.benchmark.policies, 1);
  std::vector<Policy> out;
  for (int arm = 0; arm < k && out.size() < wanted; ++arm) out.push_back({{arm}});
  const bool contextual = env.kind() == EnvironmentKind::kFiniteClass && env.num_contexts() > 1;
  while (contextual && out.size() < wanted) {
    Policy p;
    for (std::size_t id = 0; id < env.num_contexts(); ++id) {
      p.arms.push_back(static_cast<int>(rng.below(k)));
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Coverage of f* by the learner's confidence band, and the per-round regret
// bound the band implies.
struct Diagnostic {
  bool covered = true;
  bool bound_ok = true;
};

Diagnostic coverage_before(const Learner& learner, const Context& ctx, const PreferenceMatrix& f) {
  Diagnostic d;
  if (const auto* l = std::get_if<CceDb>(&learner)) {
    d.covered = l->covers(f);
  } else if (const auto* l = std::get_if<CceLinDb>(&learner)) {
    const Matrix width = l->confidence(ctx);
    const Vector w = l->estimate();
    for (int a = 0; a < ctx.k; ++a) {
      for (int b = 0; b < ctx.k; ++b) {
        if (a != b && std::abs(f(a, b) - w.dot(ctx.pair_features(a, b))) > width(a, b)) {
          d.covered = false;
        }
      }
    }
  }
  return d;
}

bool bound_holds(const Learner& learner, const Context& ctx, const PreferenceMatrix& f,
                 const Selection& sel, double br) {
  const auto& p = sel.joint.weights();
  if (const auto* l = std::get_if<CceDb>(&learner)) {
    return 2.0 * br <= 2.0 * p.cwiseProduct(l->confidence()).sum() + 1e-8;
  }
  if (const auto* l = std::get_if<CceLinDb>(&learner)) {
    return 2.0 * br <= 2.0 * p.cwiseProduct(l->confidence(ctx)).sum() + 1e-8;
  }
  const auto& m = std::get<MinMaxDb>(learner);
  const Matrix gap = f.entries() - m.last_prediction()->entries();
  const double k = f.k();
  const double rhs = 0.5 * m.gamma() * p.cwiseProduct(gap.cwiseAbs2()).sum() +
                     igw_budget(f.k(), m.gamma()) + k / m.gamma() + 1e-9;
  return br <= rhs;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) config_error("cannot write " + path.string());
  out << text;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(json_text);
    read(j, "horizon", c.horizon);
    read(j, "seeds", c.seeds);
    read(j, "output_dir", c.output_dir);
    read(j, "diagnostic", c.diagnostic);
    if (j.contains("algorithm")) {
      const json& a = j.at("algorithm");
      read(a, "kind", c.algorithm.kind);
      read(a, "delta", c.algorithm.delta);
      read(a, "lambda", c.algorithm.lambda);
      read(a, "eta", c.algorithm.eta);
      read(a, "t0", c.algorithm.t0);
      if (a.contains("gamma") && !(a.at("gamma").is_string() && a.at("gamma") == "auto")) {
        c.algorithm.gamma = a.at("gamma").get<double>();
      }
      if (a.contains("oracle")) {
        const json& o = a.at("oracle");
        read(o, "kind", c.algorithm.oracle.kind);
        read(o, "eta", c.algorithm.oracle.eta);
        read(o, "lambda", c.algorithm.oracle.lambda);
        read(o, "radius", c.algorithm.oracle.radius);
        read(o, "step", c.algorithm.oracle.step);
      }
      if (a.contains("solver")) {
        const json& s = a.at("solver");
        read(s, "max_iterations", c.algorithm.solver.max_iterations);
        read(s, "violation_tolerance", c.algorithm.solver.violation_tolerance);
        read(s, "floor_epsilon", c.algorithm.solver.floor_epsilon);
      }
    }
    if (j.contains("environment")) {
      const json& e = j.at("environment");
      read(e, "kind", c.environment.kind);
      read(e, "fixture", c.environment.fixture);
      read(e, "k", c.environment.k);
      read(e, "margin", c.environment.margin);
      read(e, "epsilon", c.environment.epsilon);
      read(e, "n_contexts", c.environment.n_contexts);
      read(e, "class_size", c.environment.class_size);
      read(e, "dim", c.environment.dim);
      read(e, "perturbation", c.environment.perturbation);
      if (e.contains("matrix")) {
        c.environment.matrix = matrix_from_json(e.at("matrix"));
        c.environment.fixture = "explicit";
        c.environment.k = static_cast<int>(c.environment.matrix->rows());
      }
    }
    if (j.contains("benchmark")) {
      const json& b = j.at("benchmark");
      read(b, "comparator", c.benchmark.comparator);
      read(b, "policies", c.benchmark.policies);
      if (b.contains("q")) {
        const auto q = b.at("q").get<std::vector<double>>();
        c.benchmark.q = Eigen::Map<const Vector>(q.data(), static_cast<int>(q.size()));
        c.benchmark.comparator = "explicit";
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& c) {
  if (c.horizon < 1) config_error("horizon must be at least 1");
  if (c.seeds.empty()) config_error("seed list is empty");
  const auto& e = c.environment;
  const auto& a = c.algorithm;
  if (e.k < 2) config_error("k must be at least 2");
  if (e.kind != "fixed" && e.kind != "finite" && e.kind != "linear") {
    config_error("environment kind must be fixed, finite or linear");
  }
  if (e.kind == "fixed") {
    if (e.fixture == "rps3" || e.fixture == "hardness") {
      if (e.k != 3) config_error(e.fixture + " has exactly 3 arms");
    } else if (e.fixture == "explicit") {
      if (!e.matrix) config_error("explicit fixture needs a matrix");
      validate_preference_matrix(*e.matrix);
    } else if (e.fixture != "condorcet") {
      config_error("unknown fixture '" + e.fixture + "'");
    }
  }
  if (e.kind == "finite" && (e.class_size < 1 || e.n_contexts < 1)) {
    config_error("class_size and n_contexts must be at least 1");
  }
  if (e.kind == "linear" && e.dim < 1) config_error("dim must be at least 1");
  if (a.kind == "ccedb") {
    if (e.kind == "linear") config_error("ccedb needs a tabular environment");
    const double delta = resolved_delta(c);
    if (!(delta > 0.0 && delta < 1.0)) config_error("delta must lie in (0, 1)");
  } else if (a.kind == "ccelindb") {
    if (e.kind != "linear") config_error("ccelindb needs a linear environment");
    if (a.t0) spdlog::warn("t0 is accepted for ccelindb but has no effect");
  } else if (a.kind == "minmaxdb") {
    const OracleKind kind = oracle_kind_from_string(a.oracle.kind);
    const bool linear = e.kind == "linear";
    if (kind == OracleKind::kFiniteClass && linear) {
      config_error("finite-class oracle needs a tabular environment");
    }
    if ((kind == OracleKind::kVaw || kind == OracleKind::kOgd) && !linear) {
      config_error("linear oracles need a linear environment");
    }
    if (!a.gamma) resolved_gamma(c);  // auto-gamma needs a budget and a long enough horizon
  } else {
    config_error("algorithm kind must be ccedb, ccelindb or minmaxdb");
  }
  const auto& b = c.benchmark;
  if (b.comparator == "explicit") {
    if (!b.q || b.q->size() != e.k) config_error("explicit comparator needs q of length k");
  } else if (b.comparator != "nash" && b.comparator != "condorcet") {
    config_error("comparator must be nash, condorcet or explicit");
  }
}

std::string resolved_config_json(const ExperimentConfig& c) {
  json a = {{"kind", c.algorithm.kind},
            {"solver",
             {{"max_iterations", c.algorithm.solver.max_iterations},
              {"violation_tolerance", c.algorithm.solver.violation_tolerance}}}};
  if (c.algorithm.solver.floor_epsilon) {
    a["solver"]["floor_epsilon"] = *c.algorithm.solver.floor_epsilon;
  }
  if (c.algorithm.kind == "ccedb") a["delta"] = resolved_delta(c);
  if (c.algorithm.kind == "ccelindb") {
    a["delta"] = resolved_delta(c);
    a["lambda"] = c.algorithm.lambda;
    a["eta"] = resolved_eta(c);
    if (c.algorithm.t0) a["t0"] = *c.algorithm.t0;
  }
  if (c.algorithm.kind == "minmaxdb") {
    a["gamma"] = resolved_gamma(c);
    a["gamma_rule"] = c.algorithm.gamma ? "explicit" : "auto";
    const auto& o = c.algorithm.oracle;
    json oj = {{"kind", o.kind}};
    const OracleKind kind = oracle_kind_from_string(o.kind);
    if (kind == OracleKind::kFiniteClass) oj["eta"] = o.eta;
    if (kind == OracleKind::kVaw) oj["lambda"] = o.lambda;
    if (kind == OracleKind::kOgd) {
      oj["radius"] = oracle_radius(c);
      oj["step"] = o.step.value_or(
          OgdForecaster::default_step(oracle_radius(c), feature_norm(c), c.horizon));
    }
    if (auto budget = oracle_budget(c)) {
      oj["budget"] = budget->description;
      oj["budget_at_horizon"] = (*budget)(static_cast<double>(c.horizon));
    }
    a["oracle"] = std::move(oj);
  }
  const auto& e = c.environment;
  json ej = {{"kind", e.kind}, {"k", e.k}, {"perturbation", e.perturbation}};
  if (e.kind == "fixed") {
    ej["fixture"] = e.fixture;
    if (e.fixture == "condorcet") ej["margin"] = e.margin;
    if (e.fixture == "hardness") ej["epsilon"] = e.epsilon;
    if (e.fixture == "explicit") ej["matrix"] = matrix_to_json(*e.matrix);
  }
  if (e.kind == "finite") ej["n_contexts"] = e.n_contexts;
  if (e.kind == "finite" || (e.kind == "fixed" && c.algorithm.kind == "minmaxdb")) {
    ej["class_size"] = e.class_size;
  }
  if (e.kind == "linear") ej["dim"] = e.dim;
  json bj = {{"comparator", c.benchmark.comparator},
             {"policies", std::max<std::size_t>(c.benchmark.policies, 1)}};
  if (c.benchmark.q) bj["q"] = vector_to_json(*c.benchmark.q);
  json out = {{"horizon", c.horizon},   {"seeds", c.seeds},     {"output_dir", c.output_dir},
              {"diagnostic", c.diagnostic}, {"algorithm", a}, {"environment", ej},
              {"benchmark", bj}};
  return out.dump(2) + "\n";
}

RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Rng root(seed);
  Rng env_rng = root.split(0);
  Rng learner_rng = root.split(1);
  Rng outcome_rng = root.split(2);
  Rng setup_rng = root.split(3);

  Setup setup = build_setup(config, setup_rng);
  const Environment& env = setup.environment;
  Learner learner = make_learner(config, setup);
  const ActionDistribution q_star = comparator(config, env);
  RegretLedger ledger(make_policies(config, env, setup_rng));
  const double gamma = config.algorithm.kind == "minmaxdb" ? resolved_gamma(config) : 0.0;

  RunResult result;
  RunSummary& s = result.summary;
  s.seed = seed;
  s.horizon = config.horizon;
  result.rows.reserve(static_cast<std::size_t>(config.horizon));
  try {
    for (std::int64_t t = 1; t <= config.horizon; ++t) {
      RoundDraw draw = env.sample_round(env_rng);
      const PreferenceMatrix f = env.ground_truth(draw.context);
      Diagnostic diag;
      if (config.diagnostic) diag = coverage_before(learner, draw.context, f);

      const Selection sel = select(learner, draw.context, learner_rng);
      const double br = br_regret_step(f, sel.joint);
      const double fb = fb_regret_step(f, sel.joint, q_star);
      if (config.diagnostic) {
        if (!diag.covered) ++s.confidence_violations;
        if (diag.covered && !bound_holds(learner, draw.context, f, sel, br)) {
          ++s.bound_violations;
        }
      }

      const int outcome = sample_outcome(draw.realized(sel.duel.a, sel.duel.b), outcome_rng);
      observe(learner, draw.context, sel.duel, outcome);
      ledger.accumulate_policy(f, draw.context.id, sel.duel);
      ledger.record(br, fb);
      s.solver_iterations += sel.solver_iterations;

      const auto i = static_cast<std::size_t>(t - 1);
      result.rows.push_back({t, sel.duel.a, sel.duel.b, outcome, br, ledger.br_cumulative()[i],
                             fb, ledger.fb_cumulative()[i], ledger.policy_cumulative()[i],
                             gamma, sel.solver_iterations});
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotConverged) throw;
    s.failed = true;
    s.error = e.what();
    spdlog::error("seed {}: {}", seed, e.what());
  }
  s.br_regret = ledger.br_total();
  s.fb_regret = ledger.fb_total();
  s.policy_regret = ledger.policy_total();
  const auto budget = oracle_budget(config);
  const double reg = budget ? (*budget)(static_cast<double>(config.horizon)) : 1.0;
  s.normalized = std::max(0.0, s.br_regret) /
                 std::sqrt(config.environment.k * static_cast<double>(config.horizon) * reg);
  result.dominance = dominance_report(ledger);
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DUELBANDIT_THREADS")) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1) cap = std::min(cap, static_cast<std::size_t>(requested));
  }
  return std::max<std::size_t>(1, std::min(cap, jobs));
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::size_t n = config.seeds.size();
  std::vector<RunResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_seed(config, config.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(n);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    std::vector<RunSummary> summaries;
    for (const auto& r : results) {
      std::ostringstream csv;
      write_rounds_csv(csv, r.summary.seed, r.rows);
      write_file(dir / ("seed_" + std::to_string(r.summary.seed) + ".csv"), csv.str());
      summaries.push_back(r.summary);
    }
    std::ostringstream summary;
    write_summary_csv(summary, summaries);
    write_file(dir / "summary.csv", summary.str());
    write_file(dir / "resolved_config.json", resolved_config_json(config));
  }
  return results;
}

void write_rounds_csv(std::ostream& out, std::uint64_t seed, const std::vector<RoundRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << seed << ',' << r.t << ',' << r.arm_a << ',' << r.arm_b << ',' << r.outcome << ','
        << fmt17(r.br_step) << ',' << fmt17(r.br_cum) << ',' << fmt17(r.fb_step) << ','
        << fmt17(r.fb_cum) << ',' << fmt17(r.policy_cum) << ',' << fmt17(r.gamma) << ','
        << r.solver_iters << '\n';
  }
}

std::vector<RoundRow> read_rounds_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) config_error("unexpected round CSV header");
  std::vector<RoundRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) config_error("round CSV row has " + std::to_string(f.size()) + " fields");
    rows.push_back({std::stoll(f[1]), std::stoi(f[2]), std::stoi(f[3]), std::stoi(f[4]),
                    std::strtod(f[5].c_str(), nullptr), std::strtod(f[6].c_str(), nullptr),
                    std::strtod(f[7].c_str(), nullptr), std::strtod(f[8].c_str(), nullptr),
                    std::strtod(f[9].c_str(), nullptr), std::strtod(f[10].c_str(), nullptr),
                    std::stoi(f[11])});
  }
  return rows;
}

namespace {
constexpr std::string_view kSummaryHeader =
    "seed,horizon,br_regret,fb_regret,policy_regret,normalized,wall_seconds,"
    "solver_iterations,confidence_violations,bound_violations,status,error";
}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& summaries) {
  out << kSummaryHeader << '\n';
  for (const auto& s : summaries) {
    out << s.seed << ',' << s.horizon << ',' << fmt17(s.br_regret) << ','
        << fmt17(s.fb_regret) << ',' << fmt17(s.policy_regret) << ',' << fmt17(s.normalized)
        << ',' << fmt17(s.wall_seconds) << ',' << s.solver_iterations << ','
        << s.confidence_violations << ',' << s.bound_violations << ','
        << (s.failed ? "failed" : "ok") << ',' << csv_safe(s.error) << '\n';
  }
}

std::vector<RunSummary> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) config_error("unexpected summary header");
  std::vector<RunSummary> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) config_error("summary row has " + std::to_string(f.size()) + " fields");
    RunSummary s;
    s.seed = std::stoull(f[0]);
    s.horizon = std::stoll(f[1]);
    s.br_regret = std::strtod(f[2].c_str(), nullptr);
    s.fb_regret = std::strtod(f[3].c_str(), nullptr);
    s.policy_regret = std::strtod(f[4].c_str(), nullptr);
    s.normalized = std::strtod(f[5].c_str(), nullptr);
    s.wall_seconds = std::strtod(f[6].c_str(), nullptr);
    s.solver_iterations = std::stoll(f[7]);
    s.confidence_violations = std::stoll(f[8]);
    s.bound_violations = std::stoll(f[9]);
    s.failed = f[10] == "failed";
    s.error = f[11];
    out.push_back(std::move(s));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double nearest_rank(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

std::vector<double> resample(const std::vector<double>& v, Rng& rng) {
  std::vector<double> out(v.size());
  for (auto& x : out) x = v[rng.below(v.size())];
  return out;
}

}  // namespace

BatchReport aggregate(const std::vector<RunSummary>& summaries) {
  if (summaries.empty()) config_error("nothing to aggregate");
  BatchReport report;
  report.runs = summaries.size();
  std::map<std::int64_t, std::vector<const RunSummary*>> by_horizon;
  for (const auto& s : summaries) {
    if (s.failed) {
      ++report.failed;
      continue;
    }
    by_horizon[s.horizon].push_back(&s);
  }
  std::map<std::int64_t, std::vector<double>> br_by_horizon;
  for (const auto& [horizon, runs] : by_horizon) {
    std::vector<double> br, fb, policy;
    for (const auto* s : runs) {
      br.push_back(s->br_regret);
      fb.push_back(s->fb_regret);
      policy.push_back(s->policy_regret);
    }
    report.horizons.push_back({horizon, runs.size(), mean(br), median(br),
                               nearest_rank(br, 0.95), mean(fb), median(fb), mean(policy),
                               median(policy)});
    br_by_horizon[horizon] = std::move(br);
  }
  Rng rng(0);
  constexpr int kResamples = 2000;
  for (const auto& [lo, lo_br] : br_by_horizon) {
    const auto hi = br_by_horizon.find(4 * lo);
    if (hi == br_by_horizon.end()) continue;
    const double base = median(lo_br);
    ScalingRatio r{lo, hi->first, base > 0.0 ? median(hi->second) / base : 0.0, 0.0, 0.0};
    std::vector<double> boot;
    for (int i = 0; i < kResamples; ++i) {
      const double b = median(resample(lo_br, rng));
      if (b > 0.0) boot.push_back(median(resample(hi->second, rng)) / b);
    }
    r.ci_low = nearest_rank(boot, 0.025);
    r.ci_high = nearest_rank(boot, 0.975);
    report.ratios.push_back(r);
  }
  return report;
}

std::vector<RunSummary> read_summaries(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) config_error(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "summary.csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunSummary> out;
  for (const auto& path : files) {
    std::ifstream in(path);
    auto part = read_summary_csv(in);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::string to_json(const BatchReport& report) {
  json horizons = json::array();
  for (const auto& h : report.horizons) {
    horizons.push_back({{"horizon", h.horizon},
                        {"runs", h.runs},
                        {"br", {{"mean", h.mean_br}, {"median", h.median_br}, {"p95", h.p95_br}}},
                        {"fb", {{"mean", h.mean_fb}, {"median", h.median_fb}}},
                        {"policy", {{"mean", h.mean_policy}, {"median", h.median_policy}}}});
  }
  json ratios = json::array();
  for (const auto& r : report.ratios) {
    ratios.push_back({{"from", r.from},
                      {"to", r.to},
                      {"ratio", r.ratio},
                      {"ci95", {r.ci_low, r.ci_high}}});
  }
  json out = {{"runs", report.runs},
              {"failed", report.failed},
              {"horizons", horizons},
              {"scaling", ratios}};
  return out.dump(2) + "\n";
}

}  // namespace duelbandit
