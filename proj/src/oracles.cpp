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

#include "duelbandit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace duelbandit {

namespace {

double clip_unit(double v) { return std::clamp(v, -1.0, 1.0); }

void check_dim(const Vector& x, Eigen::Index dim) {
  if (x.size() != dim) {
    std::ostringstream os;
    os << "feature length " << x.size() << " != " << dim;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

}  // namespace

double evaluate(const Hypothesis& h, const OracleInput& z) {
  return std::visit(
      [&](const auto& hyp) -> double {
        using T = std::decay_t<decltype(hyp)>;
        if constexpr (std::is_same_v<T, TabularHypothesis>) {
          if (z.context_id >= hyp.by_context.size()) {
            throw Error(ErrorCode::kUnknownContext,
                        "context " + std::to_string(z.context_id) + " not in table");
          }
          return hyp.by_context[z.context_id](z.a, z.b);
        } else {
          check_dim(z.features, hyp.weights.size());
          return clip_unit(hyp.weights.dot(z.features));
        }
      },
      h);
}

FiniteClassAggregator::FiniteClassAggregator(std::vector<Hypothesis> hypotheses,
                                             double eta)
    : hypotheses_(std::move(hypotheses)),
      log_weights_(Vector::Zero(static_cast<Eigen::Index>(hypotheses_.size()))),
      eta_(eta) {
  if (hypotheses_.empty()) {
    throw Error(ErrorCode::kConfigError, "finite class must be nonempty");
  }
}

Vector FiniteClassAggregator::weights() const {
  const Vector shifted = (log_weights_.array() - log_weights_.maxCoeff()).exp();
  return shifted / shifted.sum();
}

double FiniteClassAggregator::predict(const OracleInput& z) const {
  const Vector w = weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
    acc += w(static_cast<Eigen::Index>(i)) * evaluate(hypotheses_[i], z);
  }
  return clip_unit(acc);
}

void FiniteClassAggregator::update(const OracleInput& z, double y) {
  for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
    const double r = evaluate(hypotheses_[i], z) - y;
    log_weights_(static_cast<Eigen::Index>(i)) -= eta_ * r * r;
  }
  // Keep log-weights anchored at zero so they stay finite over long runs.
  log_weights_.array() -= log_weights_.maxCoeff();
}

VawForecaster::VawForecaster(int dim, double lambda)
    : a_(lambda * Matrix::Identity(dim, dim)), b_(Vector::Zero(dim)), lambda_(lambda) {
  if (dim < 1 || !(lambda > 0.0)) {
    throw Error(ErrorCode::kConfigError, "VAW needs dim >= 1 and lambda > 0");
  }
}

void VawForecaster::check(const Vector& x) const { check_dim(x, b_.size()); }

double VawForecaster::predict(const OracleInput& z) const {
  check(z.features);
  const Vector& x = z.features;
  const Matrix design = a_ + x * x.transpose();
  return clip_unit(b_.dot(design.llt().solve(x)));
}

void VawForecaster::update(const OracleInput& z, double y) {
  check(z.features);
  a_.noalias() += z.features * z.features.transpose();
  b_ += y * z.features;
}

OgdForecaster::OgdForecaster(int dim, double radius, double step)
    : theta_(Vector::Zero(dim)), radius_(radius), step_(step) {
  if (dim < 1 || !(radius > 0.0) || !(step > 0.0)) {
    throw Error(ErrorCode::kConfigError, "OGD needs dim >= 1, radius > 0, step > 0");
  }
}

double OgdForecaster::default_step(double radius, double feature_norm,
                                   std::int64_t horizon) {
  const double lipschitz = 2.0 * (radius * feature_norm + 1.0) * feature_norm;
  return radius / (lipschitz * std::sqrt(static_cast<double>(horizon)));
}

void OgdForecaster::check(const Vector& x) const { check_dim(x, theta_.size()); }

double OgdForecaster::predict(const OracleInput& z) const {
  check(z.features);
  return clip_unit(theta_.dot(z.features));
}

void OgdForecaster::update(const OracleInput& z, double y) {
  check(z.features);
  theta_ -= step_ * 2.0 * (theta_.dot(z.features) - y) * z.features;
  const double norm = theta_.norm();
  if (norm > radius_) theta_ *= radius_ / norm;
}

double predict(const OracleState& state, const OracleInput& z) {
  return std::visit([&](const auto& o) { return o.predict(z); }, state);
}

void update(OracleState& state, const OracleInput& z, double y) {
  if (!(std::abs(y) <= 1.0)) {
    throw Error(ErrorCode::kRangeViolation, "label outside [-1, 1]");
  }
  std::visit([&](auto& o) { o.update(z, y); }, state);
}

OracleKind oracle_kind_from_string(const std::string& name) {
  if (name == "finite") return OracleKind::kFiniteClass;
  if (name == "vaw") return OracleKind::kVaw;
  if (name == "ogd") return OracleKind::kOgd;
  if (name == "glm") return OracleKind::kGlm;
  if (name == "rkhs") return OracleKind::kRkhs;
  if (name == "banach") return OracleKind::kBanach;
  throw Error(ErrorCode::kConfigError, "unknown oracle kind '" + name + "'");
}

RegretBudget regret_budget(OracleKind kind, const ClassParams& params) {
  switch (kind) {
    case OracleKind::kFiniteClass: {
      const double value = 8.0 * std::log(static_cast<double>(params.class_size));
      return {[value](double) { return value; }, "8 ln|F|"};
    }
    case OracleKind::kVaw: {
      const double d = params.dim;
      const double c0 = params.lambda * params.radius * params.radius;
      return {[d, c0](double t) { return d * std::log1p(t / d) + c0; },
              "d ln(1 + T/d) + lambda radius^2"};
    }
    case OracleKind::kOgd: {
      const double lipschitz =
          2.0 * (params.radius * params.feature_norm + 1.0) * params.feature_norm;
      const double c = 2.5 * params.radius * lipschitz;
      return {[c](double t) { return c * std::sqrt(t); }, "2.5 radius L sqrt(T)"};
    }
    case OracleKind::kGlm:
    case OracleKind::kRkhs:
    case OracleKind::kBanach:
      break;
  }
  throw Error(ErrorCode::kUnsupportedOracle,
              "no regression oracle is implemented for this class");
}

}  // namespace duelbandit
