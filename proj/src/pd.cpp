// Copyright 2026 The qnum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnum/pd.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qnum/error.hpp"
#include "qnum/kernels/kernels.hpp"

namespace qnum {
namespace {

void CheckShapes(const PdState& s, const ValidatedProblem& p) {
  if (static_cast<std::size_t>(s.x.size()) != p.num_agents() ||
      static_cast<std::size_t>(s.lambda.size()) != p.num_constraints()) {
    throw Error(ErrorKind::kDimension, "state does not match problem dimensions");
  }
}

void CheckFinite(const PdState& s) {
  if (!s.x.allFinite() || !s.lambda.allFinite()) {
    throw Error(ErrorKind::kNumeric,
                "non-finite PD state at k=" + std::to_string(s.k));
  }
}

}  // namespace

StepSchedule StepSchedule::Constant(double mu) {
  StepSchedule s;
  s.mu_star_ = mu;
  s.constant_ = true;
  return s;
}

StepSchedule StepSchedule::FromFunction(
    std::function<double(std::int64_t)> mu_of_k, double mu_star) {
  StepSchedule s;
  s.fn_ = std::move(mu_of_k);
  s.mu_star_ = mu_star;
  s.constant_ = false;
  return s;
}

void StepSchedule::Check(const ValidatedProblem& problem,
                         std::int64_t horizon) const {
  if (!(mu_star_ > 0.0)) {
    throw Error(ErrorKind::kParam, "limit step size must be positive");
  }
  const double cap = problem.step_cap();
  const std::int64_t last = constant_ ? 1 : horizon;
  for (std::int64_t k = 0; k < last; ++k) {
    const double mu = at(k);
    if (!(mu > 0.0) || mu > cap) {
      throw Error(ErrorKind::kParam,
                  "step size " + std::to_string(mu) + " at k=" +
                      std::to_string(k) + " outside (0, " +
                      std::to_string(cap) + "]");
    }
  }
}

PdState QuantizedStep(const PdState& state, std::span<const double> qx,
                      std::span<const double> qlambda,
                      const ValidatedProblem& problem,
                      const StepSchedule& schedule) {
  CheckShapes(state, problem);
  const std::size_t m = problem.num_agents();
  const std::size_t n = problem.num_constraints();
  if (qx.size() != m || qlambda.size() != n) {
    throw Error(ErrorKind::kDimension, "quantized vectors do not match problem");
  }
  const double mu = schedule.at(state.k);

  std::vector<double> at_lambda(m);
  std::vector<double> a_x(n);
  kernels::Gemv(problem.at_rows(), m, n, qlambda, at_lambda);
  kernels::Gemv(problem.a_rows(), n, m, qx, a_x);

  PdState next;
  next.x.resize(static_cast<Eigen::Index>(m));
  next.lambda.resize(static_cast<Eigen::Index>(n));
  next.k = state.k + 1;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double xi = state.x(ii);
    next.x(ii) = xi + mu * (Derivative(problem.utility(i), xi) - at_lambda[i]);
  }
  const auto b = problem.b();
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    next.lambda(jj) = state.lambda(jj) + mu * (a_x[j] - b[j]);
  }
  CheckFinite(next);
  return next;
}

PdState UnquantizedStep(const PdState& state, const ValidatedProblem& problem,
                        const StepSchedule& schedule) {
  return QuantizedStep(
      state, std::span<const double>(state.x.data(), state.x.size()),
      std::span<const double>(state.lambda.data(), state.lambda.size()),
      problem, schedule);
}

TMatrix BuildTMatrix(const ValidatedProblem& problem, double mu) {
  if (!problem.all_quadratic()) {
    throw Error(ErrorKind::kNotQuadratic, "T matrix needs quadratic utilities");
  }
  const auto m = static_cast<Eigen::Index>(problem.num_agents());
  const auto n = static_cast<Eigen::Index>(problem.num_constraints());
  const auto& a = problem.problem().a_matrix;
  TMatrix t;
  t.mu = mu;
  t.num_agents = problem.num_agents();
  t.entries = Eigen::MatrixXd::Zero(m + n, m + n);
  t.affine.resize(m + n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& q = std::get<QuadraticUtility>(problem.utility(static_cast<std::size_t>(i)));
    t.entries(i, i) = 1.0 - mu * q.a;
    t.affine(i) = mu * q.c;
  }
  t.entries.topRightCorner(m, n) = -mu * a.transpose();
  t.entries.bottomLeftCorner(n, m) = mu * a;
  t.entries.bottomRightCorner(n, n).setIdentity();
  t.affine.tail(n) = -mu * problem.problem().b;
  return t;
}

double SpectralRadius(const Eigen::MatrixXd& t) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(t, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumeric, "eigenvalue computation failed");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Contraction ContractionConstant(const Eigen::MatrixXd& t) {
  if (t.rows() != t.cols() || t.rows() == 0) {
    throw Error(ErrorKind::kDimension, "T must be square and non-empty");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(t);
  const double two_norm = svd.singularValues()(0);
  if (two_norm < 1.0) return {two_norm, true};
  const double rho = SpectralRadius(t);
  if (!(rho < 1.0)) {
    throw Error(ErrorKind::kNotContractive,
                "spectral radius " + std::to_string(rho) + " >= 1");
  }
  return {rho, false};
}

ErrorVector ComputeErrorVector(const PdState& state, const Optimum& optimum) {
  if (state.x.size() != optimum.x_star.size() ||
      state.lambda.size() != optimum.lambda_star.size()) {
    throw Error(ErrorKind::kDimension, "state and optimum differ in shape");
  }
  ErrorVector e;
  e.num_agents = static_cast<std::size_t>(state.x.size());
  e.eps.resize(state.x.size() + state.lambda.size());
  e.eps.head(state.x.size()) = state.x - optimum.x_star;
  e.eps.tail(state.lambda.size()) = state.lambda - optimum.lambda_star;
  return e;
}

}  // namespace qnum
