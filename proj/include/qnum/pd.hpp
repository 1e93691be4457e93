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

#pragma once

// Primal-dual iteration for NUM. Both updates read the previous state
// (synchronous, Jacobi-style):
//
//   x_i    <- x_i    + mu_k (U_i'(x_i) - A_i^T lambda_hat)
//   lambda <- lambda + mu_k (A x_hat - b)
//
// where the hatted vectors are the exact values (unquantized step) or the
// decoder outputs of the other side (quantized step).

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>

#include "qnum/problem.hpp"

namespace qnum {

struct PdState {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  std::int64_t k = 0;
};

class StepSchedule {
 public:
  static StepSchedule Constant(double mu);
  // `mu_of_k` must converge to `mu_star`; only the cap and positivity can be
  // checked here.
  static StepSchedule FromFunction(std::function<double(std::int64_t)> mu_of_k,
                                   double mu_star);

  double at(std::int64_t k) const { return constant_ ? mu_star_ : fn_(k); }
  double mu_star() const { return mu_star_; }
  bool is_constant() const { return constant_; }

  // Throws Error{kParam} if some mu_k for k < horizon is non-positive or
  // exceeds the problem's step cap min_i 1/|u_min_i|.
  void Check(const ValidatedProblem& problem, std::int64_t horizon) const;

 private:
  StepSchedule() = default;

  std::function<double(std::int64_t)> fn_;
  double mu_star_ = 0.0;
  bool constant_ = true;
};

PdState UnquantizedStep(const PdState& state, const ValidatedProblem& problem,
                        const StepSchedule& schedule);

// qx / qlambda are the receivers' reconstructions of x_k and lambda_k.
PdState QuantizedStep(const PdState& state, std::span<const double> qx,
                      std::span<const double> qlambda,
                      const ValidatedProblem& problem,
                      const StepSchedule& schedule);

// Linear part of the quadratic PD map: y_{k+1} = T y_k + affine.
struct TMatrix {
  Eigen::MatrixXd entries;
  Eigen::VectorXd affine;  // mu * [c; -b]
  double mu = 0.0;
  std::size_t num_agents = 0;
};

// Throws Error{kNotQuadratic} unless every utility is quadratic.
TMatrix BuildTMatrix(const ValidatedProblem& problem, double mu);

struct Contraction {
  double constant = 0.0;
  // True when `constant` is ||T||_2; false when it is the spectral radius and
  // the map only contracts in some adapted (non-Euclidean) norm.
  bool euclidean = true;
};

double SpectralRadius(const Eigen::MatrixXd& t);

// Throws Error{kNotContractive} if the spectral radius is >= 1.
Contraction ContractionConstant(const Eigen::MatrixXd& t);
inline Contraction ContractionConstant(const TMatrix& t) {
  return ContractionConstant(t.entries);
}

struct ErrorVector {
  Eigen::VectorXd eps;
  std::size_t num_agents = 0;

  auto eps_x() const { return eps.head(static_cast<Eigen::Index>(num_agents)); }
  auto eps_lambda() const {
    return eps.tail(eps.size() - static_cast<Eigen::Index>(num_agents));
  }
  double squared_norm() const { return eps.squaredNorm(); }
  double squared_norm_x() const { return eps_x().squaredNorm(); }
  double squared_norm_lambda() const { return eps_lambda().squaredNorm(); }
};

ErrorVector ComputeErrorVector(const PdState& state, const Optimum& optimum);

}  // namespace qnum
