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

// Network utility maximization instances: maximize sum_i U_i(x_i) subject to
// A x = b, with M agents (primal variables) and N network nodes (one dual
// variable per equality constraint).

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace qnum {

// U(x) = -(a/2) x^2 + c x + f with a > 0.
struct QuadraticUtility {
  double a = 1.0;
  double c = 0.0;
  double f = 0.0;
};

// A strongly concave utility known only through its derivatives. The
// curvature bounds are declared by the caller and spot-checked on a grid
// over [domain_lo, domain_hi] during validation.
struct ConcaveUtility {
  std::function<double(double)> first_derivative;
  std::function<double(double)> second_derivative;
  double u_min = 0.0;
  double u_max = 0.0;
  double domain_lo = -10.0;
  double domain_hi = 10.0;
  int grid_points = 512;
};

using Utility = std::variant<QuadraticUtility, ConcaveUtility>;

double Derivative(const Utility& u, double x);
double SecondDerivative(const Utility& u, double x);

struct NumProblem {
  std::vector<Utility> utilities;
  Eigen::MatrixXd a_matrix;  // N x M
  Eigen::VectorXd b;         // N

  std::size_t num_agents() const { return utilities.size(); }
  std::size_t num_constraints() const {
    return static_cast<std::size_t>(a_matrix.rows());
  }
};

struct CurvatureRange {
  double u_min = 0.0;
  double u_max = 0.0;
};

// A NumProblem that passed Validate(). Holds row-major copies of A and A^T
// for the step kernels.
class ValidatedProblem {
 public:
  const NumProblem& problem() const { return problem_; }
  std::size_t num_agents() const { return problem_.num_agents(); }
  std::size_t num_constraints() const { return problem_.num_constraints(); }
  std::size_t dim() const { return num_agents() + num_constraints(); }

  const Utility& utility(std::size_t i) const { return problem_.utilities[i]; }
  const std::vector<CurvatureRange>& curvature() const { return curvature_; }
  // min_i 1/|u_min_i|: the largest admissible step size.
  double step_cap() const { return step_cap_; }
  bool all_quadratic() const { return all_quadratic_; }

  std::span<const double> a_rows() const { return a_rows_; }
  std::span<const double> at_rows() const { return at_rows_; }
  std::span<const double> b() const { return b_; }

 private:
  friend ValidatedProblem Validate(NumProblem problem);

  NumProblem problem_;
  std::vector<CurvatureRange> curvature_;
  double step_cap_ = 0.0;
  bool all_quadratic_ = true;
  std::vector<double> a_rows_;
  std::vector<double> at_rows_;
  std::vector<double> b_;
};

// Throws Error{kDimension} unless 1 <= N < M with consistent shapes,
// Error{kRank} unless A has full row rank, and Error{kCurvature} for a
// non-positive quadratic curvature or a concave utility whose sampled second
// derivative leaves [u_min, u_max] (or u_max >= 0).
ValidatedProblem Validate(NumProblem problem);

struct Optimum {
  Eigen::VectorXd x_star;
  Eigen::VectorXd lambda_star;
};

struct KktResiduals {
  double stationarity = 0.0;  // max_i |U_i'(x_i) - (A^T lambda)_i|
  double feasibility = 0.0;   // ||A x - b||_inf
};

inline constexpr double kQuadraticTolerance = 1e-10;
inline constexpr double kNewtonTolerance = 1e-8;
inline constexpr int kNewtonMaxIterations = 200;
inline constexpr int kNewtonMaxHalvings = 20;

// Quadratic instances go through a direct solve of the KKT system
// [diag(a) A^T; A 0][x; lambda] = [c; b]; anything else through damped Newton.
Optimum SolveOptimum(const ValidatedProblem& problem,
                     std::optional<double> tol = std::nullopt);

// Damped Newton on the KKT residual, regardless of utility kind.
Optimum SolveOptimumNewton(const ValidatedProblem& problem,
                           double tol = kNewtonTolerance);

KktResiduals ComputeKktResiduals(const ValidatedProblem& problem,
                                 const Optimum& optimum);

// The same instance expressed in displacement coordinates (x - x*,
// lambda - lambda*): the optimum moves to the origin, b becomes zero and
// quadratic utilities lose their linear term. Iterating the PD map here gives
// the error trajectory directly, with relative precision that follows the
// error magnitude instead of the magnitude of x*.
ValidatedProblem CenterAtOptimum(const ValidatedProblem& problem,
                                 const Optimum& optimum);

// Wraps a quadratic utility as a ConcaveUtility with exact derivatives.
ConcaveUtility AsConcave(const QuadraticUtility& q, double domain_lo = -10.0,
                         double domain_hi = 10.0);

}  // namespace qnum
