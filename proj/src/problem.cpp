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

#include "qnum/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qnum/error.hpp"

namespace qnum {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double InfNorm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

CurvatureRange CheckUtility(const Utility& u, std::size_t index) {
  const std::string who = "utility " + std::to_string(index + 1);
  return std::visit(
      Overloaded{
          [&](const QuadraticUtility& q) {
            if (!std::isfinite(q.a) || !std::isfinite(q.c) ||
                !std::isfinite(q.f)) {
              throw Error(ErrorKind::kNumeric, who + " has non-finite coefficients");
            }
            if (!(q.a > 0.0)) {
              throw Error(ErrorKind::kCurvature,
                          who + ": curvature a must be positive, got " +
                              std::to_string(q.a));
            }
            return CurvatureRange{-q.a, -q.a};
          },
          [&](const ConcaveUtility& g) {
            if (!g.first_derivative || !g.second_derivative) {
              throw Error(ErrorKind::kParam, who + " is missing a derivative");
            }
            if (!std::isfinite(g.u_min) || !(g.u_min <= g.u_max) ||
                !(g.u_max < 0.0)) {
              throw Error(ErrorKind::kCurvature,
                          who + ": need u_min <= u_max < 0");
            }
            if (g.grid_points < 2 || !(g.domain_lo < g.domain_hi)) {
              throw Error(ErrorKind::kParam, who + ": bad sampling domain");
            }
            const double slack =
                1e-12 * std::max(1.0, std::fabs(g.u_min));
            for (int s = 0; s < g.grid_points; ++s) {
              const double x = g.domain_lo + (g.domain_hi - g.domain_lo) *
                                                 static_cast<double>(s) /
                                                 (g.grid_points - 1);
              const double d2 = g.second_derivative(x);
              if (!(d2 >= g.u_min - slack && d2 <= g.u_max + slack)) {
                throw Error(ErrorKind::kCurvature,
                            who + ": second derivative " + std::to_string(d2) +
                                " at x=" + std::to_string(x) +
                                " leaves the declared bounds");
              }
            }
            return CurvatureRange{g.u_min, g.u_max};
          },
      },
      u);
}

Eigen::VectorXd Gradient(const ValidatedProblem& p, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    g(i) = Derivative(p.utility(static_cast<std::size_t>(i)), x(i));
  }
  return g;
}

Eigen::VectorXd KktResidual(const ValidatedProblem& p, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& lambda) {
  const auto& a = p.problem().a_matrix;
  const auto m = x.size();
  Eigen::VectorXd r(m + lambda.size());
  r.head(m) = Gradient(p, x) - a.transpose() * lambda;
  r.tail(lambda.size()) = a * x - p.problem().b;
  return r;
}

}  // namespace

double Derivative(const Utility& u, double x) {
  return std::visit(
      Overloaded{[x](const QuadraticUtility& q) { return -q.a * x + q.c; },
                 [x](const ConcaveUtility& g) { return g.first_derivative(x); }},
      u);
}

double SecondDerivative(const Utility& u, double x) {
  return std::visit(
      Overloaded{[](const QuadraticUtility& q) { return -q.a; },
                 [x](const ConcaveUtility& g) { return g.second_derivative(x); }},
      u);
}

ValidatedProblem Validate(NumProblem problem) {
  const std::size_t m = problem.num_agents();
  const auto n = static_cast<std::size_t>(problem.a_matrix.rows());
  if (static_cast<std::size_t>(problem.a_matrix.cols()) != m) {
    throw Error(ErrorKind::kDimension,
                "A has " + std::to_string(problem.a_matrix.cols()) +
                    " columns but there are " + std::to_string(m) + " agents");
  }
  if (static_cast<std::size_t>(problem.b.size()) != n) {
    throw Error(ErrorKind::kDimension, "b must have one entry per row of A");
  }
  if (n == 0 || n >= m) {
    throw Error(ErrorKind::kDimension,
                "need 1 <= N < M, got M=" + std::to_string(m) +
                    " N=" + std::to_string(n));
  }
  if (!problem.a_matrix.allFinite() || !problem.b.allFinite()) {
    throw Error(ErrorKind::kNumeric, "A and b must be finite");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(problem.a_matrix);
  if (static_cast<std::size_t>(lu.rank()) < n) {
    throw Error(ErrorKind::kRank, "A has rank " + std::to_string(lu.rank()) +
                                      " < N=" + std::to_string(n));
  }

  ValidatedProblem v;
  v.curvature_.reserve(m);
  v.step_cap_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const CurvatureRange range = CheckUtility(problem.utilities[i], i);
    v.curvature_.push_back(range);
    v.step_cap_ = std::min(v.step_cap_, 1.0 / std::fabs(range.u_min));
    v.all_quadratic_ = v.all_quadratic_ &&
                       std::holds_alternative<QuadraticUtility>(problem.utilities[i]);
  }

  v.a_rows_.resize(n * m);
  v.at_rows_.resize(m * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      const double value = problem.a_matrix(static_cast<Eigen::Index>(r),
                                            static_cast<Eigen::Index>(c));
      v.a_rows_[r * m + c] = value;
      v.at_rows_[c * n + r] = value;
    }
  }
  v.b_.assign(problem.b.data(), problem.b.data() + n);
  v.problem_ = std::move(problem);
  return v;
}

KktResiduals ComputeKktResiduals(const ValidatedProblem& problem,
                                 const Optimum& optimum) {
  const Eigen::VectorXd r =
      KktResidual(problem, optimum.x_star, optimum.lambda_star);
  const auto m = static_cast<Eigen::Index>(problem.num_agents());
  return {InfNorm(r.head(m)), InfNorm(r.tail(r.size() - m))};
}

Optimum SolveOptimum(const ValidatedProblem& problem, std::optional<double> tol) {
  if (!problem.all_quadratic()) {
    return SolveOptimumNewton(problem, tol.value_or(kNewtonTolerance));
  }
  const double target = tol.value_or(kQuadraticTolerance);
  const auto m = static_cast<Eigen::Index>(problem.num_agents());
  const auto n = static_cast<Eigen::Index>(problem.num_constraints());
  const auto& a = problem.problem().a_matrix;

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + n, m + n);
  Eigen::VectorXd rhs(m + n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& q = std::get<QuadraticUtility>(problem.utility(static_cast<std::size_t>(i)));
    kkt(i, i) = q.a;
    rhs(i) = q.c;
  }
  kkt.topRightCorner(m, n) = a.transpose();
  kkt.bottomLeftCorner(n, m) = a;
  rhs.tail(n) = problem.problem().b;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::kSingularKkt, "KKT matrix is singular");
  }
  Eigen::VectorXd z = lu.solve(rhs);
  Optimum opt{z.head(m), z.tail(n)};
  // Iterative refinement absorbs the occasional badly scaled instance.
  for (int round = 0; round < 3; ++round) {
    const KktResiduals res = ComputeKktResiduals(problem, opt);
    if (res.stationarity <= target && res.feasibility <= target) return opt;
    const Eigen::VectorXd correction = lu.solve(rhs - kkt * z);
    z += correction;
    opt = {z.head(m), z.tail(n)};
  }
  const KktResiduals res = ComputeKktResiduals(problem, opt);
  if (res.stationarity <= target && res.feasibility <= target) return opt;
  throw Error(ErrorKind::kSingularKkt,
              "KKT system too ill-conditioned to reach tolerance");
}

Optimum SolveOptimumNewton(const ValidatedProblem& problem, double tol) {
  const auto m = static_cast<Eigen::Index>(problem.num_agents());
  const auto n = static_cast<Eigen::Index>(problem.num_constraints());
  const auto& a = problem.problem().a_matrix;
  const auto& b = problem.problem().b;

  // Least-norm feasible start; multipliers from least squares on stationarity.
  const Eigen::MatrixXd aat = a * a.transpose();
  Eigen::VectorXd x = a.transpose() * aat.ldlt().solve(b);
  Eigen::VectorXd lambda =
      a.transpose().colPivHouseholderQr().solve(Gradient(problem, x));

  Eigen::VectorXd r = KktResidual(problem, x, lambda);
  double norm = InfNorm(r);
  for (int iter = 0; iter < kNewtonMaxIterations; ++iter) {
    if (!std::isfinite(norm)) {
      throw Error(ErrorKind::kNumeric, "non-finite KKT residual in Newton");
    }
    if (norm <= tol) return {x, lambda};
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m + n, m + n);
    for (Eigen::Index i = 0; i < m; ++i) {
      jac(i, i) = SecondDerivative(problem.utility(static_cast<std::size_t>(i)), x(i));
    }
    jac.topRightCorner(m, n) = -a.transpose();
    jac.bottomLeftCorner(n, m) = a;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) {
      throw Error(ErrorKind::kSingularKkt, "singular Newton system");
    }
    const Eigen::VectorXd d = lu.solve(-r);

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kNewtonMaxHalvings; ++h, t *= 0.5) {
      const Eigen::VectorXd xt = x + t * d.head(m);
      const Eigen::VectorXd lt = lambda + t * d.tail(n);
      const Eigen::VectorXd rt = KktResidual(problem, xt, lt);
      const double nt = InfNorm(rt);
      if (nt < norm || nt <= tol) {
        x = xt;
        lambda = lt;
        r = rt;
        norm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (norm <= tol) return {x, lambda};
  throw Error(ErrorKind::kNoConvergence,
              "Newton stopped with KKT residual " + std::to_string(norm));
}

ValidatedProblem CenterAtOptimum(const ValidatedProblem& problem,
                                 const Optimum& optimum) {
  NumProblem shifted;
  shifted.a_matrix = problem.problem().a_matrix;
  shifted.b = Eigen::VectorXd::Zero(shifted.a_matrix.rows());
  shifted.utilities.reserve(problem.num_agents());
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    const double xs = optimum.x_star(static_cast<Eigen::Index>(i));
    std::visit(
        Overloaded{
            [&](const QuadraticUtility& q) {
              shifted.utilities.emplace_back(QuadraticUtility{q.a, 0.0, 0.0});
            },
            [&](const ConcaveUtility& g) {
              ConcaveUtility c = g;
              const double slope_at_opt = g.first_derivative(xs);
              c.first_derivative = [f = g.first_derivative, xs,
                                    slope_at_opt](double e) {
                return f(xs + e) - slope_at_opt;
              };
              c.second_derivative = [f = g.second_derivative, xs](double e) {
                return f(xs + e);
              };
              c.domain_lo = g.domain_lo - xs;
              c.domain_hi = g.domain_hi - xs;
              shifted.utilities.emplace_back(std::move(c));
            },
        },
        problem.utility(i));
  }
  return Validate(std::move(shifted));
}

ConcaveUtility AsConcave(const QuadraticUtility& q, double domain_lo,
                         double domain_hi) {
  ConcaveUtility g;
  g.first_derivative = [q](double x) { return -q.a * x + q.c; };
  g.second_derivative = [q](double) { return -q.a; };
  g.u_min = -q.a;
  g.u_max = -q.a;
  g.domain_lo = domain_lo;
  g.domain_hi = domain_hi;
  return g;
}

}  // namespace qnum
