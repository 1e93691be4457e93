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

// Lower bounds on convergence speed and on the mean square distance (MSD) to
// the optimum of a quantized PD iteration. Everything is in natural-log
// units (nats); bit quantities are converted with ln 2 at the boundary.
//
// DDE ("distance decay exponent") bounds limit liminf (1/k) ln E||eps_k||^2:
//   pd       (2/(N+M)) (sum_i ln(1 + mu* U_i''(x*_i)) - R_Q)
//   primal   (2/M)     (sum_i ln(1 + mu* U_i''(x*_i)) - R_lambda)
//   dual     -(2/N) R_x
//   zoom-in  -(2/(N+M)) ln(beta_T / prod_i |T_ii|)          (quadratic only)
//   combined (2/(N+M)) (sum_i ln(1 - mu a_i) - min(ln beta_T, R_Q))
//
// The finite-time MSD bounds instead use the global curvature floor u_min
// and the bits actually spent up to step k-1:
//   ln E||eps_k||^2 >= ln(e^(1-1/d) / (2 pi e))
//                      + (2/d) (sum_i sum_{n<k} ln(1 + mu_n u_min_i) + h0 - nats)
// with (d, h0, nats) = (N+M, h[y0], all bits), (M, h[x0], dual bits) or
// (N, h[lambda0], primal bits; no curvature term).

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qnum/lattice.hpp"
#include "qnum/pd.hpp"
#include "qnum/problem.hpp"
#include "qnum/quantize.hpp"

namespace qnum {

inline constexpr double kLn2 = std::numbers::ln2;

inline double NatsToBits(double nats) { return nats / kLn2; }
inline double BitsToNats(double bits) { return bits * kLn2; }

// dims * ln(2 L alpha): entropy of a uniform law on (-L alpha, L alpha)^dims.
double EntropyUniformBox(std::size_t dims, int levels, double alpha);

struct InitialDistribution {
  enum class Kind { kUniformBox, kCustom };

  static InitialDistribution UniformBox(int levels, double alpha);
  // Differential entropies (nats) of x_0 and lambda_0, drawn independently.
  static InitialDistribution Custom(double h_x0, double h_lambda0);

  double EntropyX(std::size_t num_agents) const;
  double EntropyLambda(std::size_t num_constraints) const;
  double EntropyY(std::size_t num_agents, std::size_t num_constraints) const {
    return EntropyX(num_agents) + EntropyLambda(num_constraints);
  }

  Kind kind = Kind::kUniformBox;
  int levels = 1;
  double alpha = 0.5;
  double h_x0 = 0.0;
  double h_lambda0 = 0.0;
};

// sum_i ln(1 + mu U_i''(x*_i)). Throws Error{kDomain} if a term is <= 0.
double CurvatureLogSum(const ValidatedProblem& problem, const Optimum& opt,
                       double mu);

double DdeBoundPd(const ValidatedProblem& problem, const Optimum& opt,
                  double mu_star, double r_q);
double DdeBoundPrimal(const ValidatedProblem& problem, const Optimum& opt,
                      double mu_star, double r_lambda);
double DdeBoundDual(std::size_t num_constraints, double r_x);

// Throws Error{kDomain} if some T_ii is zero.
double DdeBoundZoominLog(const Eigen::MatrixXd& t, double log_beta);
double DdeBoundZoomin(const Eigen::MatrixXd& t, double beta);
inline double DdeBoundZoomin(const TMatrix& t, double beta) {
  return DdeBoundZoomin(t.entries, beta);
}

double DdeBoundCombinedLog(const TMatrix& t, double log_beta, double r_q);
double DdeBoundCombined(const TMatrix& t, double beta, double r_q);

enum class MsdFlavor { kPd, kPrimal, kDual };

struct MsdBoundCurve {
  MsdFlavor flavor = MsdFlavor::kPd;
  std::vector<double> values;  // values[k], k = 0..K
};

// Bound on ln E||eps_k||^2 for one k. The ledger must cover steps 0..k-1.
double MsdBound(MsdFlavor flavor, std::int64_t k, const ValidatedProblem& problem,
                const StepSchedule& schedule, const InitialDistribution& init,
                const RateLedger& ledger, bool count_offset_bits = false);

inline double MsdBoundPd(std::int64_t k, const ValidatedProblem& problem,
                         const StepSchedule& schedule,
                         const InitialDistribution& init, const RateLedger& ledger) {
  return MsdBound(MsdFlavor::kPd, k, problem, schedule, init, ledger);
}
inline double MsdBoundPrimal(std::int64_t k, const ValidatedProblem& problem,
                             const StepSchedule& schedule,
                             const InitialDistribution& init,
                             const RateLedger& ledger) {
  return MsdBound(MsdFlavor::kPrimal, k, problem, schedule, init, ledger);
}
inline double MsdBoundDual(std::int64_t k, const ValidatedProblem& problem,
                           const StepSchedule& schedule,
                           const InitialDistribution& init,
                           const RateLedger& ledger) {
  return MsdBound(MsdFlavor::kDual, k, problem, schedule, init, ledger);
}

// The same bound for k = 0..horizon in one pass.
MsdBoundCurve ComputeMsdBoundCurve(MsdFlavor flavor, std::int64_t horizon,
                                   const ValidatedProblem& problem,
                                   const StepSchedule& schedule,
                                   const InitialDistribution& init,
                                   const RateLedger& ledger,
                                   bool count_offset_bits = false);

struct BoundReport {
  double r_x = 0.0;
  double r_lambda = 0.0;
  double r_q = 0.0;
  double dde_pd = 0.0;
  double dde_primal = 0.0;
  double dde_dual = 0.0;
  // Zoom-in bound with the hypercube upper bound on beta_T.
  std::optional<double> dde_zoomin;
  // Same bound with the exact count, when enumeration fit the budget.
  std::optional<double> dde_zoomin_exact;
  std::optional<double> dde_combined;
  std::optional<std::uint64_t> beta_exact;
  std::optional<std::uint64_t> beta_upper;
  std::optional<double> log_beta_upper;

  // `key = value` lines, each bound in nats and mirrored as `<key>_log2`.
  std::string ToText() const;
  static std::string CsvHeader();
  std::string ToCsvRow() const;
};

struct BoundInputs {
  double mu_star = 0.0;
  double r_x = 0.0;       // nats per step
  double r_lambda = 0.0;  // nats per step
  double rho = 1.0;
  std::uint64_t lattice_budget = 10'000'000;
};

// Fills every applicable field; zoom-in terms need quadratic utilities and a
// contractive, invertible T.
BoundReport ComputeBoundReport(const ValidatedProblem& problem,
                               const Optimum& opt, const BoundInputs& in);

}  // namespace qnum
