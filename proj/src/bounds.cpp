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

#include "qnum/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qnum/error.hpp"
#include "qnum/format.hpp"

namespace qnum {
namespace {

double SafeLog1p(double term, const char* what) {
  if (!(term > 0.0)) {
    throw Error(ErrorKind::kDomain,
                std::string(what) + ": 1 + mu * curvature = " +
                    std::to_string(term) + " must be positive");
  }
  return std::log(term);
}

// ln(e^(1 - 1/d) / (2 pi e)) = -1/d - ln(2 pi).
double EntropyPowerConstant(std::size_t d) {
  return -1.0 / static_cast<double>(d) - std::log(2.0 * std::numbers::pi);
}

std::string Num(double v) { return FormatReal(v); }

void Line(std::ostringstream& out, const std::string& key, double nats) {
  out << key << " = " << Num(nats) << "\n";
  out << key << "_log2 = " << Num(NatsToBits(nats)) << "\n";
}

}  // namespace

double EntropyUniformBox(std::size_t dims, int levels, double alpha) {
  if (dims < 1 || levels < 1 || !(alpha > 0.0)) {
    throw Error(ErrorKind::kParam, "uniform box needs dims, L >= 1 and alpha > 0");
  }
  return static_cast<double>(dims) * std::log(2.0 * levels * alpha);
}

InitialDistribution InitialDistribution::UniformBox(int levels, double alpha) {
  if (levels < 1 || !(alpha > 0.0)) {
    throw Error(ErrorKind::kParam, "uniform box needs L >= 1 and alpha > 0");
  }
  InitialDistribution d;
  d.kind = Kind::kUniformBox;
  d.levels = levels;
  d.alpha = alpha;
  return d;
}

InitialDistribution InitialDistribution::Custom(double h_x0, double h_lambda0) {
  if (!std::isfinite(h_x0) || !std::isfinite(h_lambda0)) {
    throw Error(ErrorKind::kParam, "initial entropies must be finite");
  }
  InitialDistribution d;
  d.kind = Kind::kCustom;
  d.h_x0 = h_x0;
  d.h_lambda0 = h_lambda0;
  return d;
}

double InitialDistribution::EntropyX(std::size_t num_agents) const {
  return kind == Kind::kCustom ? h_x0
                               : EntropyUniformBox(num_agents, levels, alpha);
}

double InitialDistribution::EntropyLambda(std::size_t num_constraints) const {
  return kind == Kind::kCustom
             ? h_lambda0
             : EntropyUniformBox(num_constraints, levels, alpha);
}

double CurvatureLogSum(const ValidatedProblem& problem, const Optimum& opt,
                       double mu) {
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    const double curv = SecondDerivative(
        problem.utility(i), opt.x_star(static_cast<Eigen::Index>(i)));
    sum += SafeLog1p(1.0 + mu * curv, "curvature at the optimum");
  }
  return sum;
}

double DdeBoundPd(const ValidatedProblem& problem, const Optimum& opt,
                  double mu_star, double r_q) {
  if (!(r_q >= 0.0)) throw Error(ErrorKind::kParam, "R_Q must be >= 0");
  const double d = static_cast<double>(problem.dim());
  return 2.0 / d * (CurvatureLogSum(problem, opt, mu_star) - r_q);
}

double DdeBoundPrimal(const ValidatedProblem& problem, const Optimum& opt,
                      double mu_star, double r_lambda) {
  if (!(r_lambda >= 0.0)) throw Error(ErrorKind::kParam, "R_lambda must be >= 0");
  const double m = static_cast<double>(problem.num_agents());
  return 2.0 / m * (CurvatureLogSum(problem, opt, mu_star) - r_lambda);
}

double DdeBoundDual(std::size_t num_constraints, double r_x) {
  if (num_constraints == 0) throw Error(ErrorKind::kDimension, "N must be >= 1");
  if (!(r_x >= 0.0)) throw Error(ErrorKind::kParam, "R_x must be >= 0");
  return -2.0 / static_cast<double>(num_constraints) * r_x;
}

double DdeBoundZoominLog(const Eigen::MatrixXd& t, double log_beta) {
  double log_diag = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double v = std::fabs(t(i, i));
    if (!(v > 0.0)) throw Error(ErrorKind::kDomain, "T has a zero diagonal entry");
    log_diag += std::log(v);
  }
  return -2.0 / static_cast<double>(t.rows()) * (log_beta - log_diag);
}

double DdeBoundZoomin(const Eigen::MatrixXd& t, double beta) {
  if (!(beta >= 1.0)) throw Error(ErrorKind::kParam, "beta_T must be >= 1");
  return DdeBoundZoominLog(t, std::log(beta));
}

double DdeBoundCombinedLog(const TMatrix& t, double log_beta, double r_q) {
  if (!(r_q >= 0.0)) throw Error(ErrorKind::kParam, "R_Q must be >= 0");
  double curvature = 0.0;
  for (std::size_t i = 0; i < t.num_agents; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    curvature += SafeLog1p(t.entries(ii, ii), "diagonal of T");
  }
  const double d = static_cast<double>(t.entries.rows());
  return 2.0 / d * (curvature - std::min(log_beta, r_q));
}

double DdeBoundCombined(const TMatrix& t, double beta, double r_q) {
  if (!(beta >= 1.0)) throw Error(ErrorKind::kParam, "beta_T must be >= 1");
  return DdeBoundCombinedLog(t, std::log(beta), r_q);
}

namespace {

struct FlavorTerms {
  std::size_t d = 0;
  double entropy = 0.0;
  bool curvature = true;
  bool charge_primal = false;
  bool charge_dual = false;
};

FlavorTerms Terms(MsdFlavor flavor, const ValidatedProblem& p,
                  const InitialDistribution& init) {
  const std::size_t m = p.num_agents();
  const std::size_t n = p.num_constraints();
  switch (flavor) {
    case MsdFlavor::kPd:
      return {m + n, init.EntropyY(m, n), true, true, true};
    case MsdFlavor::kPrimal:
      return {m, init.EntropyX(m), true, false, true};
    case MsdFlavor::kDual:
      return {n, init.EntropyLambda(n), false, true, false};
  }
  return {};
}

double StepCurvature(const ValidatedProblem& p, double mu) {
  double sum = 0.0;
  for (const auto& c : p.curvature()) {
    sum += SafeLog1p(1.0 + mu * c.u_min, "curvature floor");
  }
  return sum;
}

}  // namespace

MsdBoundCurve ComputeMsdBoundCurve(MsdFlavor flavor, std::int64_t horizon,
                                   const ValidatedProblem& problem,
                                   const StepSchedule& schedule,
                                   const InitialDistribution& init,
                                   const RateLedger& ledger,
                                   bool count_offset_bits) {
  if (horizon < 0) throw Error(ErrorKind::kParam, "horizon must be >= 0");
  if (horizon > ledger.steps()) {
    throw Error(ErrorKind::kParam, "ledger covers only " +
                                       std::to_string(ledger.steps()) +
                                       " steps, need " + std::to_string(horizon));
  }
  const FlavorTerms terms = Terms(flavor, problem, init);
  const double scale = 2.0 / static_cast<double>(terms.d);
  const double constant = EntropyPowerConstant(terms.d);

  MsdBoundCurve curve;
  curve.flavor = flavor;
  curve.values.reserve(static_cast<std::size_t>(horizon) + 1);
  double curvature = 0.0;
  double bits = 0.0;
  const double step_curv =
      schedule.is_constant() && terms.curvature
          ? StepCurvature(problem, schedule.mu_star())
          : 0.0;
  for (std::int64_t k = 0; k <= horizon; ++k) {
    curve.values.push_back(constant +
                           scale * (curvature + terms.entropy - BitsToNats(bits)));
    if (k == horizon) break;
    if (terms.curvature) {
      curvature += schedule.is_constant() ? step_curv
                                          : StepCurvature(problem, schedule.at(k));
    }
    if (terms.charge_primal) bits += ledger.StepBits(Side::kPrimal, k, count_offset_bits);
    if (terms.charge_dual) bits += ledger.StepBits(Side::kDual, k, count_offset_bits);
  }
  return curve;
}

double MsdBound(MsdFlavor flavor, std::int64_t k, const ValidatedProblem& problem,
                const StepSchedule& schedule, const InitialDistribution& init,
                const RateLedger& ledger, bool count_offset_bits) {
  return ComputeMsdBoundCurve(flavor, k, problem, schedule, init, ledger,
                              count_offset_bits)
      .values.back();
}

std::string BoundReport::ToText() const {
  std::ostringstream out;
  Line(out, "r_x", r_x);
  Line(out, "r_lambda", r_lambda);
  Line(out, "r_q", r_q);
  Line(out, "dde_pd", dde_pd);
  Line(out, "dde_primal", dde_primal);
  Line(out, "dde_dual", dde_dual);
  if (dde_zoomin) Line(out, "dde_zoomin", *dde_zoomin);
  if (dde_zoomin_exact) Line(out, "dde_zoomin_exact", *dde_zoomin_exact);
  if (dde_combined) Line(out, "dde_combined", *dde_combined);
  if (beta_exact) out << "beta_exact = " << *beta_exact << "\n";
  if (beta_upper) out << "beta_upper = " << *beta_upper << "\n";
  if (log_beta_upper) out << "log_beta_upper = " << Num(*log_beta_upper) << "\n";
  return out.str();
}

std::string BoundReport::CsvHeader() {
  return "r_x,r_lambda,r_q,dde_pd,dde_primal,dde_dual,dde_zoomin,"
         "dde_zoomin_exact,dde_combined,beta_exact,beta_upper,log_beta_upper";
}

std::string BoundReport::ToCsvRow() const {
  auto opt = [](const std::optional<double>& v) {
    return v ? Num(*v) : std::string();
  };
  auto opt_int = [](const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  std::ostringstream out;
  out << Num(r_x) << ',' << Num(r_lambda) << ',' << Num(r_q) << ','
      << Num(dde_pd) << ',' << Num(dde_primal) << ',' << Num(dde_dual) << ','
      << opt(dde_zoomin) << ',' << opt(dde_zoomin_exact) << ','
      << opt(dde_combined) << ',' << opt_int(beta_exact) << ','
      << opt_int(beta_upper) << ',' << opt(log_beta_upper);
  return out.str();
}

BoundReport ComputeBoundReport(const ValidatedProblem& problem,
                               const Optimum& opt, const BoundInputs& in) {
  BoundReport r;
  r.r_x = in.r_x;
  r.r_lambda = in.r_lambda;
  r.r_q = in.r_x + in.r_lambda;
  r.dde_pd = DdeBoundPd(problem, opt, in.mu_star, r.r_q);
  r.dde_primal = DdeBoundPrimal(problem, opt, in.mu_star, in.r_lambda);
  r.dde_dual = DdeBoundDual(problem.num_constraints(), in.r_x);

  if (!problem.all_quadratic()) return r;
  const TMatrix t = BuildTMatrix(problem, in.mu_star);
  if (!(SpectralRadius(t.entries) < 1.0)) return r;
  if (!Eigen::FullPivLU<Eigen::MatrixXd>(t.entries).isInvertible()) return r;

  const BoxB box = BuildBox(t, in.rho);
  const LatticeCountResult count = CountExact(t.entries, box, in.lattice_budget, in.rho);
  r.log_beta_upper = count.log_upper;
  if (count.upper != std::numeric_limits<std::uint64_t>::max()) {
    r.beta_upper = count.upper;
  }
  r.dde_zoomin = DdeBoundZoominLog(t.entries, count.log_upper);
  if (count.exact) {
    r.beta_exact = *count.exact;
    r.dde_zoomin_exact =
        DdeBoundZoominLog(t.entries, std::log(static_cast<double>(*count.exact)));
  }
  const double log_beta = count.exact
                              ? std::log(static_cast<double>(*count.exact))
                              : count.log_upper;
  r.dde_combined = DdeBoundCombinedLog(t, log_beta, r.r_q);
  return r;
}

}  // namespace qnum
