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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances and sizes are fixed here on purpose.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qnum/bounds.hpp"
#include "qnum/error.hpp"
#include "qnum/instance.hpp"
#include "qnum/lattice.hpp"
#include "qnum/pd.hpp"
#include "qnum/problem.hpp"
#include "qnum/sim.hpp"
#include "../test_util.hpp"

namespace {

using namespace qnum;
using qnum::testing::Gen;

struct Outcome {
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

constexpr double kUlp = std::numeric_limits<double>::epsilon();
constexpr double kCodecLimit = 1.0 + 4 * kUlp;

// Worst |v - decode| / delta_k seen by any run that feeds criterion 4.
double g_codec_ratio = 0.0;
std::int64_t g_codec_runs = 0;

void NoteCodec(double ratio) {
  g_codec_ratio = std::max(g_codec_ratio, ratio);
  ++g_codec_runs;
}

Outcome Timed(const std::function<Outcome()>& fn, double limit_seconds) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && o.seconds >= limit_seconds) {
    o.pass = false;
    o.detail += "; over the time limit";
  }
  return o;
}

std::string Fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Outcome KktCorrectness() {
  Gen g(101);
  double worst_res = 0.0;
  double worst_newton = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto m = static_cast<std::size_t>(g.Int(2, 10));
    const auto n = static_cast<std::size_t>(g.Int(1, static_cast<int>(m) - 1));
    NumProblem raw = qnum::testing::RandomQuadratic(g, m, n);
    const ValidatedProblem p = Validate(raw);
    const Optimum o = SolveOptimum(p);
    const KktResiduals r = ComputeKktResiduals(p, o);
    worst_res = std::max({worst_res, r.stationarity, r.feasibility});
    for (auto& u : raw.utilities) u = AsConcave(std::get<QuadraticUtility>(u));
    const Optimum w = SolveOptimum(Validate(raw));
    worst_newton = std::max({worst_newton, (w.x_star - o.x_star).lpNorm<Eigen::Infinity>(),
                             (w.lambda_star - o.lambda_star).lpNorm<Eigen::Infinity>()});
  }
  return {worst_res <= 1e-8 && worst_newton <= 1e-8,
          "max residual " + Fmt(worst_res) + ", newton gap " + Fmt(worst_newton)};
}

Outcome DynamicsEquivalence() {
  Gen g(102);
  double worst_map = 0.0;
  double worst_fixed = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const auto m = static_cast<std::size_t>(g.Int(2, 10));
    const auto n = static_cast<std::size_t>(g.Int(1, static_cast<int>(m) - 1));
    const ValidatedProblem p = Validate(qnum::testing::RandomQuadratic(g, m, n));
    const double mu = g.Uniform(0.05, 0.45);
    const auto sched = StepSchedule::Constant(mu);
    const TMatrix t = BuildTMatrix(p, mu);
    const auto mm = static_cast<Eigen::Index>(m);
    const auto nn = static_cast<Eigen::Index>(n);
    for (int s = 0; s < 100; ++s) {
      PdState st;
      st.x = Eigen::VectorXd::NullaryExpr(mm, [&] { return g.Uniform(-5, 5); });
      st.lambda = Eigen::VectorXd::NullaryExpr(nn, [&] { return g.Uniform(-5, 5); });
      Eigen::VectorXd y(mm + nn);
      y << st.x, st.lambda;
      const Eigen::VectorXd mapped = t.entries * y + t.affine;
      const PdState next = UnquantizedStep(st, p, sched);
      Eigen::VectorXd got(mm + nn);
      got << next.x, next.lambda;
      worst_map = std::max(worst_map, (got - mapped).lpNorm<Eigen::Infinity>());
    }
    const Optimum o = SolveOptimum(p);
    const PdState fixed = UnquantizedStep(PdState{o.x_star, o.lambda_star, 0}, p, sched);
    worst_fixed = std::max({worst_fixed, (fixed.x - o.x_star).lpNorm<Eigen::Infinity>(),
                            (fixed.lambda - o.lambda_star).lpNorm<Eigen::Infinity>()});
  }
  return {worst_map <= 1e-12 && worst_fixed <= 1e-12,
          "max map gap " + Fmt(worst_map) + ", fixed-point drift " + Fmt(worst_fixed)};
}

Outcome QaConvergence() {
  InstanceSpec spec;
  spec.a_lo = 0.5;
  spec.a_hi = 2.0;
  spec.row_norm_lo = 0.5;
  spec.row_norm_hi = 2.0;
  spec.c_range = 3.0;
  spec.b_range = 2.0;
  spec.mu = 0.4;
  spec.rho_max = 0.98;
  constexpr std::int64_t kSteps = 2000;
  double worst_final = 0.0;
  double worst_slope = -std::numeric_limits<double>::infinity();
  std::int64_t violations = 0;
  std::int64_t other_errors = 0;
  for (int inst = 0; inst < 20; ++inst) {
    spec.num_agents = static_cast<std::size_t>(3 + inst % 8);
    spec.num_constraints = static_cast<std::size_t>(1 + inst % (spec.num_agents - 1));
    ExperimentConfig cfg;
    cfg.problem = GenerateInstance(spec, 1000 + static_cast<std::uint64_t>(inst)).problem;
    cfg.scheme = SchemeConfig::Qa(0.0, 5);  // alpha = contraction constant
    cfg.schedule = StepSchedule::Constant(spec.mu);
    cfg.steps = kSteps;
    cfg.seed = 7 + static_cast<std::uint64_t>(inst);
    const Experiment ex(cfg);
    for (std::int64_t seed = 0; seed < 100; ++seed) {
      TrialResult r;
      try {
        r = ex.RunTrial(seed);
      } catch (const IntervalViolation&) {
        ++violations;
        continue;
      } catch (const Error&) {
        ++other_errors;
        continue;
      }
      NoteCodec(r.max_codec_ratio);
      worst_final = std::max(worst_final, std::sqrt(r.sq_pd.back()));
      // Least-squares slope of ln ||eps_k|| over the whole run.
      double sk = 0, sy = 0, skk = 0, sky = 0;
      const double cnt = static_cast<double>(kSteps + 1);
      for (std::int64_t k = 0; k <= kSteps; ++k) {
        const double y = 0.5 * std::log(r.sq_pd[static_cast<std::size_t>(k)]);
        const double kd = static_cast<double>(k);
        sk += kd;
        sy += y;
        skk += kd * kd;
        sky += kd * y;
      }
      worst_slope = std::max(worst_slope, (cnt * sky - sk * sy) / (cnt * skk - sk * sk));
    }
  }
  const bool pass =
      violations == 0 && other_errors == 0 && worst_final <= 1e-6 && worst_slope < 0.0;
  return {pass, "max ||eps_K|| " + Fmt(worst_final) + ", interval violations " +
                    std::to_string(violations) + ", other errors " +
                    std::to_string(other_errors) + ", max slope " + Fmt(worst_slope)};
}

Outcome LatticeOracle() {
  const Eigen::MatrixXd ex{{0.9, -0.1}, {0.1, 1.0}};
  const LatticeCountResult worked = CountExact(ex, BuildBox(ex));
  bool pass = worked.exact && *worked.exact == 43 && worked.upper == 56;
  Gen g(105);
  int mismatches = 0;
  int ordering = 0;
  for (int d : {2, 3}) {
    const int cases = d == 2 ? 500 : 100;
    for (int i = 0; i < cases; ++i) {
      Eigen::MatrixXd t(d, d);
      for (;;) {
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < d; ++c) t(r, c) = g.Uniform(-1, 1);
        }
        const double rho = t.eigenvalues().cwiseAbs().maxCoeff();
        if (rho < 1e-3) continue;
        t *= g.Uniform(0.3, 0.99) / rho;
        if (std::fabs(t.determinant()) > 1e-3) break;
      }
      const BoxB box = BuildBox(t);
      const LatticeCountResult r = CountExact(t, box);
      qnum::testing::Dense dense(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d)));
      for (int r2 = 0; r2 < d; ++r2) {
        for (int c = 0; c < d; ++c) dense[static_cast<std::size_t>(r2)][static_cast<std::size_t>(c)] = t(r2, c);
      }
      const std::uint64_t oracle = qnum::testing::OracleLatticeCount(
          dense, std::vector<double>(box.sides.data(), box.sides.data() + d));
      if (!r.exact || *r.exact != oracle) ++mismatches;
      if (!r.exact || *r.exact < 1 || *r.exact > r.upper) ++ordering;
    }
  }
  pass = pass && mismatches == 0 && ordering == 0;
  return {pass, "worked example " + (worked.exact ? std::to_string(*worked.exact) : "-") +
                    "/" + std::to_string(worked.upper) + ", oracle mismatches " +
                    std::to_string(mismatches) + ", ordering failures " +
                    std::to_string(ordering)};
}

struct Fig3 {
  bool ran = false;
  std::string error;
  MonteCarloResult result;
  double seconds = 0.0;
};

Fig3 RunFig3() {
  Fig3 f;
  const auto start = std::chrono::steady_clock::now();
  try {
    f.result = MonteCarlo(ScenarioConfig("paper-fig3", 1));
    f.ran = true;
    NoteCodec(f.result.max_codec_ratio);
  } catch (const std::exception& e) {
    f.error = e.what();
  }
  f.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return f;
}

Outcome CorollaryCheck(const Fig3& f) {
  if (!f.ran) return {false, "fig3 run failed: " + f.error};
  std::int64_t curve_violations = 0;
  for (const auto& v : f.result.report.violations) {
    if (v.k >= 0) ++curve_violations;
  }
  Outcome o{curve_violations == 0 && f.seconds < 600,
            std::to_string(f.result.curves.trials) + " trials, " +
                std::to_string(curve_violations) + " curve violations over " +
                std::to_string(3 * f.result.curves.msd_pd.size()) + " points"};
  o.seconds = f.seconds;
  return o;
}

Outcome DdeCheck(const Fig3& f) {
  if (!f.ran) return {false, "fig3 run failed: " + f.error};
  const auto& b = f.result.bounds;
  const double emp = f.result.dde_empirical_pd;
  const bool has_zoom = b.dde_zoomin.has_value();
  const bool pass = has_zoom && emp >= b.dde_pd && emp >= *b.dde_zoomin;
  return {pass, "empirical " + Fmt(emp) + " vs rate bound " + Fmt(b.dde_pd) + ", zoom-in bound (upper) " +
                    (has_zoom ? Fmt(*b.dde_zoomin) : std::string("n/a"))};
}

Outcome RateCheck(const Fig3& f) {
  if (!f.ran) return {false, "fig3 run failed: " + f.error};
  const double bits = f.result.rates.r_q_bits();
  return {std::fabs(bits - 45.0) <= 0.1, "R_Q = " + Fmt(bits) + " bits/step at K = " +
                                             std::to_string(f.result.rates.horizon)};
}

Outcome CodecCheck() {
  return {g_codec_runs > 0 && g_codec_ratio <= kCodecLimit,
          "max |v - decode| / delta_k = " + Fmt(g_codec_ratio) + " over " +
              std::to_string(g_codec_runs) + " runs"};
}

Outcome CombinedBranch() {
  const NumProblem problem = qnum::testing::TwoAgent();
  const ValidatedProblem p = Validate(problem);
  const Optimum opt = SolveOptimum(p);
  struct Branch {
    double r_q = 0.0;
    BoundReport report;
  };
  auto run = [&](int subdivision) {
    ExperimentConfig cfg;
    cfg.problem = problem;
    cfg.scheme = SchemeConfig::Qa(0.97, 5, subdivision);
    cfg.schedule = StepSchedule::Constant(0.4);
    cfg.steps = 1000;
    cfg.trials = 200;
    const MonteCarloResult mc = MonteCarlo(cfg);
    NoteCodec(mc.max_codec_ratio);
    if (!mc.report.ok()) throw Error(ErrorKind::kParam, "violations:\n" + mc.report.ToText());
    return Branch{mc.rates.r_q, mc.bounds};
  };
  const Branch one = run(1);
  const Branch two = run(2);
  if (!one.report.beta_exact || !two.report.beta_exact || !one.report.dde_zoomin_exact ||
      !two.report.dde_zoomin_exact || !one.report.dde_combined || !two.report.dde_combined) {
    return {false, "missing lattice terms"};
  }
  const double log_beta = std::log(static_cast<double>(*one.report.beta_exact));
  const double added = two.r_q - one.r_q;
  const bool zoom_same = *one.report.dde_zoomin_exact == *two.report.dde_zoomin_exact &&
                         *one.report.dde_zoomin == *two.report.dde_zoomin;
  const bool added_ok = std::fabs(added - 3 * std::log(2.0)) <= 1e-12;
  const bool before = one.r_q < log_beta &&
                      std::fabs(*one.report.dde_combined - one.report.dde_pd) <= 1e-14;
  const bool after = two.r_q > log_beta &&
                     std::fabs(*two.report.dde_combined - *two.report.dde_zoomin_exact) <= 1e-14 &&
                     *two.report.dde_combined > two.report.dde_pd;
  return {zoom_same && added_ok && before && after,
          "ln beta_T = " + Fmt(log_beta) + ", R_Q " + Fmt(one.r_q) + " -> " + Fmt(two.r_q) +
              " nats, zoom-in term " + Fmt(*one.report.dde_zoomin_exact) + " unchanged: " +
              (zoom_same ? "yes" : "no") + ", branch " + (before ? "rate" : "?") + " -> " +
              (after ? "lattice" : "?")};
}

}  // namespace

int main() {
  std::vector<Outcome> out(10);
  out[1] = Timed(KktCorrectness, 5.0);
  out[2] = Timed(DynamicsEquivalence, 0.0);
  out[3] = Timed(QaConvergence, 60.0);
  out[5] = Timed(LatticeOracle, 30.0);
  const Fig3 fig3 = RunFig3();
  out[6] = CorollaryCheck(fig3);
  out[7] = DdeCheck(fig3);
  out[8] = RateCheck(fig3);
  out[9] = Timed(CombinedBranch, 0.0);
  out[4] = CodecCheck();

  const char* names[10] = {"",
                           "KKT correctness",
                           "dynamics equivalence",
                           "zoom-in convergence",
                           "codec error bound",
                           "lattice oracle",
                           "MSD bound non-violation (fig3)",
                           "DDE bound non-violation (fig3)",
                           "rate accounting (fig3)",
                           "combined-bound branch flip"};
  int failed = 0;
  for (int c = 1; c <= 9; ++c) {
    const Outcome& o = out[static_cast<std::size_t>(c)];
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s - %s (%.2f s)\n", c, names[c], o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), o.seconds);
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
