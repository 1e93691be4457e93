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

// Monte Carlo harness for quantized PD runs. Trajectories are simulated in
// displacement coordinates (y - y*), so the error vector is the state itself
// and stays resolvable long after it drops below the ulp of y*. Codec streams
// are given y* as their origin, so the k = 0 grid sits where it would for
// absolute values.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnum/bounds.hpp"
#include "qnum/pd.hpp"
#include "qnum/problem.hpp"
#include "qnum/quantize.hpp"

namespace qnum {

struct SchemeConfig {
  static SchemeConfig Passthrough();
  // alpha <= 0 means "use the contraction constant of T" (quadratic only).
  static SchemeConfig Qa(double alpha, int levels, int subdivision = 1);
  static SchemeConfig StaticUniform(double range, int bits);

  CodecKind kind = CodecKind::kQa;
  QaParams qa;
  double static_range = 1.0;
  int static_bits = 3;
};

struct ExperimentConfig {
  NumProblem problem;
  SchemeConfig scheme;
  StepSchedule schedule = StepSchedule::Constant(0.01);
  std::int64_t steps = 100;  // K
  std::int64_t trials = 100;
  std::uint64_t seed = 1;
  bool count_offset_bits = false;
  bool record_traces = false;
  // Initial values are uniform on (-w, w) in every coordinate. Unset means
  // L alpha for Qa, the range for the static quantizer and 1 for passthrough.
  std::optional<double> init_half_width;
  int threads = 0;  // 0: hardware concurrency
};

struct TrialResult {
  // Squared error norms at k = 0..K.
  std::vector<double> sq_pd;
  std::vector<double> sq_primal;
  std::vector<double> sq_dual;
  RateLedger ledger;
  std::vector<SymbolTrace> primal_traces;  // only with record_traces
  std::vector<SymbolTrace> dual_traces;
  // max over Qa emissions of |v - decode| / delta_k.
  double max_codec_ratio = 0.0;
  std::int64_t max_abs_offset = 0;
};

struct MsdCurves {
  std::int64_t trials = 0;
  std::vector<double> msd_pd;
  std::vector<double> msd_primal;
  std::vector<double> msd_dual;
  std::vector<double> stderr_pd;
  std::vector<double> stderr_primal;
  std::vector<double> stderr_dual;
  // (1/k) ln msd_pd[k]; NaN at k = 0.
  std::vector<double> dde_empirical;
};

// Mean of (1/k) ln curve[k] over the last `tail_fraction` of k = 1..K.
double EmpiricalDde(const std::vector<double>& msd, double tail_fraction = 0.5);
inline double EmpiricalDde(const MsdCurves& c, double tail_fraction = 0.5) {
  return EmpiricalDde(c.msd_pd, tail_fraction);
}

struct Violation {
  std::int64_t k = -1;  // -1 for tail (DDE) checks
  std::string curve;
  std::string bound;
  double value = 0.0;
  double bound_value = 0.0;
  double slack = 0.0;
};

struct ViolationReport {
  std::vector<Violation> violations;
  std::vector<std::string> notes;
  bool wide_stderr = false;
  std::int64_t checks = 0;

  bool ok() const { return violations.empty(); }
  std::string ToText() const;
};

struct MonteCarloResult {
  Optimum optimum;
  double alpha = 0.0;  // resolved Qa alpha (0 for other schemes)
  MsdCurves curves;
  RateLedger ledger;
  RateSummary rates;
  BoundReport bounds;
  MsdBoundCurve cor1_pd;
  MsdBoundCurve cor2_primal;
  MsdBoundCurve cor2_dual;
  double dde_empirical_pd = 0.0;
  double dde_empirical_primal = 0.0;
  double dde_empirical_dual = 0.0;
  double max_codec_ratio = 0.0;
  std::int64_t max_abs_offset = 0;
  ViolationReport report;

  void WriteCsv(std::ostream& out) const;
  // BoundReport, rate summary and violation report.
  std::string SidecarText() const;
};

class Experiment {
 public:
  // Validates the problem, solves for the optimum and checks the schedule.
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const ValidatedProblem& problem() const { return problem_; }
  const ValidatedProblem& centered() const { return centered_; }
  const Optimum& optimum() const { return optimum_; }
  double alpha() const { return alpha_; }
  double init_half_width() const { return half_width_; }
  InitialDistribution initial_distribution() const;

  // Deterministic in (seed, trial_index). Throws IntervalViolation, Desync
  // or Numeric errors from the trajectory.
  TrialResult RunTrial(std::int64_t trial_index) const;

  // Throws Error{kTrialFailures} with per-kind counts if any trial fails.
  MonteCarloResult MonteCarlo() const;

 private:
  CodecStream MakeStream(double origin) const;

  ExperimentConfig config_;
  ValidatedProblem problem_;
  Optimum optimum_;
  ValidatedProblem centered_;
  double alpha_ = 0.0;
  double half_width_ = 1.0;
};

inline TrialResult RunTrial(const ExperimentConfig& cfg, std::int64_t trial_index) {
  return Experiment(cfg).RunTrial(trial_index);
}
inline MonteCarloResult MonteCarlo(const ExperimentConfig& cfg) {
  return Experiment(cfg).MonteCarlo();
}

// Built-in scenarios. "paper-fig3": M = 10, N = 5, mu = 0.019, L = 5,
// alpha = 0.9495 (3-bit Qa), 10^4 trials, K = 500 on a generated instance.
std::vector<std::string> ScenarioNames();
// Throws Error{kParam} for an unknown name.
ExperimentConfig ScenarioConfig(const std::string& name, std::uint64_t seed);

}  // namespace qnum
