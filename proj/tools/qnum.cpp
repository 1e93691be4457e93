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

// qnum: solve, bound, rate and simulate quantized primal-dual NUM runs.
//
// Exit status: 0 on success, 1 on any error, 2 when a simulation finished
// but reported bound violations.

#include <CLI11.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qnum/bounds.hpp"
#include "qnum/error.hpp"
#include "qnum/format.hpp"
#include "qnum/problem_io.hpp"
#include "qnum/sim.hpp"
#include "run_settings.hpp"

namespace fs = std::filesystem;

namespace {

using qnum::cli::RunSettings;

constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct RunFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool count_offset_bits = false;
  CLI::Option* count_offset_opt = nullptr;
  std::vector<std::string> sets;

  void Attach(CLI::App* app) {
    auto add = [&](const std::string& flag, const std::string& key,
                   const std::string& help) {
      options[key] = app->add_option(flag, values[key], help);
    };
    add("--seed", "seed", "base seed");
    add("--trials", "trials", "Monte Carlo trials");
    add("--steps", "steps", "horizon K");
    add("--scheme", "scheme", "qa, static or passthrough");
    add("--bits", "bits", "bits per symbol (static) or bit budget (qa)");
    add("--alpha", "alpha", "Qa zoom factor; default: contraction constant");
    add("--L", "L", "Qa initial levels");
    add("--mu", "mu", "step size");
    add("--out", "out", "output directory");
    add("--threads", "threads", "worker threads (0: all cores)");
    count_offset_opt = app->add_flag("--count-offset-bits", count_offset_bits,
                                     "charge bits for Qa centre offsets");
    app->add_option("--set", sets, "extra key=value run setting")->take_all();
  }

  // Flags win over file values; --set is applied first so named flags win.
  void ApplyTo(RunSettings& s) const {
    for (const auto& a : sets) s.SetAssignment(a);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) s.Set(key, values.at(key));
    }
    if (count_offset_opt->count() > 0) s.Set("count_offset_bits", "true");
  }
};

struct Loaded {
  qnum::NumProblem problem;
  RunSettings settings;
};

Loaded Load(const std::string& path, const RunFlags& flags) {
  const qnum::KvDocument doc = qnum::KvDocument::ParseFile(path);
  Loaded l;
  l.problem = qnum::ParseProblem(doc);
  if (const auto* run = doc.section("run")) l.settings.LoadSection(*run);
  flags.ApplyTo(l.settings);
  return l;
}

fs::path OutDir(const RunSettings& s) {
  fs::path out = s.Text("out").value_or(".");
  fs::create_directories(out);
  return out;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw qnum::Error(qnum::ErrorKind::kParam, "cannot write " + path.string());
  f << text;
}

std::string Vec(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ' ';
    s += qnum::FormatReal(v(i));
  }
  return s;
}

int Solve(const std::string& path, const RunFlags& flags) {
  const Loaded l = Load(path, flags);
  const qnum::ValidatedProblem p = qnum::Validate(l.problem);
  const qnum::Optimum opt = qnum::SolveOptimum(p);
  const qnum::KktResiduals r = qnum::ComputeKktResiduals(p, opt);
  std::cout << "x_star = " << Vec(opt.x_star) << "\n"
            << "lambda_star = " << Vec(opt.lambda_star) << "\n"
            << "stationarity_residual = " << qnum::FormatReal(r.stationarity) << "\n"
            << "feasibility_residual = " << qnum::FormatReal(r.feasibility) << "\n";
  return 0;
}

int Bounds(const std::string& path, const RunFlags& flags) {
  const Loaded l = Load(path, flags);
  const auto r_x = l.settings.Real("r_x");
  const auto r_lambda = l.settings.Real("r_lambda");
  if (!r_x || !r_lambda) {
    std::string missing = !r_x ? "r_x" : "";
    if (!r_lambda) missing += missing.empty() ? "r_lambda" : " r_lambda";
    throw qnum::Error(qnum::ErrorKind::kParam,
                      "missing rate inputs: " + missing +
                          " (bits per step; use --set r_x=... or a [run] entry)");
  }
  if (*r_x < 0.0 || *r_lambda < 0.0) {
    throw qnum::Error(qnum::ErrorKind::kParam, "rates must be >= 0");
  }
  const qnum::Experiment ex(qnum::cli::BuildExperimentConfig(l.problem, l.settings));
  qnum::BoundInputs in;
  in.mu_star = ex.config().schedule.mu_star();
  in.r_x = qnum::BitsToNats(*r_x);
  in.r_lambda = qnum::BitsToNats(*r_lambda);
  const qnum::BoundReport report = qnum::ComputeBoundReport(ex.problem(), ex.optimum(), in);

  std::ostringstream text;
  text << report.ToText();
  if (const auto steps = l.settings.Integer("steps")) {
    // Finite-time bounds at k = steps for a constant per-step rate.
    const std::size_t m = ex.problem().num_agents();
    const std::size_t n = ex.problem().num_constraints();
    qnum::RateLedger ledger(m, n);
    for (std::int64_t k = 0; k < *steps; ++k) {
      for (std::size_t i = 0; i < m; ++i) {
        ledger.Record(qnum::Side::kPrimal, i, k, *r_x / static_cast<double>(m), false);
      }
      for (std::size_t j = 0; j < n; ++j) {
        ledger.Record(qnum::Side::kDual, j, k, *r_lambda / static_cast<double>(n), false);
      }
    }
    const auto init = ex.initial_distribution();
    const auto& sched = ex.config().schedule;
    text << "steps = " << *steps << "\n";
    text << "cor1_pd = "
         << qnum::FormatReal(qnum::MsdBoundPd(*steps, ex.problem(), sched, init, ledger))
         << "\n";
    text << "cor2_primal = "
         << qnum::FormatReal(
                qnum::MsdBoundPrimal(*steps, ex.problem(), sched, init, ledger))
         << "\n";
    text << "cor2_dual = "
         << qnum::FormatReal(qnum::MsdBoundDual(*steps, ex.problem(), sched, init, ledger))
         << "\n";
  }
  std::cout << text.str();
  if (l.settings.has("out")) WriteFile(OutDir(l.settings) / "bounds.txt", text.str());
  return 0;
}

int Rate(const std::string& path, const RunFlags& flags) {
  const Loaded l = Load(path, flags);
  const qnum::Experiment ex(qnum::cli::BuildExperimentConfig(l.problem, l.settings));
  qnum::cli::CheckBitBudget(ex, l.settings);
  const qnum::TrialResult t = ex.RunTrial(0);
  const qnum::RateSummary r = qnum::SummarizeRates(t.ledger, ex.config().steps,
                                                   ex.config().count_offset_bits);
  std::cout << "horizon = " << r.horizon << "\n"
            << "r_x = " << qnum::FormatReal(r.r_x) << "\n"
            << "r_x_log2 = " << qnum::FormatReal(r.r_x_bits()) << "\n"
            << "r_lambda = " << qnum::FormatReal(r.r_lambda) << "\n"
            << "r_lambda_log2 = " << qnum::FormatReal(r.r_lambda_bits()) << "\n"
            << "r_q = " << qnum::FormatReal(r.r_q) << "\n"
            << "r_q_log2 = " << qnum::FormatReal(r.r_q_bits()) << "\n";
  return 0;
}

int RunExperiment(const qnum::Experiment& ex, const RunSettings& s) {
  qnum::cli::CheckBitBudget(ex, s);
  const fs::path out = OutDir(s);
  const qnum::MonteCarloResult res = ex.MonteCarlo();
  std::ostringstream csv;
  res.WriteCsv(csv);
  WriteFile(out / "msd.csv", csv.str());
  const std::string sidecar = res.SidecarText();
  WriteFile(out / "report.txt", sidecar);
  if (ex.config().record_traces) {
    const qnum::TrialResult t = ex.RunTrial(0);
    auto dump = [&](const std::vector<qnum::SymbolTrace>& traces, const char* stem) {
      for (std::size_t i = 0; i < traces.size(); ++i) {
        std::ostringstream f;
        traces[i].WriteCsv(f);
        WriteFile(out / (std::string(stem) + std::to_string(i + 1) + ".csv"), f.str());
      }
    };
    dump(t.primal_traces, "trace_x");
    dump(t.dual_traces, "trace_lambda");
  }
  std::cout << sidecar;
  return res.report.ok() ? 0 : kExitViolation;
}

int Simulate(const std::string& path, const RunFlags& flags) {
  const Loaded l = Load(path, flags);
  const qnum::Experiment ex(qnum::cli::BuildExperimentConfig(l.problem, l.settings));
  return RunExperiment(ex, l.settings);
}

int Reproduce(const std::string& scenario, const RunFlags& flags) {
  RunSettings s;
  flags.ApplyTo(s);
  const auto seed = s.Integer("seed").value_or(1);
  if (seed < 0) throw qnum::Error(qnum::ErrorKind::kParam, "seed must be >= 0");
  for (const char* key : {"scheme", "bits", "alpha", "L", "mu", "subdivision", "range"}) {
    if (s.has(key)) {
      throw qnum::Error(qnum::ErrorKind::kParam,
                        std::string("--") + key + " is fixed by the scenario");
    }
  }
  qnum::ExperimentConfig cfg = qnum::ScenarioConfig(scenario, static_cast<std::uint64_t>(seed));
  if (const auto v = s.Integer("trials")) cfg.trials = *v;
  if (const auto v = s.Integer("steps")) cfg.steps = *v;
  if (const auto v = s.Integer("threads")) cfg.threads = static_cast<int>(*v);
  cfg.count_offset_bits = s.Flag("count_offset_bits").value_or(false);
  cfg.record_traces = s.Flag("record_traces").value_or(false);
  std::ostringstream inst;
  qnum::WriteProblem(inst, cfg.problem);
  const qnum::Experiment ex(std::move(cfg));
  WriteFile(OutDir(s) / "instance.txt", inst.str());
  return RunExperiment(ex, s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized primal-dual network utility maximization"};
  app.require_subcommand(1);

  std::string config;
  std::string scenario;
  // One set per subcommand: CLI11 counts occurrences per option object.
  std::array<RunFlags, 5> flags;

  auto* solve = app.add_subcommand("solve", "print the optimum and KKT residuals");
  auto* bounds = app.add_subcommand("bounds", "evaluate the rate-dependent bounds");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MSD curves and checks");
  auto* rate = app.add_subcommand("rate", "bit rates of a single trajectory");
  std::size_t slot = 0;
  for (auto* sub : {solve, bounds, simulate, rate}) {
    sub->add_option("config", config, "config file ([problem] and [run])")
        ->required()
        ->check(CLI::ExistingFile);
    flags[slot++].Attach(sub);
  }
  auto* reproduce = app.add_subcommand("reproduce", "run a built-in scenario");
  reproduce->add_option("scenario", scenario, "scenario name")->required();
  flags[4].Attach(reproduce);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return Solve(config, flags[0]);
    if (*bounds) return Bounds(config, flags[1]);
    if (*simulate) return Simulate(config, flags[2]);
    if (*rate) return Rate(config, flags[3]);
    if (*reproduce) return Reproduce(scenario, flags[4]);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
