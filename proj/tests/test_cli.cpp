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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qnum/error.hpp"
#include "run_settings.hpp"
#include "test_util.hpp"

namespace qnum {
namespace {

namespace fs = std::filesystem;
using cli::RunSettings;

struct ToolRun {
  int status = -1;
  std::string out;
};

// Runs the tool with stderr folded into stdout.
ToolRun Tool(const std::string& args) {
  const std::string cmd = std::string(QNUM_TOOL) + " " + args + " 2>&1";
  ToolRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.out += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qnum_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kTwoAgentCfg = std::string(QNUM_EXAMPLES) + "/two_agent.cfg";

TEST(RunSettings, FileThenOverrides) {
  std::istringstream in("[run]\nmu = 0.4\ntrials = 7\nscheme = qa\n");
  const KvDocument doc = KvDocument::Parse(in);
  RunSettings s;
  s.LoadSection(*doc.section("run"));
  s.Set("trials", "9");
  s.SetAssignment(" steps = 12 ");
  EXPECT_EQ(*s.Integer("trials"), 9);
  EXPECT_EQ(*s.Integer("steps"), 12);
  EXPECT_DOUBLE_EQ(*s.Real("mu"), 0.4);
  EXPECT_FALSE(s.Real("alpha").has_value());
}

TEST(RunSettings, Errors) {
  std::istringstream in("[run]\nmu = 0.4\n\nbogus = 1\n");
  const KvDocument doc = KvDocument::Parse(in);
  RunSettings s;
  try {
    s.LoadSection(*doc.section("run"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_QNUM_ERROR(s.Set("bogus", "1"), ErrorKind::kParam);
  EXPECT_QNUM_ERROR(s.SetAssignment("novalue"), ErrorKind::kParam);

  std::istringstream bad("[run]\nmu = fast\n");
  const KvDocument d2 = KvDocument::Parse(bad);
  RunSettings t;
  t.LoadSection(*d2.section("run"));
  try {
    t.Real("mu");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  t.Set("steps", "many");
  EXPECT_QNUM_ERROR(t.Integer("steps"), ErrorKind::kParam);
}

TEST(BuildExperimentConfig, SchemesAndRequiredKeys) {
  RunSettings s;
  EXPECT_QNUM_ERROR(cli::BuildExperimentConfig(testing::TwoAgent(), s), ErrorKind::kParam);
  s.Set("mu", "0.4");
  ExperimentConfig cfg = cli::BuildExperimentConfig(testing::TwoAgent(), s);
  EXPECT_EQ(cfg.scheme.kind, CodecKind::kQa);
  EXPECT_EQ(cfg.scheme.qa.levels, 5);
  s.Set("scheme", "static");
  EXPECT_QNUM_ERROR(cli::BuildExperimentConfig(testing::TwoAgent(), s), ErrorKind::kParam);
  s.Set("range", "3");
  s.Set("bits", "4");
  cfg = cli::BuildExperimentConfig(testing::TwoAgent(), s);
  EXPECT_EQ(cfg.scheme.kind, CodecKind::kStaticUniform);
  EXPECT_EQ(cfg.scheme.static_bits, 4);
  s.Set("scheme", "lloyd");
  EXPECT_QNUM_ERROR(cli::BuildExperimentConfig(testing::TwoAgent(), s), ErrorKind::kParam);
}

TEST(CheckBitBudget, QaAlphabetMustFit) {
  RunSettings s;
  s.Set("mu", "0.4");
  s.Set("alpha", "0.97");
  s.Set("bits", "3");
  const Experiment ok(cli::BuildExperimentConfig(testing::TwoAgent(), s));
  EXPECT_NO_THROW(cli::CheckBitBudget(ok, s));
  s.Set("alpha", "0.5");  // H = 4, alphabet 8: still 3 bits
  EXPECT_NO_THROW(cli::CheckBitBudget(Experiment(cli::BuildExperimentConfig(testing::TwoAgent(), s)), s));
  s.Set("alpha", "0.3");  // H = 7, alphabet 14: 4 bits
  EXPECT_QNUM_ERROR(
      cli::CheckBitBudget(Experiment(cli::BuildExperimentConfig(testing::TwoAgent(), s)), s),
      ErrorKind::kParam);
}

TEST(Tool, SolvePrintsOptimum) {
  const ToolRun r = Tool("solve " + kTwoAgentCfg);
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("x_star = 1 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("lambda_star = -1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("feasibility_residual = 0"), std::string::npos) << r.out;
}

TEST(Tool, MalformedFileReportsLine) {
  const fs::path dir = Scratch("malformed");
  std::ofstream(dir / "bad.cfg") << "[problem]\nM = 2\nN = 1\nutility.1.a = one\nutility.1.c = 0\n"
                               << "utility.2.a = 1\nutility.2.c = 0\nA = 1 1\nb = 2\n";
  const ToolRun r = Tool("solve " + (dir / "bad.cfg").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("line 4"), std::string::npos) << r.out;
}

TEST(Tool, BoundsNeedRates) {
  const ToolRun missing = Tool("bounds " + kTwoAgentCfg);
  EXPECT_EQ(missing.status, 1);
  EXPECT_NE(missing.out.find("missing rate inputs"), std::string::npos) << missing.out;
  const ToolRun ok = Tool("bounds " + kTwoAgentCfg + " --set r_x=6 --set r_lambda=3");
  EXPECT_EQ(ok.status, 0) << ok.out;
  EXPECT_NE(ok.out.find("beta_exact = 545"), std::string::npos) << ok.out;
  EXPECT_NE(ok.out.find("r_q_log2 = "), std::string::npos);
}

TEST(Tool, FlagsWinOverFile) {
  const ToolRun r = Tool("rate " + kTwoAgentCfg + " --steps 4");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("horizon = 4\n"), std::string::npos) << r.out;
  // (4 + 3 * 3) / 4 bits per agent, two agents.
  EXPECT_NE(r.out.find("r_x_log2 = 6.5\n"), std::string::npos) << r.out;
}

TEST(Tool, SimulateWritesOutputs) {
  const fs::path dir = Scratch("simulate");
  const ToolRun r = Tool("simulate " + kTwoAgentCfg + " --trials 50 --steps 100 --out " +
                     dir.string() + " --set record_traces=true");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "msd.csv"));
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
  EXPECT_TRUE(fs::exists(dir / "trace_x1.csv"));
  EXPECT_TRUE(fs::exists(dir / "trace_lambda1.csv"));
  EXPECT_NE(Slurp(dir / "report.txt").find("violations = 0"), std::string::npos);
}

TEST(Tool, ReproduceIsByteDeterministic) {
  const fs::path a = Scratch("repro_a");
  const fs::path b = Scratch("repro_b");
  const std::string args = "reproduce paper-fig3 --trials 200 --seed 4 --out ";
  const ToolRun ra = Tool(args + a.string());
  const ToolRun rb = Tool(args + b.string() + " --threads 2");
  EXPECT_EQ(ra.status, 0) << ra.out;
  EXPECT_EQ(rb.status, 0) << rb.out;
  EXPECT_EQ(Slurp(a / "msd.csv"), Slurp(b / "msd.csv"));
  EXPECT_EQ(Slurp(a / "report.txt"), Slurp(b / "report.txt"));
  EXPECT_EQ(Slurp(a / "instance.txt"), Slurp(b / "instance.txt"));
  EXPECT_FALSE(Slurp(a / "msd.csv").empty());
}

TEST(Tool, ReproduceUnknownScenario) {
  const ToolRun r = Tool("reproduce fig9");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("unknown scenario"), std::string::npos) << r.out;
}

TEST(Tool, ViolationGivesNonzeroExit) {
  // Divergent dynamics (rho(T) = sqrt 2) with a forced alpha fail every trial.
  const ToolRun r = Tool("simulate " + kTwoAgentCfg + " --mu 1 --trials 2 --steps 300 --out " +
                     Scratch("diverge").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("TrialFailures"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace qnum
