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

#include "run_settings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include "qnum/error.hpp"
#include "qnum/format.hpp"

namespace qnum::cli {
namespace {

constexpr std::array<std::string_view, 17> kKeys = {
    "seed",  "trials", "steps",           "scheme",        "bits",
    "alpha", "L",      "subdivision",     "range",         "mu",
    "out",   "threads", "count_offset_bits", "record_traces", "init_half_width",
    "r_x",   "r_lambda"};

}  // namespace

bool RunSettings::IsKey(const std::string& key) {
  return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end();
}

void RunSettings::LoadSection(const KvDocument::Section& section) {
  for (const auto& [key, entry] : section) {
    if (!IsKey(key)) throw ParseError(entry.line, "unknown run key '" + key + "'");
    values_[key] = entry;
  }
}

void RunSettings::Set(const std::string& key, const std::string& value) {
  if (!IsKey(key)) throw Error(ErrorKind::kParam, "unknown run key '" + key + "'");
  values_[key] = KvEntry{value, 0};
}

void RunSettings::SetAssignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::kParam, "expected key=value, got '" + assignment + "'");
  }
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  Set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunSettings::Fail(const std::string& key, const std::string& what) const {
  const KvEntry& e = values_.at(key);
  if (e.line > 0) throw ParseError(e.line, key + ": " + what);
  throw Error(ErrorKind::kParam, "--" + key + ": " + what);
}

std::optional<std::string> RunSettings::Text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second.value;
}

std::optional<double> RunSettings::Real(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  try {
    return ParseReal(it->second.value, it->second.line);
  } catch (const ParseError&) {
    Fail(key, "expected a real number, got '" + it->second.value + "'");
  }
}

std::optional<std::int64_t> RunSettings::Integer(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  try {
    return ParseInteger(it->second.value, it->second.line);
  } catch (const ParseError&) {
    Fail(key, "expected an integer, got '" + it->second.value + "'");
  }
}

std::optional<bool> RunSettings::Flag(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  const std::string& v = it->second.value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Fail(key, "expected true or false, got '" + v + "'");
}

ExperimentConfig BuildExperimentConfig(NumProblem problem, const RunSettings& s) {
  ExperimentConfig cfg;
  cfg.problem = std::move(problem);
  const auto mu = s.Real("mu");
  if (!mu) throw Error(ErrorKind::kParam, "missing step size: set mu");
  cfg.schedule = StepSchedule::Constant(*mu);
  cfg.steps = s.Integer("steps").value_or(100);
  cfg.trials = s.Integer("trials").value_or(100);
  const auto seed = s.Integer("seed").value_or(1);
  if (seed < 0) throw Error(ErrorKind::kParam, "seed must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.threads = static_cast<int>(s.Integer("threads").value_or(0));
  cfg.count_offset_bits = s.Flag("count_offset_bits").value_or(false);
  cfg.record_traces = s.Flag("record_traces").value_or(false);
  if (const auto w = s.Real("init_half_width")) cfg.init_half_width = *w;

  const std::string scheme = s.Text("scheme").value_or("qa");
  const auto bits = s.Integer("bits");
  if (scheme == "qa") {
    const auto levels = s.Integer("L").value_or(5);
    const auto sub = s.Integer("subdivision").value_or(1);
    cfg.scheme = SchemeConfig::Qa(s.Real("alpha").value_or(0.0),
                                  static_cast<int>(levels), static_cast<int>(sub));
  } else if (scheme == "static") {
    const auto range = s.Real("range");
    if (!range || !bits) {
      throw Error(ErrorKind::kParam, "static scheme needs range and bits");
    }
    cfg.scheme = SchemeConfig::StaticUniform(*range, static_cast<int>(*bits));
  } else if (scheme == "passthrough") {
    cfg.scheme = SchemeConfig::Passthrough();
  } else {
    throw Error(ErrorKind::kParam,
                "unknown scheme '" + scheme + "' (qa, static, passthrough)");
  }
  return cfg;
}

void CheckBitBudget(const Experiment& ex, const RunSettings& s) {
  const auto bits = s.Integer("bits");
  if (!bits || ex.config().scheme.kind != CodecKind::kQa) return;
  const QaParams& p = ex.config().scheme.qa;
  const auto h = static_cast<std::int64_t>(std::ceil(2.0 / ex.alpha()));
  const int need = CeilLog2(2 * h * p.subdivision);
  if (need > *bits) {
    throw Error(ErrorKind::kParam, "Qa with alpha = " + FormatReal(ex.alpha()) +
                                       " needs " + std::to_string(need) +
                                       " bits per symbol, budget is " +
                                       std::to_string(*bits));
  }
}

}  // namespace qnum::cli
