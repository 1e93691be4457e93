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

// Run settings for the command-line tool: `[run]` keys from a config file,
// then flag overrides on top.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "qnum/problem_io.hpp"
#include "qnum/sim.hpp"

namespace qnum::cli {

class RunSettings {
 public:
  // Recognized keys: seed trials steps scheme bits alpha L subdivision range
  // mu out count_offset_bits record_traces threads init_half_width r_x
  // r_lambda.
  static bool IsKey(const std::string& key);

  // Throws ParseError for an unknown key.
  void LoadSection(const KvDocument::Section& section);
  // Flag or --set override. Throws Error{kParam} for an unknown key.
  void Set(const std::string& key, const std::string& value);
  // "key=value" form.
  void SetAssignment(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> Text(const std::string& key) const;
  std::optional<double> Real(const std::string& key) const;
  std::optional<std::int64_t> Integer(const std::string& key) const;
  std::optional<bool> Flag(const std::string& key) const;

 private:
  [[noreturn]] void Fail(const std::string& key, const std::string& what) const;

  std::map<std::string, KvEntry> values_;  // line 0: came from a flag
};

// Scheme, schedule and run sizes from the settings. `mu` is required.
ExperimentConfig BuildExperimentConfig(NumProblem problem, const RunSettings& s);

// With `bits` set and a Qa scheme: throws Error{kParam} if the resolved
// alphabet needs more bits per symbol than the budget.
void CheckBitBudget(const Experiment& ex, const RunSettings& s);

}  // namespace qnum::cli
