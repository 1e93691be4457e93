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

// Text formats. A document is a list of `key = value` lines, optionally
// grouped under `[section]` headers; `#` starts a comment. Problem files use
// the keys
//
//   M = <agents>
//   N = <constraints>
//   utility.<i>.a = <curvature>     (i = 1..M)
//   utility.<i>.c = <linear term>
//   utility.<i>.f = <offset>        (optional, default 0)
//   A = <N*M reals, row-major, separated by spaces or commas>
//   b = <N reals>
//
// either at top level or under `[problem]`.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qnum/problem.hpp"

namespace qnum {

struct KvEntry {
  std::string value;
  int line = 0;
};

class KvDocument {
 public:
  using Section = std::map<std::string, KvEntry>;

  static KvDocument Parse(std::istream& in);
  static KvDocument ParseFile(const std::filesystem::path& path);

  // The unnamed top-level section is "".
  const Section* section(const std::string& name) const;
  bool has_section(const std::string& name) const {
    return section(name) != nullptr;
  }

 private:
  std::map<std::string, Section> sections_;
};

// Whitespace/comma separated reals; throws ParseError at `line`.
std::vector<double> ParseReals(const std::string& text, int line);
double ParseReal(const std::string& text, int line);
long long ParseInteger(const std::string& text, int line);

// Reads the `[problem]` section if present, else the top level. Missing,
// duplicate, malformed or unrecognized keys raise ParseError with the line.
NumProblem ParseProblem(const KvDocument& doc);
NumProblem ParseProblem(std::istream& in);
NumProblem LoadProblemFile(const std::filesystem::path& path);

// Quadratic instances only; round-trips through ParseProblem exactly.
void WriteProblem(std::ostream& out, const NumProblem& problem);

}  // namespace qnum
