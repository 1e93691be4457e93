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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qnum {

enum class ErrorKind {
  kDimension,
  kRank,
  kCurvature,
  kSingularKkt,
  kNoConvergence,
  kNumeric,
  kNotQuadratic,
  kNotContractive,
  kParam,
  kIntervalViolation,
  kDesync,
  kEmptyLedger,
  kSingularT,
  kDomain,
  kParse,
  kTrialFailures,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so that
// callers (and tests) can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by codecs when a value escapes the interval the zoom-in scheme
// predicted for it. `step` is the time index at which it happened.
class IntervalViolation : public Error {
 public:
  IntervalViolation(std::int64_t step, const std::string& message);

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

// Parse failures point at a 1-based line of the offending input.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace qnum
