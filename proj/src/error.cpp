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

#include "qnum/error.hpp"

namespace qnum {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "DimensionError";
    case ErrorKind::kRank: return "RankError";
    case ErrorKind::kCurvature: return "CurvatureError";
    case ErrorKind::kSingularKkt: return "SingularKkt";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kNumeric: return "NumericError";
    case ErrorKind::kNotQuadratic: return "NotQuadratic";
    case ErrorKind::kNotContractive: return "NotContractive";
    case ErrorKind::kParam: return "ParamError";
    case ErrorKind::kIntervalViolation: return "IntervalViolation";
    case ErrorKind::kDesync: return "DesyncError";
    case ErrorKind::kEmptyLedger: return "EmptyLedger";
    case ErrorKind::kSingularT: return "SingularT";
    case ErrorKind::kDomain: return "DomainError";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kTrialFailures: return "TrialFailures";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
      kind_(kind) {}

IntervalViolation::IntervalViolation(std::int64_t step,
                                     const std::string& message)
    : Error(ErrorKind::kIntervalViolation,
            "step " + std::to_string(step) + ": " + message),
      step_(step) {}

ParseError::ParseError(int line, const std::string& message)
    : Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace qnum
