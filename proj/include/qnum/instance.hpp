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

// Seeded random quadratic NUM instances, re-sampled until the PD map for the
// requested step size contracts fast enough.

#include <cstdint>

#include "qnum/problem.hpp"

namespace qnum {

struct InstanceSpec {
  std::size_t num_agents = 10;
  std::size_t num_constraints = 5;
  double a_lo = 20.0;  // curvature a_i ~ U(a_lo, a_hi)
  double a_hi = 50.0;
  // Entries of A are U(-1, 1); each row is then rescaled to a norm drawn
  // from U(row_norm_lo, row_norm_hi).
  double row_norm_lo = 5.0;
  double row_norm_hi = 25.0;
  double c_range = 5.0;  // c_i ~ U(-c_range, c_range)
  double b_range = 1.0;  // b_j ~ U(-b_range, b_range)
  double mu = 0.019;
  double rho_max = 0.9495;
  int max_attempts = 100000;
};

struct GeneratedInstance {
  NumProblem problem;
  double rho = 0.0;  // spectral radius of T at spec.mu
  int attempts = 0;
};

// Throws Error{kParam} for an inconsistent spec (including mu above 1/a_hi)
// and Error{kNotContractive} if no draw passes within max_attempts.
GeneratedInstance GenerateInstance(const InstanceSpec& spec, std::uint64_t seed);

}  // namespace qnum
