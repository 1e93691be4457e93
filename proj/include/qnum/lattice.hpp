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

// Counting points of the lattice T Z^d inside the origin-centred box B whose
// i-th side is 4 rho |T_ii| + 2 ||T||_inf. The box is closed, with an
// additive slack of 1e-12 * side on each face to absorb rounding ties.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "qnum/pd.hpp"

namespace qnum {

inline constexpr std::uint64_t kDefaultLatticeBudget = 100'000'000;
inline constexpr double kLatticeBoundarySlack = 1e-12;

struct BoxB {
  Eigen::VectorXd sides;
};

struct LatticeCountResult {
  std::optional<std::uint64_t> exact;
  // prod_i (floor(l*_i) + 1); saturates at UINT64_MAX (see log_upper).
  std::uint64_t upper = 0;
  double log_upper = 0.0;
  double rho = 1.0;
  std::optional<std::uint64_t> enumerated_points;
  bool budget_exceeded = false;
};

// ||T||_inf: largest absolute row sum.
double InfNorm(const Eigen::MatrixXd& t);

// Throws Error{kParam} if rho < 1 or T is not square.
BoxB BuildBox(const Eigen::MatrixXd& t, double rho = 1.0);
inline BoxB BuildBox(const TMatrix& t, double rho = 1.0) {
  return BuildBox(t.entries, rho);
}

// l*_i = sum_j |T^-1_ij| side_j, the sides of the tightest axis-aligned box
// around T^-1(B). Throws Error{kSingularT}.
Eigen::VectorXd EnclosingSides(const Eigen::MatrixXd& t, const BoxB& box);

std::uint64_t CountUpper(const Eigen::MatrixXd& t, const BoxB& box);
// log of the same product, usable when the count overflows 64 bits.
double LogCountUpper(const Eigen::MatrixXd& t, const BoxB& box);

// Enumerates integer vectors I inside the bounding box of T^-1(B) and counts
// those with T I in B. When the candidate count exceeds `budget` only the
// upper bound is filled in (budget_exceeded = true).
LatticeCountResult CountExact(const Eigen::MatrixXd& t, const BoxB& box,
                              std::uint64_t budget = kDefaultLatticeBudget,
                              double rho = 1.0);

}  // namespace qnum
